#pragma once

#include "pktree/checks.hpp"
#include "pktree/models.hpp"
#include "pktree/process.hpp"

namespace pktree {

class BondSurface; // bonds.hpp

/// Validation tolerances for kernels and the identities derived from them:
/// `tolerance` bounds absolute deviations in identity checks, `strictness`
/// is the margin strict inequalities must clear.
struct KernelOptions {
    double tolerance = 1e-10;
    double strictness = 1e-12;
};

/// A strictly positive, strictly supermartingale adapted process on depths
/// [0, horizon]. Instances only exist validated: positivity, the strict
/// one-step supermartingale property, and strict decay of E[pi_i] are all
/// checked at construction.
class PricingKernel {
public:
    const AdaptedProcess& values() const { return pi_; }
    double operator[](NodeId id) const { return pi_[id]; }
    int horizon() const { return pi_.hi(); }
    const FiltrationTree& tree() const { return pi_.tree(); }
    const TreePtr& tree_ptr() const { return pi_.tree_ptr(); }
    const KernelOptions& options() const { return options_; }

private:
    friend PricingKernel kernel_from_process(AdaptedProcess, KernelOptions);
    PricingKernel(AdaptedProcess pi, KernelOptions options)
        : pi_(std::move(pi)), options_(options) {}

    AdaptedProcess pi_;
    KernelOptions options_;
};

/// Validates raw values as a pricing kernel. Throws NonPositiveKernel or
/// NotStrictSupermartingale (message carries the witness node) on rejection.
PricingKernel kernel_from_process(AdaptedProcess pi, KernelOptions options = {});

/// Rational model: pi_i = alpha_i + beta_i * N_i with positive strictly
/// decreasing schedules and a positive martingale N (checked).
PricingKernel kernel_rational(const TreePtr& tree, const Schedule& alpha, const Schedule& beta,
                              const AdaptedProcess& martingale, KernelOptions options = {});

/// Previsible money-market account: B_0 = 1, B strictly increasing along
/// every path, B_i constant across siblings; r is the matching short rate,
/// stored on depth-i nodes (sibling-constant, computed at the parent).
struct MoneyMarketAccount {
    AdaptedProcess account;    // B on [0, H]
    AdaptedProcess short_rate; // r on [1, H]
};

struct MultiplicativeDecomposition {
    MoneyMarketAccount money_market;
    AdaptedProcess rho; // pi * B, a martingale on [0, H]
};

/// Positive-return asset: increasing and positive but not necessarily
/// previsible. `deflated` is pi * B-bar, a martingale on the shared range.
struct PositiveReturnAsset {
    AdaptedProcess account;  // B-bar on [0, H]
    AdaptedProcess rate;     // r-bar on [1, H], strictly positive
    AdaptedProcess deflated; // rho-bar = pi * B-bar on [0, H]
};

struct IncreasingDriverResult {
    PricingKernel kernel;
    PositiveReturnAsset asset;
};

/// Builds a kernel from a strictly increasing adapted driver G with G_0 = 0:
/// pi_i = E_i[G_N] - G_i on [0, N-1] (the terminal depth is excluded since
/// pi_N would vanish), r-bar_i = (G_i - G_{i-1}) / pi_i, B-bar the rolled-up
/// product. The companion rho-bar = pi * B-bar is verified to be a martingale.
IncreasingDriverResult kernel_from_increasing(const AdaptedProcess& g, KernelOptions options = {});

/// Short rate r_i = pi_{i-1} / E_{i-1}[pi_i] - 1 on [1, H], sibling-constant,
/// strictly positive for any valid kernel.
AdaptedProcess short_rate(const PricingKernel& kernel);

/// Multiplicative decomposition pi = rho / B: B_i = (pi_{i-1}/E_{i-1}[pi_i]) B_{i-1},
/// rho = pi B. Asserts that rho is a martingale and that B is previsible and
/// strictly increasing; a failure signals an internal bug, not bad input.
MultiplicativeDecomposition multiplicative_decomposition(const PricingKernel& kernel);

/// Doob decomposition of the kernel: previsible increasing compensator
/// A_i = sum_{n<i} (pi_n - E_n[pi_{n+1}]) with A_0 = 0, plus the terminal
/// residual field E_i[pi_H]. The finite-horizon identity
/// pi_i = E_i[A_H] - A_i + E_i[pi_H] is asserted node-wise.
struct DoobDecomposition {
    AdaptedProcess compensator; // A on [0, H]
    AdaptedProcess residual;    // E_i[pi_H] on [0, H]
};

DoobDecomposition doob_decomposition(const PricingKernel& kernel);

/// Positive-return asset built from the Doob decomposition:
/// r-bar_i = r_i pi_{i-1} P_{i-1,i} / pi_i. The running sum of pi_n r-bar_n
/// reproduces the Doob compensator node-wise.
PositiveReturnAsset positive_return_from_doob(const PricingKernel& kernel,
                                              const BondSurface& bonds);

} // namespace pktree
