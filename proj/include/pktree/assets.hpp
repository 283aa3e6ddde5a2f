#pragma once

#include <iosfwd>
#include <optional>

#include "pktree/kernel.hpp"

namespace pktree {

/// A dividend-paying asset: non-negative dividends on a depth range within
/// [1, H], an optional terminal redemption paid at the kernel horizon
/// (treated as part of the final dividend), and an optional given value
/// process for decomposition.
struct DividendAsset {
    AdaptedProcess dividends;
    double terminal_redemption = 0.0;
    std::optional<AdaptedProcess> value;
};

/// Ex-dividend price S_i = E_i[sum_{n>i} pi_n D_n] / pi_i with S_H = 0.
/// Dividends outside [1, H] are rejected (DividendOutsideHorizon); the
/// terminal redemption is added to D_H.
AdaptedProcess price_fundamental(const PricingKernel& kernel, const AdaptedProcess& dividends,
                                 double terminal_redemption = 0.0);

/// Same price via the ratio-of-potentials route: S_i = (E_i[F_H] - F_i)/pi_i
/// with F the running deflated dividend sum. Algebraically identical to
/// price_fundamental at finite horizon; kept as an independent code path.
AdaptedProcess potential_ratio_price(const PricingKernel& kernel, const AdaptedProcess& dividends,
                                     double terminal_redemption = 0.0);

/// Split of a value process into fundamental part and retained-earnings
/// martingale: pi_i S_i = m_i + E_i[sum_{n>i} pi_n D_n] node-wise. The
/// finite-horizon m absorbs E_i[pi_H S_H]; it vanishes exactly when the
/// transversality statistic does.
struct ValueDecomposition {
    AdaptedProcess fundamental;        // discounted dividend value on [0, H]
    AdaptedProcess bubble;             // non-negative martingale m on [0, H]
    double terminal_value = 0.0;       // E[pi_H S_H]
    std::vector<double> transversality; // E[pi_j S_j] for j = 0..H
};

/// Decomposes a given (S, D) pair. The pair must satisfy the pricing axiom
/// first: M_i = pi_i S_i + sum_{n<=i} pi_n D_n must be a martingale within
/// the kernel tolerance, otherwise AxiomAViolation is thrown.
ValueDecomposition decompose_value(const PricingKernel& kernel, const AdaptedProcess& value,
                                   const AdaptedProcess& dividends);
/// Zero-dividend overload (pure value asset, e.g. the money-market account).
ValueDecomposition decompose_value(const PricingKernel& kernel, const AdaptedProcess& value);

struct TransversalityReport {
    CheckReport report;           // passes iff E[pi_H S_H] <= tolerance
    std::vector<double> sequence; // E[pi_j S_j] for j = 0..H
    bool nonincreasing = true;    // diagnostic only
};

/// Reports the decay sequence E[pi_j S_j]; a non-vanishing terminal value
/// identifies permanently retained earnings (a bubble).
TransversalityReport transversality_check(const PricingKernel& kernel, const AdaptedProcess& value,
                                          double tolerance);

/// Symmetric pricing form S_i = E_i[sum pi_n D_n + redemption * pi_H] /
/// (E_i[sum pi_n r_n] + E_i[pi_H]). The denominator's terminal residual makes
/// it equal pi_i exactly, so D = r with unit redemption prices to 1
/// identically. Both D and r must be previsible; r must be strictly positive.
AdaptedProcess fx_price(const PricingKernel& kernel, const AdaptedProcess& dividends,
                        const AdaptedProcess& rate, double terminal_redemption = 1.0);

/// CSV rows `depth,node,value`: the price field over all nodes, then the
/// transversality sequence with node `*`.
void write_price_csv(std::ostream& out, const AdaptedProcess& price,
                     const std::vector<double>& transversality);

} // namespace pktree
