#pragma once

#include <optional>
#include <vector>

#include "pktree/assets.hpp"
#include "pktree/bonds.hpp"
#include "pktree/kernel.hpp"

namespace pktree {

/// Rational-model provenance: kept alongside a kernel so the closed-form
/// identities can be checked against the generic machinery.
struct RationalParts {
    Schedule alpha;
    Schedule beta;
    AdaptedProcess martingale;
};

/// Runs the full structural identity suite for one kernel: supermartingale
/// and decay properties, money-market account (previsibility, strict
/// increase, martingale deflation), one-period bond/account identity, bond
/// surface bounds and monotonicity, positive-martingale representation
/// (columns and reconstruction), Doob decomposition identities, the
/// Doob-based positive-return asset, floating-rate-note par pricing and the
/// symmetric pricing form. Closed-form checks are added when rational
/// provenance is supplied; the driver roundtrip when `increasing_driver` is.
std::vector<CheckReport> run_check_suite(const PricingKernel& kernel,
                                         const std::optional<RationalParts>& rational = std::nullopt,
                                         const AdaptedProcess* increasing_driver = nullptr);

bool all_pass(const std::vector<CheckReport>& checks);

} // namespace pktree
