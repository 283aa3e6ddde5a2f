#pragma once

#include <string>

#include "pktree/process.hpp"

namespace pktree {

struct NodeRef {
    int depth = -1;
    NodeId id = kNoNode;
};

/// Outcome of a process-classification or identity check.
///
/// For equality-type checks, max_violation is the largest absolute deviation
/// and the check passes iff max_violation <= tolerance. For strictness-type
/// checks (strict supermartingale, strict increase) the convention is
/// inverted: max_violation holds the signed deviation E - X at the worst
/// node, tolerance holds the negated strictness margin, and the check passes
/// iff the worst margin stays above the required one.
struct CheckReport {
    std::string name;
    bool pass = true;
    double max_violation = 0.0;
    NodeRef witness;
    double tolerance = 0.0;
};

/// Passes iff |E_i[X_{i+1}] - X_i| <= tolerance at every node over every
/// adjacent depth pair in X's range. Throws EmptyRange when the range holds
/// no adjacent pair.
CheckReport is_martingale(const AdaptedProcess& x, double tolerance,
                          const std::string& name = "martingale");

/// Passes iff X_i - E_i[X_{i+1}] > tolerance at every node (strictness
/// margin must exceed the tolerance). See CheckReport for the reporting
/// convention.
CheckReport is_strict_supermartingale(const AdaptedProcess& x, double tolerance,
                                      const std::string& name = "strict-supermartingale");

/// Passes iff X_i is constant across all children of each depth-(i-1) node,
/// for every depth i >= 1 in range. Throws RangeStartsAtRoot when the range
/// begins at depth 0 (previsibility at the root is vacuous).
CheckReport is_previsible(const AdaptedProcess& x, double tolerance = 0.0,
                          const std::string& name = "previsible");

} // namespace pktree
