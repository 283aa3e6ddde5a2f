#include "pktree/checks.hpp"

#include <cmath>
#include <limits>

namespace pktree {

CheckReport is_martingale(const AdaptedProcess& x, double tolerance, const std::string& name) {
    if (x.hi() <= x.lo()) throw Error(Errc::EmptyRange, "martingale check needs two adjacent depths");
    const FiltrationTree& tree = x.tree();

    CheckReport report{name, true, 0.0, NodeRef{}, tolerance};
    for (int i = x.lo(); i < x.hi(); ++i) {
        const std::vector<double> e = one_step_expectation(x, i + 1);
        const NodeId begin = tree.level_begin(i);
        for (NodeId v = begin; v < tree.level_end(i); ++v) {
            const double violation = std::abs(e[static_cast<std::size_t>(v - begin)] - x[v]);
            if (violation > report.max_violation || report.witness.id == kNoNode) {
                report.max_violation = violation;
                report.witness = NodeRef{i, v};
            }
        }
    }
    report.pass = report.max_violation <= tolerance;
    return report;
}

CheckReport is_strict_supermartingale(const AdaptedProcess& x, double tolerance,
                                      const std::string& name) {
    if (x.hi() <= x.lo()) throw Error(Errc::EmptyRange, "supermartingale check needs two adjacent depths");
    const FiltrationTree& tree = x.tree();

    // Strictness convention: margin X_i - E_i[X_{i+1}] must exceed the
    // tolerance everywhere. max_violation carries the signed E - X at the
    // worst node, compared against -tolerance.
    CheckReport report{name, true, 0.0, NodeRef{}, -tolerance};
    double worst_margin = std::numeric_limits<double>::infinity();
    for (int i = x.lo(); i < x.hi(); ++i) {
        const std::vector<double> e = one_step_expectation(x, i + 1);
        const NodeId begin = tree.level_begin(i);
        for (NodeId v = begin; v < tree.level_end(i); ++v) {
            const double margin = x[v] - e[static_cast<std::size_t>(v - begin)];
            if (margin < worst_margin) {
                worst_margin = margin;
                report.max_violation = -margin;
                report.witness = NodeRef{i, v};
            }
        }
    }
    report.pass = worst_margin > tolerance;
    return report;
}

CheckReport is_previsible(const AdaptedProcess& x, double tolerance, const std::string& name) {
    if (x.lo() < 1) throw Error(Errc::RangeStartsAtRoot, "previsibility range must start at depth 1");
    const FiltrationTree& tree = x.tree();

    CheckReport report{name, true, 0.0, NodeRef{}, tolerance};
    for (int i = x.lo(); i <= x.hi(); ++i) {
        for (NodeId v = tree.level_begin(i - 1); v < tree.level_end(i - 1); ++v) {
            const double first = x[tree.child(v, 0)];
            for (int c = 1; c < tree.child_count(v); ++c) {
                const double violation = std::abs(x[tree.child(v, c)] - first);
                if (violation > report.max_violation || report.witness.id == kNoNode) {
                    report.max_violation = violation;
                    report.witness = NodeRef{i, tree.child(v, c)};
                }
            }
            if (report.witness.id == kNoNode) report.witness = NodeRef{i, tree.child(v, 0)};
        }
    }
    report.pass = report.max_violation <= tolerance;
    return report;
}

} // namespace pktree
