#include "pktree/process.hpp"

#include <cmath>
#include <cstdio>
#include <utility>

namespace pktree {

namespace {

[[noreturn]] void throw_depth(Errc code, const char* what, int depth) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s (depth %d)", what, depth);
    throw Error(code, buf);
}

} // namespace

AdaptedProcess::AdaptedProcess(TreePtr tree, int lo, int hi)
    : tree_(std::move(tree)), lo_(lo), hi_(hi) {
    if (!tree_) throw Error(Errc::InvalidArgument, "process requires a tree");
    if (lo_ < 0 || lo_ > hi_ || hi_ > tree_->depth())
        throw Error(Errc::InvalidArgument, "process depth range must satisfy 0 <= lo <= hi <= N");
    values_.assign(tree_->node_count(), 0.0);
}

AdaptedProcess AdaptedProcess::constant(TreePtr tree, int lo, int hi, double value) {
    AdaptedProcess p(std::move(tree), lo, hi);
    for (NodeId id = p.tree().level_begin(lo); id < p.tree().level_end(hi); ++id) p[id] = value;
    return p;
}

AdaptedProcess AdaptedProcess::from_depth_values(TreePtr tree, int lo,
                                                 const std::vector<std::vector<double>>& per_depth) {
    if (per_depth.empty()) throw Error(Errc::InvalidArgument, "no values supplied");
    const int hi = lo + static_cast<int>(per_depth.size()) - 1;
    AdaptedProcess p(std::move(tree), lo, hi);
    for (int d = lo; d <= hi; ++d) {
        const std::vector<double>& level = per_depth[static_cast<std::size_t>(d - lo)];
        if (level.size() != p.tree().level_size(d))
            throw_depth(Errc::InvalidArgument, "value count does not match the level size", d);
        NodeId id = p.tree().level_begin(d);
        for (double v : level) p[id++] = v;
    }
    p.require_finite();
    return p;
}

AdaptedProcess AdaptedProcess::from_function(TreePtr tree, int lo, int hi,
                                             const std::function<double(const TreeNode&)>& fn) {
    AdaptedProcess p(std::move(tree), lo, hi);
    for (NodeId id = p.tree().level_begin(lo); id < p.tree().level_end(hi); ++id)
        p[id] = fn(p.tree().node(id));
    return p;
}

double AdaptedProcess::at(NodeId id) const {
    const int d = tree_->depth_of(id);
    if (!defined_at(d)) throw_depth(Errc::ProcessNotDefinedAtDepth, "process value requested", d);
    return values_[static_cast<std::size_t>(id)];
}

void AdaptedProcess::require_finite() const {
    for (NodeId id = tree_->level_begin(lo_); id < tree_->level_end(hi_); ++id)
        if (!std::isfinite(values_[static_cast<std::size_t>(id)]))
            throw_depth(Errc::InvalidArgument, "process values must be finite", tree_->depth_of(id));
}

std::vector<double> AdaptedProcess::depth_values(int depth) const {
    if (!defined_at(depth)) throw_depth(Errc::ProcessNotDefinedAtDepth, "no values at", depth);
    std::vector<double> out;
    out.reserve(tree_->level_size(depth));
    for (NodeId id = tree_->level_begin(depth); id < tree_->level_end(depth); ++id)
        out.push_back(values_[static_cast<std::size_t>(id)]);
    return out;
}

std::vector<double> one_step_expectation(const AdaptedProcess& x, int k) {
    const FiltrationTree& tree = x.tree();
    if (k < 1 || k > tree.depth()) throw Error(Errc::DepthOrderViolation, "one-step source depth out of range");
    if (!x.defined_at(k)) throw Error(Errc::ProcessNotDefinedAtDepth, "process undefined at source depth");
    std::vector<double> out(tree.level_size(k - 1));
    const NodeId begin = tree.level_begin(k - 1);
    for (NodeId v = begin; v < tree.level_end(k - 1); ++v) {
        // Left fold over children in declared order: summation order is part
        // of the contract so identities reproduce bit-for-bit.
        double acc = 0.0;
        for (int c = 0; c < tree.child_count(v); ++c) {
            const NodeId child = tree.child(v, c);
            acc += tree.transition_prob(child) * x[child];
        }
        out[static_cast<std::size_t>(v - begin)] = acc;
    }
    return out;
}

AdaptedProcess conditional_expectation(const AdaptedProcess& x, int j, int i) {
    const FiltrationTree& tree = x.tree();
    if (i > j || j > tree.depth() || i < 0)
        throw Error(Errc::DepthOrderViolation, "conditional expectation requires 0 <= i <= j <= N");
    if (!x.defined_at(j)) throw Error(Errc::ProcessNotDefinedAtDepth, "process undefined at source depth");

    AdaptedProcess field(x.tree_ptr(), i, i);
    if (i == j) {
        for (NodeId id = tree.level_begin(i); id < tree.level_end(i); ++id) field[id] = x[id];
        return field;
    }

    AdaptedProcess cur(x.tree_ptr(), i, j);
    for (NodeId id = tree.level_begin(j); id < tree.level_end(j); ++id) cur[id] = x[id];
    for (int k = j; k > i; --k) {
        const std::vector<double> folded = one_step_expectation(cur, k);
        const NodeId begin = tree.level_begin(k - 1);
        for (NodeId v = begin; v < tree.level_end(k - 1); ++v)
            cur[v] = folded[static_cast<std::size_t>(v - begin)];
    }
    for (NodeId id = tree.level_begin(i); id < tree.level_end(i); ++id) field[id] = cur[id];
    return field;
}

double expectation(const AdaptedProcess& x, int j) {
    return conditional_expectation(x, j, 0)[x.tree().root()];
}

} // namespace pktree
