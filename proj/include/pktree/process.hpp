#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "pktree/tree.hpp"

namespace pktree {

using TreePtr = std::shared_ptr<const FiltrationTree>;

/// An adapted process: one value per tree node over a contiguous depth range
/// [lo, hi]. Values are plain doubles; the object is treated as immutable
/// once filled by its constructing code.
class AdaptedProcess {
public:
    AdaptedProcess(TreePtr tree, int lo, int hi);

    static AdaptedProcess constant(TreePtr tree, int lo, int hi, double value);
    /// Builds from per-depth value vectors: per_depth[k] holds the values for
    /// depth lo + k in node-id order.
    static AdaptedProcess from_depth_values(TreePtr tree, int lo,
                                            const std::vector<std::vector<double>>& per_depth);
    /// Evaluates fn(node) over every node in [lo, hi].
    static AdaptedProcess from_function(TreePtr tree, int lo, int hi,
                                        const std::function<double(const TreeNode&)>& fn);

    int lo() const { return lo_; }
    int hi() const { return hi_; }
    bool defined_at(int depth) const { return depth >= lo_ && depth <= hi_; }

    const FiltrationTree& tree() const { return *tree_; }
    const TreePtr& tree_ptr() const { return tree_; }

    double operator[](NodeId id) const { return values_[static_cast<std::size_t>(id)]; }
    double& operator[](NodeId id) { return values_[static_cast<std::size_t>(id)]; }
    /// Range-checked access; throws ProcessNotDefinedAtDepth outside [lo, hi].
    double at(NodeId id) const;

    /// Throws unless every value in range is finite.
    void require_finite() const;

    /// Values at one depth in node-id order.
    std::vector<double> depth_values(int depth) const;

private:
    TreePtr tree_;
    int lo_;
    int hi_;
    std::vector<double> values_; // indexed by node id; meaningful inside [lo_, hi_]
};

/// E_i[X_j]: probability-weighted average of the depth-j values over each
/// depth-i node's descendants, returned as a depth-i field. Children are
/// folded in declared order (left fold), one depth at a time, so repeated
/// application is bit-identical to a single call (tower property).
AdaptedProcess conditional_expectation(const AdaptedProcess& x, int j, int i);

/// One-step version: field over depth (k-1) of E_{k-1}[X_k].
std::vector<double> one_step_expectation(const AdaptedProcess& x, int k);

/// E[X_j] under the unconditional measure (value of E_0[X_j] at the root).
double expectation(const AdaptedProcess& x, int j);

} // namespace pktree
