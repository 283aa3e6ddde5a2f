#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pktree/errors.hpp"

namespace pktree {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

struct TreeNode {
    NodeId id = kNoNode;
    int depth = 0;
    NodeId parent = kNoNode;
    double prob_from_parent = 1.0; // 1 for the root
    NodeId first_child = kNoNode;  // children occupy [first_child, first_child + child_count)
    std::int32_t child_count = 0;
};

/// A finite filtered probability space realised as a non-recombining event
/// tree. Nodes are numbered breadth-first: ids within a depth are contiguous
/// and deterministic given construction order. Immutable once built.
class FiltrationTree {
public:
    int depth() const { return depth_; }
    std::size_t node_count() const { return nodes_.size(); }

    const TreeNode& node(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }
    std::span<const TreeNode> nodes() const { return nodes_; }

    int depth_of(NodeId id) const { return node(id).depth; }
    NodeId parent(NodeId id) const { return node(id).parent; }
    int child_count(NodeId id) const { return node(id).child_count; }
    NodeId child(NodeId id, int k) const { return node(id).first_child + k; }
    double transition_prob(NodeId child_id) const { return node(child_id).prob_from_parent; }

    NodeId root() const { return 0; }
    NodeId level_begin(int depth) const { return level_offsets_[static_cast<std::size_t>(depth)]; }
    NodeId level_end(int depth) const { return level_offsets_[static_cast<std::size_t>(depth) + 1]; }
    std::size_t level_size(int depth) const {
        return static_cast<std::size_t>(level_end(depth) - level_begin(depth));
    }

    /// Unconditional probability of reaching a node (product of one-step
    /// transition probabilities along its path, left to right).
    double node_probability(NodeId id) const { return reach_prob_[static_cast<std::size_t>(id)]; }

    bool has_times() const { return !times_.empty(); }
    /// Time label of a depth; defaults to the depth index when no labels were given.
    double time(int depth) const {
        return has_times() ? times_[static_cast<std::size_t>(depth)] : static_cast<double>(depth);
    }

    bool is_binary(double branch_prob, double tol = 1e-12) const;

private:
    friend class TreeBuilder;
    FiltrationTree() = default;

    int depth_ = 0;
    std::vector<TreeNode> nodes_;
    std::vector<NodeId> level_offsets_; // size depth_ + 2
    std::vector<double> reach_prob_;
    std::vector<double> times_; // empty or size depth_ + 1
};

/// Incremental tree construction. Children keep their insertion order; build()
/// renumbers nodes breadth-first and validates all tree invariants.
class TreeBuilder {
public:
    TreeBuilder();

    NodeId root() const { return 0; }
    /// Adds a child under `parent` with the given one-step transition
    /// probability. Returns a provisional id, remapped at build() time; when
    /// nodes are added depth by depth the provisional ids are already final.
    NodeId add_child(NodeId parent, double prob);

    TreeBuilder& set_times(std::vector<double> times);

    FiltrationTree build(double prob_tolerance = 1e-12);

private:
    struct Pending {
        int depth;
        NodeId parent;
        double prob;
        std::vector<NodeId> children;
    };
    std::vector<Pending> pending_;
    std::vector<double> times_;
};

/// Uniform construction: every node at depth i has child_counts[i] children
/// with probabilities child_probs[i] (shared across the depth).
FiltrationTree build_tree(const std::vector<int>& child_counts,
                          const std::vector<std::vector<double>>& child_probs,
                          std::optional<std::vector<double>> times = std::nullopt,
                          double prob_tolerance = 1e-12);

/// Deterministic single-branch chain of the given depth.
FiltrationTree make_chain(int depth, std::optional<std::vector<double>> times = std::nullopt);

/// Binomial tree: two children per node with probabilities (p, 1 - p).
FiltrationTree make_binomial(int depth, double p,
                             std::optional<std::vector<double>> times = std::nullopt);

} // namespace pktree
