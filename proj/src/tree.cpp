#include "pktree/tree.hpp"

#include <cmath>
#include <cstdio>
#include <queue>
#include <utility>

namespace pktree {

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::NonPositiveProbability: return "NonPositiveProbability";
        case Errc::ProbabilitySumMismatch: return "ProbabilitySumMismatch";
        case Errc::NonIncreasingTimes: return "NonIncreasingTimes";
        case Errc::DepthOrderViolation: return "DepthOrderViolation";
        case Errc::ProcessNotDefinedAtDepth: return "ProcessNotDefinedAtDepth";
        case Errc::EmptyRange: return "EmptyRange";
        case Errc::RangeStartsAtRoot: return "RangeStartsAtRoot";
        case Errc::NonPositiveKernel: return "NonPositiveKernel";
        case Errc::NotStrictSupermartingale: return "NotStrictSupermartingale";
        case Errc::ScheduleNotDecreasing: return "ScheduleNotDecreasing";
        case Errc::NotAMartingale: return "NotAMartingale";
        case Errc::NonPositiveMartingale: return "NonPositiveMartingale";
        case Errc::NotStrictlyIncreasing: return "NotStrictlyIncreasing";
        case Errc::ZeroKernelInsideHorizon: return "ZeroKernelInsideHorizon";
        case Errc::IndexOutOfRange: return "IndexOutOfRange";
        case Errc::DividendOutsideHorizon: return "DividendOutsideHorizon";
        case Errc::AxiomAViolation: return "AxiomAViolation";
        case Errc::NotPrevisible: return "NotPrevisible";
        case Errc::MartingaleConditionViolated: return "MartingaleConditionViolated";
        case Errc::TreeNotBinary: return "TreeNotBinary";
        case Errc::ExtinctionMassPresent: return "ExtinctionMassPresent";
        case Errc::SupportTooLarge: return "SupportTooLarge";
        case Errc::NonPositive: return "NonPositive";
        case Errc::ConfigParseError: return "ConfigParseError";
        case Errc::InvalidArgument: return "InvalidArgument";
    }
    return "UnknownError";
}

bool FiltrationTree::is_binary(double branch_prob, double tol) const {
    for (const TreeNode& n : nodes_) {
        if (n.depth == depth_) continue;
        if (n.child_count != 2) return false;
        if (std::abs(transition_prob(n.first_child) - branch_prob) > tol) return false;
    }
    return true;
}

TreeBuilder::TreeBuilder() {
    pending_.push_back(Pending{0, kNoNode, 1.0, {}});
}

NodeId TreeBuilder::add_child(NodeId parent, double prob) {
    if (parent < 0 || static_cast<std::size_t>(parent) >= pending_.size())
        throw Error(Errc::InvalidArgument, "add_child: unknown parent node");
    const NodeId id = static_cast<NodeId>(pending_.size());
    pending_.push_back(Pending{pending_[static_cast<std::size_t>(parent)].depth + 1, parent, prob, {}});
    pending_[static_cast<std::size_t>(parent)].children.push_back(id);
    return id;
}

TreeBuilder& TreeBuilder::set_times(std::vector<double> times) {
    times_ = std::move(times);
    return *this;
}

FiltrationTree TreeBuilder::build(double prob_tolerance) {
    // Breadth-first renumbering; children keep their insertion order.
    std::vector<NodeId> order;
    order.reserve(pending_.size());
    std::queue<NodeId> frontier;
    frontier.push(0);
    while (!frontier.empty()) {
        const NodeId old_id = frontier.front();
        frontier.pop();
        order.push_back(old_id);
        for (NodeId c : pending_[static_cast<std::size_t>(old_id)].children) frontier.push(c);
    }
    if (order.size() != pending_.size())
        throw Error(Errc::InvalidArgument, "tree has unreachable nodes");

    std::vector<NodeId> remap(pending_.size(), kNoNode);
    for (std::size_t k = 0; k < order.size(); ++k) remap[static_cast<std::size_t>(order[k])] = static_cast<NodeId>(k);

    FiltrationTree tree;
    tree.nodes_.resize(order.size());
    int max_depth = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const Pending& src = pending_[static_cast<std::size_t>(order[k])];
        TreeNode& dst = tree.nodes_[k];
        dst.id = static_cast<NodeId>(k);
        dst.depth = src.depth;
        dst.parent = src.parent == kNoNode ? kNoNode : remap[static_cast<std::size_t>(src.parent)];
        dst.prob_from_parent = src.prob;
        dst.child_count = static_cast<std::int32_t>(src.children.size());
        dst.first_child = src.children.empty() ? kNoNode : remap[static_cast<std::size_t>(src.children.front())];
        max_depth = std::max(max_depth, src.depth);
    }
    tree.depth_ = max_depth;

    if (tree.depth_ < 1) throw Error(Errc::InvalidArgument, "tree depth must be at least 1");

    // BFS order makes each level contiguous and each child range contiguous;
    // verify and record level offsets.
    tree.level_offsets_.assign(static_cast<std::size_t>(tree.depth_) + 2, 0);
    for (const TreeNode& n : tree.nodes_) tree.level_offsets_[static_cast<std::size_t>(n.depth) + 1]++;
    for (std::size_t d = 1; d < tree.level_offsets_.size(); ++d)
        tree.level_offsets_[d] += tree.level_offsets_[d - 1];
    for (const TreeNode& n : tree.nodes_) {
        if (n.depth < tree.depth_ && n.child_count == 0) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "node %d at depth %d is a leaf above the terminal depth",
                          n.id, n.depth);
            throw Error(Errc::InvalidArgument, buf);
        }
        for (int k = 1; k < n.child_count; ++k) {
            if (tree.nodes_[static_cast<std::size_t>(n.first_child + k)].parent != n.id)
                throw Error(Errc::InvalidArgument, "children of one parent must be added consecutively");
        }
    }

    // Probability validation: positivity plus per-node unit sums.
    for (const TreeNode& n : tree.nodes_) {
        if (n.child_count == 0) continue;
        double sum = 0.0;
        for (int k = 0; k < n.child_count; ++k) {
            const double p = tree.transition_prob(n.first_child + k);
            if (!(p > 0.0)) {
                char buf[96];
                std::snprintf(buf, sizeof buf, "probability %g on edge into node %d", p, n.first_child + k);
                throw Error(Errc::NonPositiveProbability, buf);
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > prob_tolerance) {
            char buf[112];
            std::snprintf(buf, sizeof buf, "children of node %d at depth %d sum to %.17g", n.id, n.depth, sum);
            throw Error(Errc::ProbabilitySumMismatch, buf);
        }
    }

    if (!times_.empty()) {
        if (times_.size() != static_cast<std::size_t>(tree.depth_) + 1)
            throw Error(Errc::InvalidArgument, "time labels must cover depths 0..N");
        for (std::size_t d = 1; d < times_.size(); ++d)
            if (!(times_[d] > times_[d - 1]))
                throw Error(Errc::NonIncreasingTimes, "time labels must be strictly increasing");
        tree.times_ = times_;
    }

    tree.reach_prob_.resize(tree.nodes_.size());
    tree.reach_prob_[0] = 1.0;
    for (std::size_t k = 1; k < tree.nodes_.size(); ++k) {
        const TreeNode& n = tree.nodes_[k];
        tree.reach_prob_[k] = tree.reach_prob_[static_cast<std::size_t>(n.parent)] * n.prob_from_parent;
    }
    return tree;
}

FiltrationTree build_tree(const std::vector<int>& child_counts,
                          const std::vector<std::vector<double>>& child_probs,
                          std::optional<std::vector<double>> times, double prob_tolerance) {
    if (child_counts.empty()) throw Error(Errc::InvalidArgument, "at least one level required");
    if (child_probs.size() != child_counts.size())
        throw Error(Errc::InvalidArgument, "child_probs must match child_counts level for level");

    TreeBuilder builder;
    std::vector<NodeId> level{builder.root()};
    for (std::size_t d = 0; d < child_counts.size(); ++d) {
        const int count = child_counts[d];
        if (count < 1) throw Error(Errc::InvalidArgument, "child counts must be >= 1");
        if (child_probs[d].size() != static_cast<std::size_t>(count))
            throw Error(Errc::InvalidArgument, "probability list length must equal the child count");
        std::vector<NodeId> next;
        next.reserve(level.size() * static_cast<std::size_t>(count));
        for (NodeId parent : level)
            for (int k = 0; k < count; ++k) next.push_back(builder.add_child(parent, child_probs[d][static_cast<std::size_t>(k)]));
        level = std::move(next);
    }
    if (times) builder.set_times(std::move(*times));
    return builder.build(prob_tolerance);
}

FiltrationTree make_chain(int depth, std::optional<std::vector<double>> times) {
    return build_tree(std::vector<int>(static_cast<std::size_t>(depth), 1),
                      std::vector<std::vector<double>>(static_cast<std::size_t>(depth), {1.0}),
                      std::move(times));
}

FiltrationTree make_binomial(int depth, double p, std::optional<std::vector<double>> times) {
    return build_tree(std::vector<int>(static_cast<std::size_t>(depth), 2),
                      std::vector<std::vector<double>>(static_cast<std::size_t>(depth),
                                                       std::vector<double>{p, 1.0 - p}),
                      std::move(times));
}

} // namespace pktree
