#include "pktree/models.hpp"

#include <cmath>
#include <memory>
#include <utility>

namespace pktree {

Schedule::Schedule(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) throw Error(Errc::InvalidArgument, "schedule needs depths 0..N, N >= 1");
    for (double v : values_)
        if (!(v > 0.0) || !std::isfinite(v))
            throw Error(Errc::NonPositive, "schedule values must be positive");
    for (std::size_t i = 1; i < values_.size(); ++i)
        if (!(values_[i] < values_[i - 1]))
            throw Error(Errc::ScheduleNotDecreasing,
                        "schedule must decrease strictly at index " + std::to_string(i));
}

Schedule Schedule::geometric(double initial, double ratio, int last_depth) {
    if (!(ratio > 0.0 && ratio < 1.0))
        throw Error(Errc::InvalidArgument, "geometric ratio must lie in (0, 1)");
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(last_depth) + 1);
    double v = initial;
    for (int i = 0; i <= last_depth; ++i, v *= ratio) values.push_back(v);
    return Schedule(std::move(values));
}

Schedule Schedule::from_values(std::vector<double> values) { return Schedule(std::move(values)); }

AdaptedProcess binomial_martingale(TreePtr tree, double up, double down, double p,
                                   double initial) {
    if (!(up > 0.0 && down > 0.0 && initial > 0.0))
        throw Error(Errc::NonPositive, "factors and initial value must be positive");
    if (!(p > 0.0 && p < 1.0)) throw Error(Errc::InvalidArgument, "p must lie in (0, 1)");
    const double mean = p * up + (1.0 - p) * down;
    if (std::abs(mean - 1.0) > 1e-12)
        throw Error(Errc::MartingaleConditionViolated,
                    "p*up + (1-p)*down = " + std::to_string(mean) + " != 1");
    if (!tree->is_binary(p))
        throw Error(Errc::TreeNotBinary, "need two children per node with branch probability p");

    AdaptedProcess n(tree, 0, tree->depth());
    n[tree->root()] = initial;
    for (NodeId id = tree->level_begin(1); id < tree->level_end(tree->depth()); ++id) {
        const NodeId parent = tree->parent(id);
        const bool is_up = id == tree->node(parent).first_child;
        n[id] = n[parent] * (is_up ? up : down);
    }
    return n;
}

BranchingModel branching_martingale(const OffspringDistribution& offspring,
                                    int initial_population, int depth, std::size_t max_nodes) {
    if (initial_population < 1)
        throw Error(Errc::InvalidArgument, "initial population must be >= 1");
    if (depth < 1) throw Error(Errc::InvalidArgument, "depth must be >= 1");
    if (offspring.pmf.empty()) throw Error(Errc::InvalidArgument, "offspring law is empty");

    double mass = 0.0, mean = 0.0;
    for (const auto& [k, q] : offspring.pmf) {
        if (k == 0 && q > 0.0)
            throw Error(Errc::ExtinctionMassPresent,
                        "offspring law must place no mass on zero offspring");
        if (k < 0) throw Error(Errc::InvalidArgument, "offspring counts must be non-negative");
        if (!(q > 0.0)) throw Error(Errc::NonPositiveProbability, "offspring probabilities must be positive");
        mass += q;
        mean += q * k;
    }
    if (std::abs(mass - 1.0) > 1e-12)
        throw Error(Errc::ProbabilitySumMismatch,
                    "offspring probabilities sum to " + std::to_string(mass));

    // pmf of the next population given the current one: z-fold convolution
    // over a dense vector starting at offset z * k_min.
    const int k_min = offspring.pmf.begin()->first;
    const int k_max = offspring.pmf.rbegin()->first;

    TreeBuilder builder;
    std::vector<std::pair<NodeId, int>> level{{builder.root(), initial_population}};
    std::vector<std::pair<NodeId, int>> next;
    std::size_t total_nodes = 1;
    std::vector<std::vector<int>> populations_by_depth{{initial_population}};

    for (int d = 0; d < depth; ++d) {
        next.clear();
        populations_by_depth.emplace_back();
        for (const auto& [node, z] : level) {
            std::vector<double> conv{1.0}; // distribution of a 0-individual sum
            int offset = 0;                // conv[s] is P[sum = offset + s]
            for (int m = 0; m < z; ++m) {
                std::vector<double> out(conv.size() + static_cast<std::size_t>(k_max - k_min), 0.0);
                for (std::size_t s = 0; s < conv.size(); ++s) {
                    if (conv[s] == 0.0) continue;
                    for (const auto& [k, q] : offspring.pmf)
                        out[s + static_cast<std::size_t>(k - k_min)] += conv[s] * q;
                }
                conv = std::move(out);
                offset += k_min;
            }
            for (std::size_t s = 0; s < conv.size(); ++s) { // ascending population order
                if (conv[s] <= 0.0) continue;
                const int z_next = offset + static_cast<int>(s);
                if (++total_nodes > max_nodes)
                    throw Error(Errc::SupportTooLarge,
                                "population tree exceeds " + std::to_string(max_nodes) + " nodes");
                next.emplace_back(builder.add_child(node, conv[s]), z_next);
                populations_by_depth.back().push_back(z_next);
            }
        }
        level.swap(next);
    }

    auto tree = std::make_shared<const FiltrationTree>(builder.build());

    AdaptedProcess population(tree, 0, depth);
    {
        NodeId id = 0;
        for (const auto& lvl : populations_by_depth)
            for (int z : lvl) population[id++] = z;
    }
    AdaptedProcess martingale(tree, 0, depth);
    double mu_pow = 1.0;
    for (int d = 0; d <= depth; ++d, mu_pow *= mean)
        for (NodeId id = tree->level_begin(d); id < tree->level_end(d); ++id)
            martingale[id] = population[id] / mu_pow;

    return BranchingModel{std::move(tree), std::move(population), std::move(martingale), mean};
}

} // namespace pktree
