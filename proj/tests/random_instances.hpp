#pragma once

// Seeded random model instances shared by the property and acceptance suites.

#include <memory>
#include <random>

#include "pktree/kernel.hpp"
#include "pktree/models.hpp"

namespace pktree::testing {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double a, double b) {
        return std::uniform_real_distribution<double>(a, b)(engine_);
    }
    int uniform_int(int a, int b) { return std::uniform_int_distribution<int>(a, b)(engine_); }

private:
    std::mt19937_64 engine_;
};

// Tree with 1..max_branch children per node and probabilities bounded away
// from zero.
inline TreePtr random_tree(Rng& rng, int min_depth = 2, int max_depth = 6, int max_branch = 3) {
    const int depth = rng.uniform_int(min_depth, max_depth);
    TreeBuilder builder;
    std::vector<NodeId> level{builder.root()};
    for (int d = 0; d < depth; ++d) {
        std::vector<NodeId> next;
        for (NodeId parent : level) {
            const int count = rng.uniform_int(1, max_branch);
            std::vector<double> weights;
            double sum = 0.0;
            for (int c = 0; c < count; ++c) {
                weights.push_back(rng.uniform(0.2, 1.0));
                sum += weights.back();
            }
            for (int c = 0; c < count; ++c) next.push_back(builder.add_child(parent, weights[static_cast<std::size_t>(c)] / sum));
        }
        level = std::move(next);
    }
    return std::make_shared<const FiltrationTree>(builder.build());
}

struct RationalInstance {
    TreePtr tree;
    Schedule alpha;
    Schedule beta;
    AdaptedProcess martingale;
    PricingKernel kernel;
};

inline RationalInstance random_rational(Rng& rng) {
    const int depth = rng.uniform_int(2, 6);
    const double p = rng.uniform(0.2, 0.8);
    TreePtr tree = std::make_shared<const FiltrationTree>(make_binomial(depth, p));

    Schedule alpha = Schedule::geometric(rng.uniform(0.5, 2.0), rng.uniform(0.3, 0.9), depth);
    Schedule beta = Schedule::geometric(rng.uniform(0.5, 2.0), rng.uniform(0.3, 0.9), depth);

    // up/down chosen so that p*up + (1-p)*down = 1 up to rounding.
    const double spread = rng.uniform(0.1, 0.9);
    const double up = 1.0 + spread * (1.0 - p);
    const double down = 1.0 - spread * p;
    AdaptedProcess martingale = binomial_martingale(tree, up, down, p, rng.uniform(0.5, 2.0));

    PricingKernel kernel = kernel_rational(tree, alpha, beta, martingale);
    return RationalInstance{std::move(tree), std::move(alpha), std::move(beta),
                            std::move(martingale), std::move(kernel)};
}

struct IncreasingInstance {
    TreePtr tree;
    AdaptedProcess driver;
    IncreasingDriverResult built;
};

inline IncreasingInstance random_increasing(Rng& rng) {
    TreePtr tree = random_tree(rng, 3, 6, 3);
    AdaptedProcess driver(tree, 0, tree->depth());
    driver[tree->root()] = 0.0;
    for (NodeId id = tree->level_begin(1); id < tree->level_end(tree->depth()); ++id)
        driver[id] = driver[tree->parent(id)] + rng.uniform(0.05, 1.5);
    IncreasingDriverResult built = kernel_from_increasing(driver);
    return IncreasingInstance{std::move(tree), std::move(driver), std::move(built)};
}

} // namespace pktree::testing
