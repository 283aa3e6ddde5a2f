#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "pktree/process.hpp"

namespace pktree {

/// Positive, strictly decreasing deterministic schedule over depths 0..N.
class Schedule {
public:
    static Schedule geometric(double initial, double ratio, int last_depth);
    static Schedule from_values(std::vector<double> values);

    double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }
    int last_depth() const { return static_cast<int>(values_.size()) - 1; }
    const std::vector<double>& values() const { return values_; }

private:
    explicit Schedule(std::vector<double> values);
    std::vector<double> values_;
};

/// Multiplicative binomial martingale on a binary tree: the value multiplies
/// by `up` on the first child and `down` on the second. Requires
/// p*up + (1-p)*down = 1 and a tree whose branch probability is p everywhere.
AdaptedProcess binomial_martingale(TreePtr tree, double up, double down, double p,
                                   double initial);

/// Offspring law of a branching process: probability of k offspring per
/// individual, finite support, no mass at zero (extinction would break the
/// positivity of the associated martingale).
struct OffspringDistribution {
    std::map<int, double> pmf;
};

struct BranchingModel {
    TreePtr tree;               // exact population tree
    AdaptedProcess population;  // integer-valued Z_i stored as doubles
    AdaptedProcess martingale;  // N_i = Z_i / mu^i
    double mean_offspring = 0.0;
};

/// Builds the exact Galton-Watson population tree to the given depth: each
/// node carries a population, children enumerate every attainable next
/// population (ascending) with its exact convolution probability. Returns the
/// tree together with the associated martingale N_i = Z_i / mu^i.
BranchingModel branching_martingale(const OffspringDistribution& offspring,
                                    int initial_population, int depth,
                                    std::size_t max_nodes = 100000);

} // namespace pktree
