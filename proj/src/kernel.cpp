#include "pktree/kernel.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>

#include "pktree/bonds.hpp"

namespace pktree {

namespace {

std::string describe(const NodeRef& where) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "node %d at depth %d", where.id, where.depth);
    return buf;
}

void assert_internal(bool ok, const char* what) {
    if (!ok) throw std::logic_error(std::string("internal invariant failed: ") + what);
}

} // namespace

PricingKernel kernel_from_process(AdaptedProcess pi, KernelOptions options) {
    if (pi.lo() != 0) throw Error(Errc::InvalidArgument, "a kernel starts at depth 0");
    if (pi.hi() < 1) throw Error(Errc::InvalidArgument, "a kernel needs horizon >= 1");
    pi.require_finite();

    const FiltrationTree& tree = pi.tree();
    for (NodeId id = tree.level_begin(0); id < tree.level_end(pi.hi()); ++id) {
        if (!(pi[id] > 0.0))
            throw Error(Errc::NonPositiveKernel,
                        "value " + std::to_string(pi[id]) + " at " +
                            describe(NodeRef{tree.depth_of(id), id}));
    }

    const CheckReport super = is_strict_supermartingale(pi, options.strictness);
    if (!super.pass)
        throw Error(Errc::NotStrictSupermartingale,
                    "margin " + std::to_string(-super.max_violation) + " at " + describe(super.witness));

    // Monotone decay of the mean, asserted directly.
    double prev = expectation(pi, 0);
    for (int i = 1; i <= pi.hi(); ++i) {
        const double cur = expectation(pi, i);
        if (!(prev - cur > options.strictness))
            throw Error(Errc::NotStrictSupermartingale,
                        "mean E[pi_" + std::to_string(i) + "] does not decay strictly");
        prev = cur;
    }

    return PricingKernel(std::move(pi), options);
}

PricingKernel kernel_rational(const TreePtr& tree, const Schedule& alpha, const Schedule& beta,
                              const AdaptedProcess& martingale, KernelOptions options) {
    const int n = tree->depth();
    if (alpha.last_depth() < n || beta.last_depth() < n)
        throw Error(Errc::InvalidArgument, "schedules must cover depths 0..N");
    if (martingale.lo() != 0 || martingale.hi() < n)
        throw Error(Errc::InvalidArgument, "martingale must cover depths 0..N");
    if (martingale.tree_ptr().get() != tree.get())
        throw Error(Errc::InvalidArgument, "martingale lives on a different tree");

    for (NodeId id = tree->level_begin(0); id < tree->level_end(n); ++id)
        if (!(martingale[id] > 0.0))
            throw Error(Errc::NonPositiveMartingale,
                        "martingale value " + std::to_string(martingale[id]) + " at node " +
                            std::to_string(id));
    const CheckReport mart = is_martingale(martingale, options.tolerance);
    if (!mart.pass)
        throw Error(Errc::NotAMartingale,
                    "violation " + std::to_string(mart.max_violation) + " at " + describe(mart.witness));

    AdaptedProcess pi = AdaptedProcess::from_function(tree, 0, n, [&](const TreeNode& node) {
        return alpha[node.depth] + beta[node.depth] * martingale[node.id];
    });
    return kernel_from_process(std::move(pi), options);
}

AdaptedProcess short_rate(const PricingKernel& kernel) {
    const FiltrationTree& tree = kernel.tree();
    const int h = kernel.horizon();
    AdaptedProcess rate(kernel.tree_ptr(), 1, h);
    for (int i = 1; i <= h; ++i) {
        const std::vector<double> e = one_step_expectation(kernel.values(), i);
        const NodeId begin = tree.level_begin(i - 1);
        for (NodeId v = begin; v < tree.level_end(i - 1); ++v) {
            const double r = kernel[v] / e[static_cast<std::size_t>(v - begin)] - 1.0;
            for (int c = 0; c < tree.child_count(v); ++c) rate[tree.child(v, c)] = r;
        }
    }
    return rate;
}

MultiplicativeDecomposition multiplicative_decomposition(const PricingKernel& kernel) {
    const FiltrationTree& tree = kernel.tree();
    const int h = kernel.horizon();

    AdaptedProcess account(kernel.tree_ptr(), 0, h);
    AdaptedProcess rate(kernel.tree_ptr(), 1, h);
    account[tree.root()] = 1.0;
    for (int i = 1; i <= h; ++i) {
        const std::vector<double> e = one_step_expectation(kernel.values(), i);
        const NodeId begin = tree.level_begin(i - 1);
        for (NodeId v = begin; v < tree.level_end(i - 1); ++v) {
            // 1 + r_i = pi_{i-1} / E_{i-1}[pi_i], known one period ahead.
            const double factor = kernel[v] / e[static_cast<std::size_t>(v - begin)];
            const double b = account[v] * factor;
            for (int c = 0; c < tree.child_count(v); ++c) {
                account[tree.child(v, c)] = b;
                rate[tree.child(v, c)] = factor - 1.0;
            }
        }
    }

    AdaptedProcess rho(kernel.tree_ptr(), 0, h);
    for (NodeId id = tree.level_begin(0); id < tree.level_end(h); ++id)
        rho[id] = kernel[id] * account[id];

    // The deflated account must come out a martingale and the account
    // previsible and strictly increasing; anything else is a bug.
    assert_internal(is_martingale(rho, kernel.options().tolerance, "rho-martingale").pass,
                    "pi * B is not a martingale");
    assert_internal(is_previsible(rate).pass, "money-market rate is not previsible");
    for (NodeId id = tree.level_begin(1); id < tree.level_end(h); ++id)
        assert_internal(account[id] > account[tree.parent(id)], "money-market account must increase");

    return MultiplicativeDecomposition{MoneyMarketAccount{std::move(account), std::move(rate)},
                                       std::move(rho)};
}

DoobDecomposition doob_decomposition(const PricingKernel& kernel) {
    const FiltrationTree& tree = kernel.tree();
    const int h = kernel.horizon();

    AdaptedProcess compensator(kernel.tree_ptr(), 0, h);
    compensator[tree.root()] = 0.0;
    for (int i = 1; i <= h; ++i) {
        const std::vector<double> e = one_step_expectation(kernel.values(), i);
        const NodeId begin = tree.level_begin(i - 1);
        for (NodeId v = begin; v < tree.level_end(i - 1); ++v) {
            const double increment = kernel[v] - e[static_cast<std::size_t>(v - begin)];
            for (int c = 0; c < tree.child_count(v); ++c)
                compensator[tree.child(v, c)] = compensator[v] + increment;
        }
    }

    // Terminal residual E_i[pi_H], all depths, one backward sweep.
    AdaptedProcess residual(kernel.tree_ptr(), 0, h);
    for (NodeId id = tree.level_begin(h); id < tree.level_end(h); ++id) residual[id] = kernel[id];
    for (int k = h; k > 0; --k) {
        const std::vector<double> e = one_step_expectation(residual, k);
        const NodeId begin = tree.level_begin(k - 1);
        for (NodeId v = begin; v < tree.level_end(k - 1); ++v)
            residual[v] = e[static_cast<std::size_t>(v - begin)];
    }

    // Finite-horizon identity pi_i = E_i[A_H] - A_i + E_i[pi_H], node-wise.
    AdaptedProcess ea(kernel.tree_ptr(), 0, h);
    for (NodeId id = tree.level_begin(h); id < tree.level_end(h); ++id) ea[id] = compensator[id];
    for (int k = h; k > 0; --k) {
        const std::vector<double> e = one_step_expectation(ea, k);
        const NodeId begin = tree.level_begin(k - 1);
        for (NodeId v = begin; v < tree.level_end(k - 1); ++v)
            ea[v] = e[static_cast<std::size_t>(v - begin)];
    }
    for (NodeId id = tree.level_begin(0); id < tree.level_end(h); ++id) {
        const double lhs = kernel[id];
        const double rhs = ea[id] - compensator[id] + residual[id];
        assert_internal(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)),
                        "Doob decomposition identity");
    }

    return DoobDecomposition{std::move(compensator), std::move(residual)};
}

IncreasingDriverResult kernel_from_increasing(const AdaptedProcess& g, KernelOptions options) {
    const FiltrationTree& tree = g.tree();
    const int n = tree.depth();
    if (g.lo() != 0 || g.hi() != n)
        throw Error(Errc::InvalidArgument, "driver must be defined on depths 0..N");
    if (n < 2) throw Error(Errc::InvalidArgument, "driver tree must have depth >= 2");
    if (g[tree.root()] != 0.0) throw Error(Errc::InvalidArgument, "driver must start at 0");

    for (NodeId id = tree.level_begin(1); id < tree.level_end(n); ++id) {
        if (!(g[id] > g[tree.parent(id)])) {
            const int depth = tree.depth_of(id);
            const std::string msg =
                "flat or decreasing step into " + describe(NodeRef{depth, id});
            // A flat final step would zero the kernel inside its horizon.
            throw Error(depth == n ? Errc::ZeroKernelInsideHorizon : Errc::NotStrictlyIncreasing, msg);
        }
    }

    // pi_i = E_i[G_N] - G_i, valid through N-1 (pi_N would be 0).
    const int h = n - 1;
    AdaptedProcess eg(g.tree_ptr(), 0, n);
    for (NodeId id = tree.level_begin(n); id < tree.level_end(n); ++id) eg[id] = g[id];
    for (int k = n; k > 0; --k) {
        const std::vector<double> e = one_step_expectation(eg, k);
        const NodeId begin = tree.level_begin(k - 1);
        for (NodeId v = begin; v < tree.level_end(k - 1); ++v)
            eg[v] = e[static_cast<std::size_t>(v - begin)];
    }
    AdaptedProcess pi(g.tree_ptr(), 0, h);
    for (NodeId id = tree.level_begin(0); id < tree.level_end(h); ++id) pi[id] = eg[id] - g[id];

    PricingKernel kernel = kernel_from_process(std::move(pi), options);

    AdaptedProcess rate(g.tree_ptr(), 1, h);
    AdaptedProcess account(g.tree_ptr(), 0, h);
    account[tree.root()] = 1.0;
    for (NodeId id = tree.level_begin(1); id < tree.level_end(h); ++id) {
        const NodeId parent = tree.parent(id);
        const double rbar = (g[id] - g[parent]) / kernel[id];
        rate[id] = rbar;
        account[id] = account[parent] * (1.0 + rbar);
    }

    AdaptedProcess deflated(g.tree_ptr(), 0, h);
    for (NodeId id = tree.level_begin(0); id < tree.level_end(h); ++id)
        deflated[id] = kernel[id] * account[id];
    assert_internal(is_martingale(deflated, options.tolerance, "rho-bar-martingale").pass,
                    "pi * B-bar from the increasing driver is not a martingale");

    return IncreasingDriverResult{std::move(kernel),
                                  PositiveReturnAsset{std::move(account), std::move(rate),
                                                      std::move(deflated)}};
}

PositiveReturnAsset positive_return_from_doob(const PricingKernel& kernel,
                                              const BondSurface& bonds) {
    const FiltrationTree& tree = kernel.tree();
    const int h = kernel.horizon();
    if (bonds.horizon() != h) throw Error(Errc::InvalidArgument, "bond surface horizon mismatch");

    const AdaptedProcess r = short_rate(kernel);

    AdaptedProcess rate(kernel.tree_ptr(), 1, h);
    AdaptedProcess account(kernel.tree_ptr(), 0, h);
    account[tree.root()] = 1.0;
    for (int i = 1; i <= h; ++i) {
        for (NodeId v = tree.level_begin(i - 1); v < tree.level_end(i - 1); ++v) {
            const double pb = kernel[v] * bonds.price(i - 1, i, v);
            for (int c = 0; c < tree.child_count(v); ++c) {
                const NodeId child = tree.child(v, c);
                const double rbar = r[child] * pb / kernel[child];
                rate[child] = rbar;
                account[child] = account[v] * (1.0 + rbar);
            }
        }
    }

    AdaptedProcess deflated(kernel.tree_ptr(), 0, h);
    for (NodeId id = tree.level_begin(0); id < tree.level_end(h); ++id)
        deflated[id] = kernel[id] * account[id];
    assert_internal(is_martingale(deflated, kernel.options().tolerance, "rho-bar-martingale").pass,
                    "Doob-based pi * B-bar is not a martingale");

    return PositiveReturnAsset{std::move(account), std::move(rate), std::move(deflated)};
}

} // namespace pktree
