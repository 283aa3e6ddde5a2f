#include <doctest.h>

#include <cmath>
#include <sstream>

#include "pktree/assets.hpp"
#include "pktree/bonds.hpp"

#include "oracle.hpp"
#include "r1.hpp"
#include "random_instances.hpp"

using namespace pktree;
using namespace pktree::testing;

namespace {

TreePtr share(FiltrationTree tree) {
    return std::make_shared<const FiltrationTree>(std::move(tree));
}

bool throws_code(Errc expected, const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code() == expected;
    }
    return false;
}

void check_close(double got, double want, double tol = 1e-14) {
    CHECK(std::abs(got - want) <= tol * std::max(1.0, std::abs(want)));
}

PricingKernel halving_kernel(int depth) {
    TreePtr chain = share(make_chain(depth));
    return kernel_from_process(AdaptedProcess::from_function(
        chain, 0, depth, [](const TreeNode& n) { return std::pow(2.0, -n.depth); }));
}

} // namespace

TEST_CASE("unit dividends on the halving chain") {
    const PricingKernel kernel = halving_kernel(2);
    const AdaptedProcess d = AdaptedProcess::constant(kernel.tree_ptr(), 1, 2, 1.0);

    const AdaptedProcess s = price_fundamental(kernel, d);
    check_close(s[0], 0.75);
    check_close(s[2], 0.0); // ex-dividend at the horizon

    const AdaptedProcess via_potentials = potential_ratio_price(kernel, d);
    check_close(via_potentials[0], 0.75);
    check_close(via_potentials[1], s[1]);
}

TEST_CASE("floating-rate note prices at par on the worked example") {
    const R1 r1 = make_r1();
    const AdaptedProcess r = short_rate(r1.kernel);
    const AdaptedProcess s = price_fundamental(r1.kernel, r, 1.0);
    check_close(s[0], 1.0, 1e-13);
    check_close(s[1], 1.0, 1e-13);
    check_close(s[2], 1.0, 1e-13);
    check_close(potential_ratio_price(r1.kernel, r, 1.0)[0], 1.0, 1e-13);
}

TEST_CASE("zero dividends price to zero") {
    const R1 r1 = make_r1();
    const AdaptedProcess zero = AdaptedProcess::constant(r1.tree, 1, 2, 0.0);
    const AdaptedProcess s = price_fundamental(r1.kernel, zero);
    for (NodeId id = 0; id <= 6; ++id) CHECK(s[id] == 0.0);
}

TEST_CASE("terminal-only dividends match the single-term formula") {
    const R1 r1 = make_r1();
    AdaptedProcess d(r1.tree, 2, 2);
    d[3] = 2.0;
    d[4] = 0.5;
    d[5] = 1.5;
    d[6] = 3.0;
    const AdaptedProcess s = price_fundamental(r1.kernel, d);
    for (NodeId id = 0; id <= 2; ++id) {
        const double brute = oracle_price_fundamental(r1.kernel, d, 0.0, id);
        check_close(s[id], brute, 1e-13);
    }
    // S_i = E_i[pi_H D_H] / pi_i directly at the root
    AdaptedProcess deflated(r1.tree, 2, 2);
    for (NodeId id = 3; id <= 6; ++id) deflated[id] = r1.kernel[id] * d[id];
    check_close(s[0], expectation(deflated, 2) / r1.kernel[0], 1e-13);
}

TEST_CASE("dividends outside the kernel horizon are rejected") {
    const PricingKernel kernel = halving_kernel(2);
    TreePtr longer = share(make_chain(3));
    CHECK(throws_code(Errc::DividendOutsideHorizon, [&] {
        price_fundamental(kernel, AdaptedProcess::constant(kernel.tree_ptr(), 0, 1, 1.0));
    }));
    CHECK(throws_code(Errc::InvalidArgument, [&] {
        price_fundamental(kernel, AdaptedProcess::constant(longer, 1, 2, 1.0));
    }));
}

TEST_CASE("pricing routes agree on random instances") {
    Rng rng(4401);
    for (int trial = 0; trial < 30; ++trial) {
        const RationalInstance instance = random_rational(rng);
        const PricingKernel& kernel = instance.kernel;
        const FiltrationTree& tree = kernel.tree();
        AdaptedProcess d(kernel.tree_ptr(), 1, kernel.horizon());
        for (NodeId id = tree.level_begin(1); id < tree.level_end(kernel.horizon()); ++id)
            d[id] = rng.uniform(0.0, 2.0);
        const double redemption = rng.uniform(0.0, 2.0);

        const AdaptedProcess a = price_fundamental(kernel, d, redemption);
        const AdaptedProcess b = potential_ratio_price(kernel, d, redemption);
        for (NodeId id = tree.level_begin(0); id < tree.level_end(kernel.horizon()); ++id)
            CHECK(std::abs(a[id] - b[id]) <= 1e-12 * std::max(1.0, std::abs(a[id])));

        // Deflated gains of the priced asset form a martingale.
        AdaptedProcess gains(kernel.tree_ptr(), 0, kernel.horizon());
        AdaptedProcess running(kernel.tree_ptr(), 0, kernel.horizon());
        running[tree.root()] = 0.0;
        for (NodeId id = tree.level_begin(1); id < tree.level_end(kernel.horizon()); ++id) {
            double flow = d[id];
            if (tree.depth_of(id) == kernel.horizon()) flow += redemption;
            running[id] = running[tree.parent(id)] + kernel[id] * flow;
        }
        for (NodeId id = tree.level_begin(0); id < tree.level_end(kernel.horizon()); ++id)
            gains[id] = kernel[id] * a[id] + running[id];
        CHECK(is_martingale(gains, 1e-10).pass);

        // Spot-check against path enumeration at the root.
        check_close(a[0], oracle_price_fundamental(kernel, d, redemption, 0), 1e-12);
    }
}

TEST_CASE("decomposition of a fundamental asset has no retained earnings") {
    const R1 r1 = make_r1();
    const AdaptedProcess r = short_rate(r1.kernel);
    // Dividends without redemption so S_H = 0 exactly.
    const AdaptedProcess s = price_fundamental(r1.kernel, r);
    const ValueDecomposition decomp = decompose_value(r1.kernel, s, r);
    for (NodeId id = 0; id <= 6; ++id) {
        CHECK(std::abs(decomp.bubble[id]) <= 1e-12);
        check_close(decomp.fundamental[id], s[id], 1e-13);
    }
    CHECK(decomp.terminal_value == 0.0);
}

TEST_CASE("money-market account is a pure bubble") {
    const R1 r1 = make_r1();
    const MultiplicativeDecomposition mult = multiplicative_decomposition(r1.kernel);
    const ValueDecomposition decomp = decompose_value(r1.kernel, mult.money_market.account);
    for (NodeId id = 0; id <= 6; ++id) {
        check_close(decomp.bubble[id], mult.rho[id], 1e-13);
        CHECK(decomp.fundamental[id] == 0.0);
    }
    for (double e : decomp.transversality) check_close(e, 2.0, 1e-13);
    check_close(decomp.terminal_value, 2.0, 1e-13);
}

TEST_CASE("degenerate zero asset decomposes to zero") {
    const PricingKernel kernel = halving_kernel(2);
    const AdaptedProcess zero_s = AdaptedProcess::constant(kernel.tree_ptr(), 0, 2, 0.0);
    const AdaptedProcess zero_d = AdaptedProcess::constant(kernel.tree_ptr(), 1, 2, 0.0);
    const ValueDecomposition decomp = decompose_value(kernel, zero_s, zero_d);
    for (NodeId id = 0; id <= 2; ++id) CHECK(decomp.bubble[id] == 0.0);
}

TEST_CASE("inconsistent value processes violate the pricing axiom") {
    const R1 r1 = make_r1();
    // A constant value with no dividends cannot deflate to a martingale.
    const AdaptedProcess s = AdaptedProcess::constant(r1.tree, 0, 2, 1.0);
    CHECK(throws_code(Errc::AxiomAViolation, [&] { decompose_value(r1.kernel, s); }));
}

TEST_CASE("decomposition identity holds on random consistent pairs") {
    Rng rng(4402);
    for (int trial = 0; trial < 20; ++trial) {
        const IncreasingInstance instance = random_increasing(rng);
        const PricingKernel& kernel = instance.built.kernel;
        const FiltrationTree& tree = kernel.tree();
        AdaptedProcess d(kernel.tree_ptr(), 1, kernel.horizon());
        for (NodeId id = tree.level_begin(1); id < tree.level_end(kernel.horizon()); ++id)
            d[id] = rng.uniform(0.0, 1.5);
        const AdaptedProcess s = price_fundamental(kernel, d);
        const ValueDecomposition decomp = decompose_value(kernel, s, d);
        for (NodeId id = tree.level_begin(0); id < tree.level_end(kernel.horizon()); ++id) {
            const double lhs = kernel[id] * s[id];
            const double rhs = decomp.bubble[id] + decomp.fundamental[id] * kernel[id];
            CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
        }
    }
}

TEST_CASE("transversality separates funded assets from bubbles") {
    const R1 r1 = make_r1();
    SUBCASE("fundamental asset passes with terminal zero") {
        const AdaptedProcess r = short_rate(r1.kernel);
        const AdaptedProcess s = price_fundamental(r1.kernel, r);
        const TransversalityReport report = transversality_check(r1.kernel, s, 1e-10);
        CHECK(report.report.pass);
        CHECK(report.sequence.back() == 0.0);
    }
    SUBCASE("the account fails with a constant sequence") {
        const AdaptedProcess b = multiplicative_decomposition(r1.kernel).money_market.account;
        const TransversalityReport report = transversality_check(r1.kernel, b, 1e-10);
        CHECK_FALSE(report.report.pass);
        for (double e : report.sequence) check_close(e, 2.0, 1e-13);
        CHECK(report.nonincreasing);
    }
    SUBCASE("halving chain with a unit value decays geometrically") {
        const PricingKernel kernel = halving_kernel(5);
        const AdaptedProcess one = AdaptedProcess::constant(kernel.tree_ptr(), 0, 5, 1.0);
        const TransversalityReport report = transversality_check(kernel, one, 0.1);
        CHECK(report.report.pass); // 2^-5 = 0.03125 <= 0.1
        check_close(report.sequence[3], 0.125);
    }
}

TEST_CASE("bubble part vanishes exactly when transversality holds") {
    Rng rng(4403);
    for (int trial = 0; trial < 10; ++trial) {
        const RationalInstance instance = random_rational(rng);
        const PricingKernel& kernel = instance.kernel;
        const FiltrationTree& tree = kernel.tree();

        AdaptedProcess d(kernel.tree_ptr(), 1, kernel.horizon());
        for (NodeId id = tree.level_begin(1); id < tree.level_end(kernel.horizon()); ++id)
            d[id] = rng.uniform(0.1, 1.5);
        const AdaptedProcess funded = price_fundamental(kernel, d);
        const ValueDecomposition funded_split = decompose_value(kernel, funded, d);
        const bool funded_bubble_free = [&] {
            for (NodeId id = tree.level_begin(0); id < tree.level_end(kernel.horizon()); ++id)
                if (std::abs(funded_split.bubble[id]) > 1e-12) return false;
            return true;
        }();
        CHECK(funded_bubble_free);
        CHECK(transversality_check(kernel, funded, 1e-10).report.pass);

        const AdaptedProcess account = multiplicative_decomposition(kernel).money_market.account;
        const ValueDecomposition account_split = decompose_value(kernel, account);
        CHECK_FALSE(transversality_check(kernel, account, 1e-10).report.pass);
        bool some_bubble = false;
        for (NodeId id = tree.level_begin(0); id < tree.level_end(kernel.horizon()); ++id)
            if (account_split.bubble[id] > 1e-6) some_bubble = true;
        CHECK(some_bubble);
    }
}

TEST_CASE("symmetric pricing form") {
    const R1 r1 = make_r1();
    const AdaptedProcess r = short_rate(r1.kernel);

    SUBCASE("self-pricing returns exactly one") {
        const AdaptedProcess s = fx_price(r1.kernel, r, r, 1.0);
        for (NodeId id = 0; id <= 6; ++id) CHECK(s[id] == 1.0);
    }
    SUBCASE("scaling the dividend leg scales the price") {
        AdaptedProcess half(r1.tree, 1, 2);
        for (NodeId id = 1; id <= 6; ++id) half[id] = 0.5 * r[id];
        const AdaptedProcess s = fx_price(r1.kernel, half, r, 0.5);
        for (NodeId id = 0; id <= 6; ++id) check_close(s[id], 0.5, 1e-13);
    }
    SUBCASE("foreign leg at half rates with unit redemption") {
        const AdaptedProcess foreign = AdaptedProcess::constant(r1.tree, 1, 2, 0.5);
        const AdaptedProcess s = fx_price(r1.kernel, foreign, r, 1.0);
        check_close(s[0], 0.625, 1e-13);
    }
    SUBCASE("non-previsible legs are rejected") {
        AdaptedProcess lopsided(r1.tree, 1, 2);
        for (NodeId id = 1; id <= 6; ++id) lopsided[id] = 0.5;
        lopsided[3] = 0.75; // differs across siblings of node 1
        CHECK(throws_code(Errc::NotPrevisible, [&] { fx_price(r1.kernel, lopsided, r, 1.0); }));
    }
}

TEST_CASE("price export lists nodes then the decay sequence") {
    const PricingKernel kernel = halving_kernel(2);
    const AdaptedProcess d = AdaptedProcess::constant(kernel.tree_ptr(), 1, 2, 1.0);
    const AdaptedProcess s = price_fundamental(kernel, d);
    const TransversalityReport report = transversality_check(kernel, s, 1e-10);
    std::ostringstream out;
    write_price_csv(out, s, report.sequence);
    CHECK(out.str() ==
          "depth,node,value\n0,0,0.75\n1,1,0.5\n2,2,0\n0,*,0.75\n1,*,0.25\n2,*,0\n");
}
