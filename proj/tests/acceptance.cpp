// Acceptance suite: every structural identity the engine promises, exercised
// over the frozen worked example plus seeded randomized model populations.
// Each criterion prints one PASS/FAIL line with its worst observed violation.

#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <vector>

#include "pktree/assets.hpp"
#include "pktree/bonds.hpp"
#include "pktree/suite.hpp"

#include "r1.hpp"
#include "random_instances.hpp"

using namespace pktree;
using namespace pktree::testing;

namespace {

class Criterion {
public:
    Criterion(int number, const char* label, double limit)
        : number_(number), label_(label), limit_(limit) {
        start_ = std::chrono::steady_clock::now();
    }

    void bound(double violation) { worst_ = std::max(worst_, violation); }
    void relative(double got, double want) {
        bound(std::abs(got - want) / std::max(1.0, std::abs(want)));
    }
    void expect(bool condition) {
        if (!condition) ++hard_failures_;
    }

    void finish(double time_limit_seconds = -1.0) {
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        bool ok = worst_ <= limit_ && hard_failures_ == 0;
        if (time_limit_seconds > 0.0 && elapsed > time_limit_seconds) ok = false;
        std::printf("[acceptance] %2d %-34s %s  worst %.3g (limit %.0e)%s in %.2fs\n", number_,
                    label_, ok ? "PASS" : "FAIL", worst_, limit_,
                    hard_failures_ ? " with hard failures" : "", elapsed);
        std::fflush(stdout);
        CHECK(ok);
    }

private:
    int number_;
    const char* label_;
    double limit_;
    double worst_ = 0.0;
    int hard_failures_ = 0;
    std::chrono::steady_clock::time_point start_;
};

struct Instances {
    std::vector<RationalInstance> rational;
    std::vector<IncreasingInstance> increasing;
};

const Instances& instances() {
    static const Instances shared = [] {
        Instances out;
        Rng rational_rng(20260808);
        out.rational.reserve(100);
        for (int k = 0; k < 100; ++k) out.rational.push_back(random_rational(rational_rng));
        Rng increasing_rng(20260809);
        out.increasing.reserve(50);
        for (int k = 0; k < 50; ++k) out.increasing.push_back(random_increasing(increasing_rng));
        return out;
    }();
    return shared;
}

// The account as a process on [1, H], the domain of the previsibility check.
AdaptedProcess account_tail(const AdaptedProcess& account) {
    const FiltrationTree& tree = account.tree();
    AdaptedProcess tail(account.tree_ptr(), 1, account.hi());
    for (NodeId id = tree.level_begin(1); id < tree.level_end(account.hi()); ++id)
        tail[id] = account[id];
    return tail;
}

void check_kernel_decomposition(Criterion& criterion, const PricingKernel& kernel) {
    const FiltrationTree& tree = kernel.tree();
    const MultiplicativeDecomposition decomp = multiplicative_decomposition(kernel);
    const CheckReport martingale = is_martingale(decomp.rho, 1e-10);
    criterion.expect(martingale.pass);
    criterion.bound(martingale.max_violation <= 1e-10 ? 0.0 : martingale.max_violation);
    criterion.expect(is_previsible(account_tail(decomp.money_market.account)).pass);
    for (NodeId id = tree.level_begin(1); id < tree.level_end(kernel.horizon()); ++id)
        criterion.expect(decomp.money_market.account[id] >
                         decomp.money_market.account[tree.parent(id)]);
}

} // namespace

TEST_CASE("criterion 1: rational closed form matches the bond surface") {
    Criterion criterion(1, "rational-bond-closed-form", 1e-12);
    for (const RationalInstance& instance : instances().rational) {
        const PricingKernel& kernel = instance.kernel;
        const FiltrationTree& tree = kernel.tree();
        const BondSurface surface = bond_surface(kernel);
        for (int i = 0; i < kernel.horizon(); ++i) {
            for (int j = i + 1; j <= kernel.horizon(); ++j) {
                const AdaptedProcess closed =
                    rational_bond_closed_form(instance.alpha, instance.beta, instance.martingale, i, j);
                for (NodeId v = tree.level_begin(i); v < tree.level_end(i); ++v)
                    criterion.relative(closed[v], surface.price(i, j, v));
            }
        }
    }
    criterion.finish(5.0);
}

TEST_CASE("criterion 2: deflated account is a martingale, account previsible and increasing") {
    Criterion criterion(2, "account-decomposition-theorem", 0.0);
    for (const RationalInstance& instance : instances().rational)
        check_kernel_decomposition(criterion, instance.kernel);
    for (const IncreasingInstance& instance : instances().increasing)
        check_kernel_decomposition(criterion, instance.built.kernel);
    criterion.finish();
}

TEST_CASE("criterion 3: one-period bond equals the account ratio") {
    Criterion criterion(3, "one-period-bond-account-ratio", 1e-12);
    auto run = [&](const PricingKernel& kernel) {
        const FiltrationTree& tree = kernel.tree();
        const BondSurface surface = bond_surface(kernel);
        const AdaptedProcess account = multiplicative_decomposition(kernel).money_market.account;
        for (int i = 1; i <= kernel.horizon(); ++i)
            for (NodeId v = tree.level_begin(i - 1); v < tree.level_end(i - 1); ++v)
                for (int c = 0; c < tree.child_count(v); ++c)
                    criterion.relative(surface.price(i - 1, i, v),
                                       account[v] / account[tree.child(v, c)]);
    };
    for (const RationalInstance& instance : instances().rational) run(instance.kernel);
    for (const IncreasingInstance& instance : instances().increasing) run(instance.built.kernel);
    criterion.finish();
}

TEST_CASE("criterion 4: positive-martingale family reconstructs the surface") {
    Criterion criterion(4, "family-reconstruction", 1e-12);
    auto run = [&](const PricingKernel& kernel) {
        const FiltrationTree& tree = kernel.tree();
        const BondSurface surface = bond_surface(kernel);
        const FHFamily family = fh_extract(kernel);
        for (int n = 1; n <= family.horizon() + 1; ++n) {
            const AdaptedProcess& column = family.column(n);
            for (NodeId id = tree.level_begin(column.lo()); id < tree.level_end(column.hi()); ++id)
                criterion.expect(column[id] > 0.0);
            if (column.hi() > column.lo()) {
                const CheckReport report = is_martingale(column, 1e-12);
                criterion.expect(report.pass);
                criterion.bound(report.max_violation <= 1e-12 ? 0.0 : report.max_violation);
            }
        }
        for (int i = 0; i < kernel.horizon(); ++i) {
            for (int j = i + 1; j <= kernel.horizon(); ++j) {
                const AdaptedProcess rebuilt = fh_reconstruct(family, i, j);
                for (NodeId v = tree.level_begin(i); v < tree.level_end(i); ++v)
                    criterion.relative(rebuilt[v], surface.price(i, j, v));
            }
        }
    };
    for (const RationalInstance& instance : instances().rational) run(instance.kernel);
    for (const IncreasingInstance& instance : instances().increasing) run(instance.built.kernel);
    criterion.finish();
}

TEST_CASE("criterion 5: increasing drivers roundtrip through their return asset") {
    Criterion criterion(5, "driver-roundtrip", 1e-10);
    for (const IncreasingInstance& instance : instances().increasing) {
        const PricingKernel& kernel = instance.built.kernel;
        const FiltrationTree& tree = kernel.tree();
        AdaptedProcess rebuilt(kernel.tree_ptr(), 0, kernel.horizon());
        rebuilt[tree.root()] = 0.0;
        for (NodeId id = tree.level_begin(1); id < tree.level_end(kernel.horizon()); ++id)
            rebuilt[id] = rebuilt[tree.parent(id)] + kernel[id] * instance.built.asset.rate[id];
        for (NodeId id = tree.level_begin(0); id < tree.level_end(kernel.horizon()); ++id)
            criterion.relative(rebuilt[id], instance.driver[id]);
        criterion.expect(is_martingale(instance.built.asset.deflated, 1e-10).pass);
    }
    criterion.finish();
}

TEST_CASE("criterion 6: finite-horizon Doob identity and short-rate form of the compensator") {
    Criterion criterion(6, "doob-identities", 1e-12);
    auto run = [&](const PricingKernel& kernel) {
        const FiltrationTree& tree = kernel.tree();
        const int h = kernel.horizon();
        const DoobDecomposition doob = doob_decomposition(kernel);
        const BondSurface surface = bond_surface(kernel);
        const AdaptedProcess r = short_rate(kernel);

        AdaptedProcess terminal(kernel.tree_ptr(), h, h);
        for (NodeId id = tree.level_begin(h); id < tree.level_end(h); ++id)
            terminal[id] = doob.compensator[id];
        for (int i = 0; i <= h; ++i) {
            const AdaptedProcess ea = conditional_expectation(terminal, h, i);
            for (NodeId id = tree.level_begin(i); id < tree.level_end(i); ++id)
                criterion.relative(ea[id] - doob.compensator[id] + doob.residual[id], kernel[id]);
        }

        AdaptedProcess running(kernel.tree_ptr(), 0, h);
        running[tree.root()] = 0.0;
        for (int i = 1; i <= h; ++i) {
            for (NodeId v = tree.level_begin(i - 1); v < tree.level_end(i - 1); ++v) {
                const double term = kernel[v] * surface.price(i - 1, i, v);
                for (int c = 0; c < tree.child_count(v); ++c) {
                    const NodeId child = tree.child(v, c);
                    running[child] = running[v] + r[child] * term;
                    criterion.relative(running[child], doob.compensator[child]);
                }
            }
        }
    };
    for (const RationalInstance& instance : instances().rational) run(instance.kernel);
    for (const IncreasingInstance& instance : instances().increasing) run(instance.built.kernel);
    criterion.finish();
}

TEST_CASE("criterion 7: the floating-rate note prices at par") {
    Criterion criterion(7, "frn-par-pricing", 1e-12);
    auto run = [&](const PricingKernel& kernel) {
        const FiltrationTree& tree = kernel.tree();
        const AdaptedProcess note = price_fundamental(kernel, short_rate(kernel), 1.0);
        for (int d = 0; d < kernel.horizon(); ++d)
            for (NodeId v = tree.level_begin(d); v < tree.level_end(d); ++v)
                criterion.relative(note[v], 1.0);
        for (NodeId v = tree.level_begin(kernel.horizon()); v < tree.level_end(kernel.horizon()); ++v)
            criterion.expect(note[v] == 0.0); // ex-dividend after redemption
    };
    for (const RationalInstance& instance : instances().rational) run(instance.kernel);
    for (const IncreasingInstance& instance : instances().increasing) run(instance.built.kernel);

    const R1 r1 = make_r1();
    const AdaptedProcess note = price_fundamental(r1.kernel, short_rate(r1.kernel), 1.0);
    criterion.relative(note[0], 1.0);
    criterion.finish();
}

TEST_CASE("criterion 8: bubbles are detected and funded assets are bubble-free") {
    Criterion criterion(8, "bubble-detection", 1e-12);
    auto run = [&](const PricingKernel& kernel) {
        const FiltrationTree& tree = kernel.tree();
        const MultiplicativeDecomposition decomp = multiplicative_decomposition(kernel);

        // The account never pays out: its decay statistic stays at rho_0 and
        // transversality fails.
        const ValueDecomposition account_split =
            decompose_value(kernel, decomp.money_market.account);
        for (double e : account_split.transversality) criterion.relative(e, decomp.rho[0]);
        criterion.expect(
            !transversality_check(kernel, decomp.money_market.account, 1e-10).report.pass);

        // A funded annuity decomposes with no retained part and passes.
        const AdaptedProcess r = short_rate(kernel);
        const AdaptedProcess annuity = price_fundamental(kernel, r);
        const ValueDecomposition annuity_split = decompose_value(kernel, annuity, r);
        for (NodeId id = tree.level_begin(0); id < tree.level_end(kernel.horizon()); ++id)
            criterion.bound(std::abs(annuity_split.bubble[id]));
        criterion.expect(transversality_check(kernel, annuity, 1e-10).report.pass);
    };
    for (const RationalInstance& instance : instances().rational) run(instance.kernel);
    for (const IncreasingInstance& instance : instances().increasing) run(instance.built.kernel);
    criterion.finish();
}

TEST_CASE("criterion 9: the symmetric pricing form is exact") {
    Criterion criterion(9, "fx-symmetric-form", 1e-12);
    auto run = [&](const PricingKernel& kernel) {
        const FiltrationTree& tree = kernel.tree();
        const AdaptedProcess r = short_rate(kernel);
        const AdaptedProcess self = fx_price(kernel, r, r, 1.0);
        for (NodeId id = tree.level_begin(0); id < tree.level_end(kernel.horizon()); ++id)
            criterion.relative(self[id], 1.0);
    };
    for (const RationalInstance& instance : instances().rational) run(instance.kernel);
    for (const IncreasingInstance& instance : instances().increasing) run(instance.built.kernel);

    const R1 r1 = make_r1();
    const AdaptedProcess foreign = AdaptedProcess::constant(r1.tree, 1, 2, 0.5);
    const AdaptedProcess fx = fx_price(r1.kernel, foreign, short_rate(r1.kernel), 1.0);
    criterion.relative(fx[0], 0.625);
    criterion.finish();
}

TEST_CASE("criterion 10: the branching-process model passes the whole suite") {
    Criterion criterion(10, "branching-process-model", 0.0);
    const BranchingModel model = branching_martingale({{{1, 0.5}, {2, 0.5}}}, 1, 4);
    const Schedule alpha = Schedule::geometric(1.0, 0.5, 4);
    const Schedule beta = Schedule::geometric(1.0, 0.5, 4);
    const PricingKernel kernel = kernel_rational(model.tree, alpha, beta, model.martingale);

    const std::vector<CheckReport> checks =
        run_check_suite(kernel, RationalParts{alpha, beta, model.martingale});
    for (const CheckReport& check : checks) criterion.expect(check.pass);
    criterion.expect(checks.size() >= 20);

    // Bubble detection on the same model.
    const MultiplicativeDecomposition decomp = multiplicative_decomposition(kernel);
    criterion.expect(
        !transversality_check(kernel, decomp.money_market.account, 1e-10).report.pass);
    const AdaptedProcess annuity = price_fundamental(kernel, short_rate(kernel));
    criterion.expect(transversality_check(kernel, annuity, 1e-10).report.pass);

    criterion.finish(10.0);
}
