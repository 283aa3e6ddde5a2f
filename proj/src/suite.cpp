#include "pktree/suite.hpp"

#include <cmath>
#include <limits>

namespace pktree {

namespace {

// Accumulates the worst deviation of an equality-type check, relative to the
// larger of 1 and the reference magnitude.
class Worst {
public:
    void update(double got, double want, NodeRef where) {
        const double violation = std::abs(got - want) / std::max(1.0, std::abs(want));
        if (violation > report_.max_violation || report_.witness.id == kNoNode) {
            report_.max_violation = violation;
            report_.witness = where;
        }
    }
    CheckReport finish(std::string name, double tolerance) {
        report_.name = std::move(name);
        report_.tolerance = tolerance;
        report_.pass = report_.max_violation <= tolerance;
        return report_;
    }

private:
    CheckReport report_;
};

// Worst strictness margin (must stay above the tolerance).
class WorstMargin {
public:
    void update(double margin, NodeRef where) {
        if (margin < worst_ || report_.witness.id == kNoNode) {
            worst_ = margin;
            report_.max_violation = -margin;
            report_.witness = where;
        }
    }
    CheckReport finish(std::string name, double tolerance) {
        report_.name = std::move(name);
        report_.tolerance = tolerance == 0.0 ? 0.0 : -tolerance;
        report_.pass = worst_ > tolerance;
        return report_;
    }

private:
    CheckReport report_;
    double worst_ = std::numeric_limits<double>::infinity();
};

CheckReport renamed(CheckReport report, const std::string& name) {
    report.name = name;
    return report;
}

} // namespace

std::vector<CheckReport> run_check_suite(const PricingKernel& kernel,
                                         const std::optional<RationalParts>& rational,
                                         const AdaptedProcess* increasing_driver) {
    const FiltrationTree& tree = kernel.tree();
    const int h = kernel.horizon();
    const double tol = kernel.options().tolerance;
    const double strict = kernel.options().strictness;
    constexpr double kIdentityTol = 1e-12;

    std::vector<CheckReport> checks;

    // Kernel axioms.
    {
        WorstMargin positivity;
        for (NodeId id = tree.level_begin(0); id < tree.level_end(h); ++id)
            positivity.update(kernel[id], NodeRef{tree.depth_of(id), id});
        checks.push_back(positivity.finish("kernel-positive", 0.0));
    }
    checks.push_back(renamed(is_strict_supermartingale(kernel.values(), strict),
                             "kernel-strict-supermartingale"));
    {
        WorstMargin decay;
        double prev = expectation(kernel.values(), 0);
        for (int i = 1; i <= h; ++i) {
            const double cur = expectation(kernel.values(), i);
            decay.update(prev - cur, NodeRef{i, kNoNode});
            prev = cur;
        }
        checks.push_back(decay.finish("kernel-mean-decay", strict));
    }

    // Money-market account and its deflation.
    const MultiplicativeDecomposition decomp = multiplicative_decomposition(kernel);
    const AdaptedProcess& account = decomp.money_market.account;
    checks.push_back(renamed(is_previsible(decomp.money_market.short_rate), "mma-rate-previsible"));
    {
        WorstMargin increase;
        for (NodeId id = tree.level_begin(1); id < tree.level_end(h); ++id)
            increase.update(account[id] - account[tree.parent(id)],
                            NodeRef{tree.depth_of(id), id});
        checks.push_back(increase.finish("mma-strict-increase", 0.0));
    }
    checks.push_back(renamed(is_martingale(decomp.rho, tol), "mma-deflated-martingale"));

    // Bond surface: bounds, maturity monotonicity, one-period account identity.
    const BondSurface bonds = bond_surface(kernel);
    {
        WorstMargin bounds_margin; // distance to the nearer boundary of (0, 1)
        for (int i = 0; i < h; ++i)
            for (int j = i + 1; j <= h; ++j)
                for (NodeId v = tree.level_begin(i); v < tree.level_end(i); ++v) {
                    const double p = bonds.price(i, j, v);
                    bounds_margin.update(std::min(p, 1.0 - p), NodeRef{i, v});
                }
        checks.push_back(bounds_margin.finish("bond-price-in-unit-interval", 0.0));
    }
    {
        WorstMargin maturity;
        for (int i = 0; i < h; ++i)
            for (int j = i + 2; j <= h; ++j)
                for (NodeId v = tree.level_begin(i); v < tree.level_end(i); ++v)
                    maturity.update(bonds.price(i, j - 1, v) - bonds.price(i, j, v), NodeRef{i, v});
        if (h >= 2) checks.push_back(maturity.finish("bond-maturity-monotone", 0.0));
    }
    {
        Worst identity;
        for (int i = 1; i <= h; ++i) {
            for (NodeId v = tree.level_begin(i - 1); v < tree.level_end(i - 1); ++v)
                for (int c = 0; c < tree.child_count(v); ++c)
                    identity.update(bonds.price(i - 1, i, v),
                                    account[v] / account[tree.child(v, c)], NodeRef{i - 1, v});
        }
        checks.push_back(identity.finish("bond-account-one-period-identity", kIdentityTol));
    }

    // Positive-martingale representation of the surface.
    const FHFamily family = fh_extract(kernel);
    {
        WorstMargin positive;
        Worst martingale_worst;
        for (int n = 1; n <= h + 1; ++n) {
            const AdaptedProcess& col = family.column(n);
            for (NodeId id = tree.level_begin(col.lo()); id < tree.level_end(col.hi()); ++id)
                positive.update(col[id], NodeRef{tree.depth_of(id), id});
            if (col.hi() > col.lo()) {
                const CheckReport m = is_martingale(col, kIdentityTol);
                martingale_worst.update(m.max_violation, 0.0, m.witness);
            }
        }
        checks.push_back(positive.finish("fh-columns-positive", 0.0));
        checks.push_back(martingale_worst.finish("fh-columns-martingale", kIdentityTol));
    }
    {
        Worst sum;
        for (int i = 0; i <= h; ++i) {
            for (NodeId v = tree.level_begin(i); v < tree.level_end(i); ++v) {
                double tail = 0.0;
                for (int n = i + 1; n <= h + 1; ++n) tail += family.column(n)[v];
                sum.update(tail, kernel[v], NodeRef{i, v});
            }
        }
        checks.push_back(sum.finish("fh-tail-sum-is-kernel", kIdentityTol));
    }
    {
        Worst reconstruction;
        for (int i = 0; i < h; ++i) {
            for (int j = i + 1; j <= h; ++j) {
                const AdaptedProcess rebuilt = fh_reconstruct(family, i, j);
                for (NodeId v = tree.level_begin(i); v < tree.level_end(i); ++v)
                    reconstruction.update(rebuilt[v], bonds.price(i, j, v), NodeRef{i, v});
            }
        }
        checks.push_back(reconstruction.finish("fh-reconstruction", kIdentityTol));
    }

    // Doob decomposition identities.
    const DoobDecomposition doob = doob_decomposition(kernel);
    {
        AdaptedProcess ea(kernel.tree_ptr(), 0, h);
        for (NodeId id = tree.level_begin(h); id < tree.level_end(h); ++id)
            ea[id] = doob.compensator[id];
        for (int k = h; k > 0; --k) {
            const std::vector<double> e = one_step_expectation(ea, k);
            const NodeId begin = tree.level_begin(k - 1);
            for (NodeId v = begin; v < tree.level_end(k - 1); ++v)
                ea[v] = e[static_cast<std::size_t>(v - begin)];
        }
        Worst identity;
        for (NodeId id = tree.level_begin(0); id < tree.level_end(h); ++id)
            identity.update(ea[id] - doob.compensator[id] + doob.residual[id], kernel[id],
                            NodeRef{tree.depth_of(id), id});
        checks.push_back(identity.finish("doob-finite-horizon-identity", kIdentityTol));
    }
    {
        // A_i == running sum of pi_{n-1} r_n P_{n-1,n} along each path.
        const AdaptedProcess r = short_rate(kernel);
        AdaptedProcess running(kernel.tree_ptr(), 0, h);
        running[tree.root()] = 0.0;
        for (int i = 1; i <= h; ++i) {
            for (NodeId v = tree.level_begin(i - 1); v < tree.level_end(i - 1); ++v) {
                const double p = bonds.price(i - 1, i, v);
                for (int c = 0; c < tree.child_count(v); ++c) {
                    const NodeId child = tree.child(v, c);
                    running[child] = running[v] + kernel[v] * r[child] * p;
                }
            }
        }
        Worst identity;
        for (NodeId id = tree.level_begin(0); id < tree.level_end(h); ++id)
            identity.update(running[id], doob.compensator[id], NodeRef{tree.depth_of(id), id});
        checks.push_back(identity.finish("doob-short-rate-identity", kIdentityTol));
    }
    {
        const PositiveReturnAsset doob_asset = positive_return_from_doob(kernel, bonds);
        checks.push_back(renamed(is_martingale(doob_asset.deflated, tol),
                                 "doob-return-asset-martingale"));
        // The accumulated pi_n r-bar_n reproduces the compensator.
        AdaptedProcess accumulated(kernel.tree_ptr(), 0, h);
        accumulated[tree.root()] = 0.0;
        for (NodeId id = tree.level_begin(1); id < tree.level_end(h); ++id)
            accumulated[id] = accumulated[tree.parent(id)] + kernel[id] * doob_asset.rate[id];
        Worst identity;
        for (NodeId id = tree.level_begin(0); id < tree.level_end(h); ++id)
            identity.update(accumulated[id], doob.compensator[id], NodeRef{tree.depth_of(id), id});
        checks.push_back(identity.finish("doob-return-accumulator-identity", kIdentityTol));
    }

    // Par pricing of the floating-rate note and the symmetric form.
    {
        const AdaptedProcess r = short_rate(kernel);
        const AdaptedProcess par = price_fundamental(kernel, r, 1.0);
        const AdaptedProcess par_potential = potential_ratio_price(kernel, r, 1.0);
        Worst frn;
        Worst routes;
        for (int d = 0; d < h; ++d) { // the terminal depth is ex-dividend zero
            for (NodeId v = tree.level_begin(d); v < tree.level_end(d); ++v) {
                frn.update(par[v], 1.0, NodeRef{d, v});
                routes.update(par_potential[v], par[v], NodeRef{d, v});
            }
        }
        checks.push_back(frn.finish("frn-prices-at-par", kIdentityTol));
        checks.push_back(routes.finish("pricing-route-equivalence", kIdentityTol));

        AdaptedProcess gains(kernel.tree_ptr(), 0, h);
        AdaptedProcess running(kernel.tree_ptr(), 0, h);
        running[tree.root()] = 0.0;
        for (NodeId id = tree.level_begin(1); id < tree.level_end(h); ++id) {
            double d = r[id];
            if (tree.depth_of(id) == h) d += 1.0;
            running[id] = running[tree.parent(id)] + kernel[id] * d;
        }
        for (NodeId id = tree.level_begin(0); id < tree.level_end(h); ++id)
            gains[id] = kernel[id] * par[id] + running[id];
        checks.push_back(renamed(is_martingale(gains, tol), "axiom-deflated-gains-martingale"));

        const AdaptedProcess fx = fx_price(kernel, r, r, 1.0);
        Worst symmetry;
        for (NodeId id = tree.level_begin(0); id < tree.level_end(h); ++id)
            symmetry.update(fx[id], 1.0, NodeRef{tree.depth_of(id), id});
        checks.push_back(symmetry.finish("fx-self-symmetry", kIdentityTol));
    }

    // Closed forms available only with rational provenance.
    if (rational) {
        const Schedule& alpha = rational->alpha;
        const Schedule& beta = rational->beta;
        const AdaptedProcess& n = rational->martingale;
        {
            Worst closed;
            for (int i = 0; i < h; ++i) {
                for (int j = i + 1; j <= h; ++j) {
                    const AdaptedProcess form = rational_bond_closed_form(alpha, beta, n, i, j);
                    for (NodeId v = tree.level_begin(i); v < tree.level_end(i); ++v)
                        closed.update(form[v], bonds.price(i, j, v), NodeRef{i, v});
                }
            }
            checks.push_back(closed.finish("rational-bond-closed-form", kIdentityTol));
        }
        {
            // B_i = prod (alpha_{n-1} + beta_{n-1} N_{n-1}) / (alpha_n + beta_n N_{n-1}),
            // rho_i = rho_0 prod (alpha_n + beta_n N_n) / (alpha_n + beta_n N_{n-1}).
            AdaptedProcess b(kernel.tree_ptr(), 0, h);
            AdaptedProcess rho(kernel.tree_ptr(), 0, h);
            b[tree.root()] = 1.0;
            rho[tree.root()] = alpha[0] + beta[0] * n[tree.root()];
            for (NodeId id = tree.level_begin(1); id < tree.level_end(h); ++id) {
                const NodeId parent = tree.parent(id);
                const int d = tree.depth_of(id);
                b[id] = b[parent] * (alpha[d - 1] + beta[d - 1] * n[parent]) /
                        (alpha[d] + beta[d] * n[parent]);
                rho[id] = rho[parent] * (alpha[d] + beta[d] * n[id]) /
                          (alpha[d] + beta[d] * n[parent]);
            }
            Worst account_form;
            Worst rho_form;
            for (NodeId id = tree.level_begin(0); id < tree.level_end(h); ++id) {
                account_form.update(b[id], account[id], NodeRef{tree.depth_of(id), id});
                rho_form.update(rho[id], decomp.rho[id], NodeRef{tree.depth_of(id), id});
            }
            checks.push_back(account_form.finish("rational-account-closed-form", kIdentityTol));
            checks.push_back(rho_form.finish("rational-rho-closed-form", kIdentityTol));
        }
    }

    // Driver roundtrip for kernels built from an increasing process:
    // G'_i = sum_{n<=i} pi_n r-bar_n with r-bar_n = (G_n - G_{n-1}) / pi_n.
    if (increasing_driver) {
        const AdaptedProcess& g = *increasing_driver;
        AdaptedProcess rebuilt(kernel.tree_ptr(), 0, h);
        rebuilt[tree.root()] = 0.0;
        for (NodeId id = tree.level_begin(1); id < tree.level_end(h); ++id) {
            const NodeId parent = tree.parent(id);
            const double rbar = (g[id] - g[parent]) / kernel[id];
            rebuilt[id] = rebuilt[parent] + kernel[id] * rbar;
        }
        Worst roundtrip;
        for (NodeId id = tree.level_begin(0); id < tree.level_end(h); ++id)
            roundtrip.update(rebuilt[id], g[id], NodeRef{tree.depth_of(id), id});
        checks.push_back(roundtrip.finish("driver-roundtrip", 1e-10));
    }

    return checks;
}

bool all_pass(const std::vector<CheckReport>& checks) {
    for (const CheckReport& c : checks)
        if (!c.pass) return false;
    return true;
}

} // namespace pktree
