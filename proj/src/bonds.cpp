#include "pktree/bonds.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "pktree/io.hpp"

namespace pktree {

namespace {

void assert_internal(bool ok, const char* what) {
    if (!ok) throw std::logic_error(std::string("internal invariant failed: ") + what);
}

void require_pair(int i, int j, int horizon) {
    if (i < 0 || i >= j || j > horizon) {
        char buf[72];
        std::snprintf(buf, sizeof buf, "(i, j) = (%d, %d) outside 0 <= i < j <= %d", i, j, horizon);
        throw Error(Errc::IndexOutOfRange, buf);
    }
}

} // namespace

std::size_t BondSurface::pair_index(int i, int j) const {
    // Row-major over the strict upper triangle: row i holds maturities i+1..H.
    const std::size_t h = static_cast<std::size_t>(horizon_);
    const std::size_t row = static_cast<std::size_t>(i);
    return row * h - row * (row - 1) / 2 + static_cast<std::size_t>(j - i - 1);
}

const std::vector<double>& BondSurface::field(int i, int j) const {
    require_pair(i, j, horizon_);
    return fields_[pair_index(i, j)];
}

double BondSurface::price(int i, int j, NodeId node) const {
    const std::vector<double>& f = field(i, j);
    const NodeId begin = tree().level_begin(i);
    if (node < begin || node >= tree().level_end(i))
        throw Error(Errc::IndexOutOfRange, "node does not lie at depth i");
    return f[static_cast<std::size_t>(node - begin)];
}

double BondSurface::rate(int i, int j, NodeId node) const { return 1.0 / price(i, j, node) - 1.0; }

AdaptedProcess BondSurface::price_field(int i, int j) const {
    const std::vector<double>& f = field(i, j);
    AdaptedProcess out(kernel_.tree_ptr(), i, i);
    const NodeId begin = tree().level_begin(i);
    for (NodeId v = begin; v < tree().level_end(i); ++v)
        out[v] = f[static_cast<std::size_t>(v - begin)];
    return out;
}

BondSurface bond_surface(const PricingKernel& kernel) {
    const FiltrationTree& tree = kernel.tree();
    const int h = kernel.horizon();

    BondSurface surface(kernel, h);
    surface.fields_.resize(static_cast<std::size_t>(h) * static_cast<std::size_t>(h + 1) / 2);

    // One backward sweep per maturity: fold E_i[pi_j] down to the root,
    // recording P_ij = E_i[pi_j] / pi_i at every depth on the way.
    for (int j = 1; j <= h; ++j) {
        AdaptedProcess e(kernel.tree_ptr(), 0, j);
        for (NodeId id = tree.level_begin(j); id < tree.level_end(j); ++id) e[id] = kernel[id];
        for (int k = j; k > 0; --k) {
            const std::vector<double> folded = one_step_expectation(e, k);
            const int i = k - 1;
            const NodeId begin = tree.level_begin(i);
            std::vector<double>& out = surface.fields_[surface.pair_index(i, j)];
            out.resize(tree.level_size(i));
            for (NodeId v = begin; v < tree.level_end(i); ++v) {
                e[v] = folded[static_cast<std::size_t>(v - begin)];
                out[static_cast<std::size_t>(v - begin)] = e[v] / kernel[v];
            }
        }
    }

    // 0 < P < 1 and strict decay in maturity hold for every valid kernel.
    for (int i = 0; i < h; ++i) {
        for (int j = i + 1; j <= h; ++j) {
            const std::vector<double>& f = surface.fields_[surface.pair_index(i, j)];
            for (std::size_t k = 0; k < f.size(); ++k) {
                assert_internal(f[k] > 0.0 && f[k] < 1.0, "bond price must lie in (0, 1)");
                if (j > i + 1) {
                    const std::vector<double>& prev = surface.fields_[surface.pair_index(i, j - 1)];
                    assert_internal(f[k] < prev[k], "bond price must fall with maturity");
                }
            }
        }
    }
    return surface;
}

AdaptedProcess per_period_rate(const BondSurface& surface, int i, int j) {
    AdaptedProcess field = surface.price_field(i, j);
    const FiltrationTree& tree = surface.tree();
    for (NodeId v = tree.level_begin(i); v < tree.level_end(i); ++v) field[v] = 1.0 / field[v] - 1.0;
    return field;
}

AdaptedProcess rational_bond_closed_form(const Schedule& alpha, const Schedule& beta,
                                         const AdaptedProcess& martingale, int i, int j) {
    require_pair(i, j, std::min(alpha.last_depth(), beta.last_depth()));
    if (!martingale.defined_at(i))
        throw Error(Errc::ProcessNotDefinedAtDepth, "martingale undefined at depth i");
    const FiltrationTree& tree = martingale.tree();
    AdaptedProcess out(martingale.tree_ptr(), i, i);
    for (NodeId v = tree.level_begin(i); v < tree.level_end(i); ++v)
        out[v] = (alpha[j] + beta[j] * martingale[v]) / (alpha[i] + beta[i] * martingale[v]);
    return out;
}

const AdaptedProcess& FHFamily::column(int n) const {
    if (n < 1 || n > horizon_ + 1) throw Error(Errc::IndexOutOfRange, "column index outside 1..H+1");
    return columns_[static_cast<std::size_t>(n - 1)];
}

FHFamily fh_extract(const PricingKernel& kernel) {
    const FiltrationTree& tree = kernel.tree();
    const int h = kernel.horizon();

    std::vector<AdaptedProcess> columns;
    columns.reserve(static_cast<std::size_t>(h) + 1);

    // Column n: one-step supermartingale increment at depth n-1, projected
    // back to the root depth by depth so each column is exactly a martingale.
    for (int n = 1; n <= h; ++n) {
        AdaptedProcess col(kernel.tree_ptr(), 0, n - 1);
        const std::vector<double> e = one_step_expectation(kernel.values(), n);
        const NodeId begin = tree.level_begin(n - 1);
        for (NodeId v = begin; v < tree.level_end(n - 1); ++v)
            col[v] = kernel[v] - e[static_cast<std::size_t>(v - begin)];
        for (int k = n - 1; k > 0; --k) {
            const std::vector<double> folded = one_step_expectation(col, k);
            const NodeId b = tree.level_begin(k - 1);
            for (NodeId v = b; v < tree.level_end(k - 1); ++v)
                col[v] = folded[static_cast<std::size_t>(v - b)];
        }
        columns.push_back(std::move(col));
    }

    // Residual column E_i[pi_H] on [0, H].
    AdaptedProcess residual(kernel.tree_ptr(), 0, h);
    for (NodeId id = tree.level_begin(h); id < tree.level_end(h); ++id) residual[id] = kernel[id];
    for (int k = h; k > 0; --k) {
        const std::vector<double> folded = one_step_expectation(residual, k);
        const NodeId b = tree.level_begin(k - 1);
        for (NodeId v = b; v < tree.level_end(k - 1); ++v)
            residual[v] = folded[static_cast<std::size_t>(v - b)];
    }
    columns.push_back(std::move(residual));

    FHFamily family(h, std::move(columns));

    for (int n = 1; n <= h + 1; ++n) {
        const AdaptedProcess& col = family.column(n);
        for (NodeId id = tree.level_begin(col.lo()); id < tree.level_end(col.hi()); ++id)
            assert_internal(col[id] > 0.0, "martingale column must be positive");
        if (col.hi() > col.lo())
            assert_internal(is_martingale(col, 1e-12).pass, "family column must be a martingale");
    }
    // Tail sums reproduce the kernel node-wise.
    for (int i = 0; i <= h; ++i) {
        for (NodeId v = tree.level_begin(i); v < tree.level_end(i); ++v) {
            double sum = 0.0;
            for (int n = i + 1; n <= h + 1; ++n) sum += family.column(n)[v];
            assert_internal(std::abs(sum - kernel[v]) <= 1e-12 * std::max(1.0, std::abs(kernel[v])),
                            "family tail sum must equal the kernel");
        }
    }
    return family;
}

AdaptedProcess fh_reconstruct(const FHFamily& family, int i, int j) {
    require_pair(i, j, family.horizon());
    const AdaptedProcess& residual = family.column(family.horizon() + 1);
    const FiltrationTree& tree = residual.tree();

    AdaptedProcess out(residual.tree_ptr(), i, i);
    for (NodeId v = tree.level_begin(i); v < tree.level_end(i); ++v) {
        double num = 0.0;
        for (int n = j + 1; n <= family.horizon() + 1; ++n) num += family.column(n)[v];
        double den = 0.0;
        for (int n = i + 1; n <= family.horizon() + 1; ++n) den += family.column(n)[v];
        out[v] = num / den;
    }
    return out;
}

void write_curve_csv(std::ostream& out, const BondSurface& surface, int i) {
    const FiltrationTree& tree = surface.tree();
    if (i < 0) throw Error(Errc::IndexOutOfRange, "valuation depth must be >= 0");
    out << "time_i,time_j,node,P,R\n";
    if (i >= surface.horizon()) return; // header only
    for (int j = i + 1; j <= surface.horizon(); ++j) {
        for (NodeId v = tree.level_begin(i); v < tree.level_end(i); ++v) {
            out << format_sig12(tree.time(i)) << ',' << format_sig12(tree.time(j)) << ',' << v << ','
                << format_sig12(surface.price(i, j, v)) << ',' << format_sig12(surface.rate(i, j, v))
                << '\n';
        }
    }
}

} // namespace pktree
