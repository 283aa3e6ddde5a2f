#include "pktree/assets.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "pktree/io.hpp"

namespace pktree {

namespace {

void check_dividend_range(const PricingKernel& kernel, const AdaptedProcess& dividends) {
    if (dividends.tree_ptr().get() != kernel.tree_ptr().get())
        throw Error(Errc::InvalidArgument, "dividends live on a different tree");
    if (dividends.lo() < 1 || dividends.hi() > kernel.horizon())
        throw Error(Errc::DividendOutsideHorizon,
                    "dividends must lie in depths 1.." + std::to_string(kernel.horizon()));
    const FiltrationTree& tree = dividends.tree();
    for (NodeId id = tree.level_begin(dividends.lo()); id < tree.level_end(dividends.hi()); ++id)
        if (dividends[id] < 0.0)
            throw Error(Errc::InvalidArgument, "dividends must be non-negative");
}

double dividend_at(const AdaptedProcess& dividends, int depth, NodeId id) {
    return dividends.defined_at(depth) ? dividends[id] : 0.0;
}

// pi_n * D_n at depth n, with the terminal redemption folded into D_H.
double deflated_dividend(const PricingKernel& kernel, const AdaptedProcess& dividends,
                         double redemption, int depth, NodeId id) {
    double d = dividend_at(dividends, depth, id);
    if (depth == kernel.horizon()) d += redemption;
    return kernel[id] * d;
}

// U_i = E_i[sum_{n>i} pi_n D_n] by one backward sweep.
AdaptedProcess deflated_dividend_value(const PricingKernel& kernel, const AdaptedProcess& dividends,
                                       double redemption) {
    const FiltrationTree& tree = kernel.tree();
    const int h = kernel.horizon();
    AdaptedProcess u(kernel.tree_ptr(), 0, h);
    for (NodeId id = tree.level_begin(h); id < tree.level_end(h); ++id) u[id] = 0.0;
    for (int k = h; k > 0; --k) {
        AdaptedProcess payload(kernel.tree_ptr(), k, k);
        for (NodeId id = tree.level_begin(k); id < tree.level_end(k); ++id)
            payload[id] = u[id] + deflated_dividend(kernel, dividends, redemption, k, id);
        const std::vector<double> e = one_step_expectation(payload, k);
        const NodeId begin = tree.level_begin(k - 1);
        for (NodeId v = begin; v < tree.level_end(k - 1); ++v)
            u[v] = e[static_cast<std::size_t>(v - begin)];
    }
    return u;
}

// F_i = sum_{n<=i} pi_n D_n along each path.
AdaptedProcess running_deflated_dividends(const PricingKernel& kernel,
                                          const AdaptedProcess& dividends, double redemption) {
    const FiltrationTree& tree = kernel.tree();
    const int h = kernel.horizon();
    AdaptedProcess f(kernel.tree_ptr(), 0, h);
    f[tree.root()] = deflated_dividend(kernel, dividends, redemption, 0, tree.root());
    for (NodeId id = tree.level_begin(1); id < tree.level_end(h); ++id)
        f[id] = f[tree.parent(id)] +
                deflated_dividend(kernel, dividends, redemption, tree.depth_of(id), id);
    return f;
}

} // namespace

AdaptedProcess price_fundamental(const PricingKernel& kernel, const AdaptedProcess& dividends,
                                 double terminal_redemption) {
    check_dividend_range(kernel, dividends);
    const FiltrationTree& tree = kernel.tree();
    AdaptedProcess price = deflated_dividend_value(kernel, dividends, terminal_redemption);
    for (NodeId id = tree.level_begin(0); id < tree.level_end(kernel.horizon()); ++id)
        price[id] /= kernel[id];
    return price;
}

AdaptedProcess potential_ratio_price(const PricingKernel& kernel, const AdaptedProcess& dividends,
                                     double terminal_redemption) {
    check_dividend_range(kernel, dividends);
    const FiltrationTree& tree = kernel.tree();
    const int h = kernel.horizon();

    const AdaptedProcess f = running_deflated_dividends(kernel, dividends, terminal_redemption);
    AdaptedProcess ef(kernel.tree_ptr(), 0, h);
    for (NodeId id = tree.level_begin(h); id < tree.level_end(h); ++id) ef[id] = f[id];
    for (int k = h; k > 0; --k) {
        const std::vector<double> e = one_step_expectation(ef, k);
        const NodeId begin = tree.level_begin(k - 1);
        for (NodeId v = begin; v < tree.level_end(k - 1); ++v)
            ef[v] = e[static_cast<std::size_t>(v - begin)];
    }

    AdaptedProcess price(kernel.tree_ptr(), 0, h);
    for (NodeId id = tree.level_begin(0); id < tree.level_end(h); ++id)
        price[id] = (ef[id] - f[id]) / kernel[id];
    return price;
}

ValueDecomposition decompose_value(const PricingKernel& kernel, const AdaptedProcess& value,
                                   const AdaptedProcess& dividends) {
    check_dividend_range(kernel, dividends);
    const FiltrationTree& tree = kernel.tree();
    const int h = kernel.horizon();
    if (value.lo() != 0 || value.hi() != h)
        throw Error(Errc::InvalidArgument, "value process must cover depths 0..H");
    for (NodeId id = tree.level_begin(0); id < tree.level_end(h); ++id)
        if (value[id] < 0.0) throw Error(Errc::InvalidArgument, "value process must be non-negative");

    // Gate: deflated gains M_i = pi_i S_i + F_i must be a martingale.
    const AdaptedProcess f = running_deflated_dividends(kernel, dividends, 0.0);
    AdaptedProcess gains(kernel.tree_ptr(), 0, h);
    for (NodeId id = tree.level_begin(0); id < tree.level_end(h); ++id)
        gains[id] = kernel[id] * value[id] + f[id];
    const CheckReport axiom = is_martingale(gains, kernel.options().tolerance, "deflated-gains");
    if (!axiom.pass)
        throw Error(Errc::AxiomAViolation,
                    "deflated gains deviate by " + std::to_string(axiom.max_violation) +
                        " at node " + std::to_string(axiom.witness.id) +
                        "; the (value, dividend) pair is not consistent with the kernel");

    const AdaptedProcess u = deflated_dividend_value(kernel, dividends, 0.0);
    AdaptedProcess fundamental(kernel.tree_ptr(), 0, h);
    AdaptedProcess bubble(kernel.tree_ptr(), 0, h);
    for (NodeId id = tree.level_begin(0); id < tree.level_end(h); ++id) {
        fundamental[id] = u[id] / kernel[id];
        bubble[id] = kernel[id] * value[id] - u[id];
    }

    // The retained part absorbs E_i[pi_H S_H]; given the gate above it is a
    // non-negative martingale up to the working tolerance.
    const double tol = kernel.options().tolerance;
    for (NodeId id = tree.level_begin(0); id < tree.level_end(h); ++id)
        if (bubble[id] < -tol)
            throw std::logic_error("internal invariant failed: retained-earnings part went negative");
    if (h > 0 && !is_martingale(bubble, tol, "bubble-martingale").pass)
        throw std::logic_error("internal invariant failed: retained-earnings part not a martingale");

    ValueDecomposition out{std::move(fundamental), std::move(bubble), 0.0, {}};
    out.transversality.reserve(static_cast<std::size_t>(h) + 1);
    AdaptedProcess deflated(kernel.tree_ptr(), 0, h);
    for (NodeId id = tree.level_begin(0); id < tree.level_end(h); ++id)
        deflated[id] = kernel[id] * value[id];
    for (int j = 0; j <= h; ++j) out.transversality.push_back(expectation(deflated, j));
    out.terminal_value = out.transversality.back();
    return out;
}

ValueDecomposition decompose_value(const PricingKernel& kernel, const AdaptedProcess& value) {
    const AdaptedProcess zero =
        AdaptedProcess::constant(kernel.tree_ptr(), 1, kernel.horizon(), 0.0);
    return decompose_value(kernel, value, zero);
}

TransversalityReport transversality_check(const PricingKernel& kernel, const AdaptedProcess& value,
                                          double tolerance) {
    const FiltrationTree& tree = kernel.tree();
    const int h = kernel.horizon();
    if (value.lo() != 0 || value.hi() != h)
        throw Error(Errc::InvalidArgument, "value process must cover depths 0..H");

    AdaptedProcess deflated(kernel.tree_ptr(), 0, h);
    for (NodeId id = tree.level_begin(0); id < tree.level_end(h); ++id) {
        if (value[id] < 0.0) throw Error(Errc::InvalidArgument, "value process must be non-negative");
        deflated[id] = kernel[id] * value[id];
    }

    TransversalityReport out;
    out.sequence.reserve(static_cast<std::size_t>(h) + 1);
    for (int j = 0; j <= h; ++j) out.sequence.push_back(expectation(deflated, j));
    for (std::size_t j = 1; j < out.sequence.size(); ++j)
        if (out.sequence[j] > out.sequence[j - 1]) out.nonincreasing = false;

    out.report.name = "transversality";
    out.report.tolerance = tolerance;
    out.report.max_violation = out.sequence.back();
    out.report.witness = NodeRef{h, kNoNode}; // the statistic is unconditional
    out.report.pass = out.report.max_violation <= tolerance;
    return out;
}

AdaptedProcess fx_price(const PricingKernel& kernel, const AdaptedProcess& dividends,
                        const AdaptedProcess& rate, double terminal_redemption) {
    check_dividend_range(kernel, dividends);
    const FiltrationTree& tree = kernel.tree();
    const int h = kernel.horizon();
    if (rate.lo() != 1 || rate.hi() != h)
        throw Error(Errc::InvalidArgument, "rate process must cover depths 1..H");
    for (NodeId id = tree.level_begin(1); id < tree.level_end(h); ++id)
        if (!(rate[id] > 0.0)) throw Error(Errc::InvalidArgument, "rate process must be positive");
    if (!is_previsible(dividends).pass)
        throw Error(Errc::NotPrevisible, "fx dividends must be previsible");
    if (!is_previsible(rate).pass) throw Error(Errc::NotPrevisible, "fx rate must be previsible");

    // Both legs carry the terminal residual E_i[pi_H]: the denominator then
    // telescopes to pi_i exactly, the numerator weights the residual by the
    // redemption, so D = r with unit redemption prices to 1 identically.
    const AdaptedProcess dividend_leg = deflated_dividend_value(kernel, dividends, 0.0);
    const AdaptedProcess rate_leg = deflated_dividend_value(kernel, rate, 0.0);
    AdaptedProcess residual(kernel.tree_ptr(), 0, h);
    for (NodeId id = tree.level_begin(h); id < tree.level_end(h); ++id) residual[id] = kernel[id];
    for (int k = h; k > 0; --k) {
        const std::vector<double> e = one_step_expectation(residual, k);
        const NodeId begin = tree.level_begin(k - 1);
        for (NodeId v = begin; v < tree.level_end(k - 1); ++v)
            residual[v] = e[static_cast<std::size_t>(v - begin)];
    }

    AdaptedProcess price(kernel.tree_ptr(), 0, h);
    for (NodeId id = tree.level_begin(0); id < tree.level_end(h); ++id)
        price[id] = (dividend_leg[id] + terminal_redemption * residual[id]) /
                    (rate_leg[id] + residual[id]);
    return price;
}

void write_price_csv(std::ostream& out, const AdaptedProcess& price,
                     const std::vector<double>& transversality) {
    const FiltrationTree& tree = price.tree();
    out << "depth,node,value\n";
    for (int d = price.lo(); d <= price.hi(); ++d)
        for (NodeId v = tree.level_begin(d); v < tree.level_end(d); ++v)
            out << d << ',' << v << ',' << format_sig12(price[v]) << '\n';
    for (std::size_t j = 0; j < transversality.size(); ++j)
        out << j << ",*," << format_sig12(transversality[j]) << '\n';
}

} // namespace pktree
