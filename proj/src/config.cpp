#include "pktree/config.hpp"

#include <fstream>
#include <set>
#include <utility>

#include "pktree/io.hpp"
#include "pktree/models.hpp"

namespace pktree {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& context, const std::string& what) {
    throw Error(Errc::ConfigParseError, context + ": " + what);
}

const json& field(const json& obj, const char* key, const std::string& context) {
    if (!obj.is_object() || !obj.contains(key)) fail(context, std::string("missing '") + key + "'");
    return obj[key];
}

double number(const json& v, const std::string& context) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return parse_probability_string(v.get<std::string>());
    fail(context, "expected a number or decimal string");
}

std::string text(const json& v, const std::string& context) {
    if (!v.is_string()) fail(context, "expected a string");
    return v.get<std::string>();
}

int integer(const json& v, const std::string& context) {
    if (!v.is_number_integer()) fail(context, "expected an integer");
    return v.get<int>();
}

std::optional<std::vector<double>> parse_times(const json& spec, const std::string& context) {
    if (!spec.contains("times")) return std::nullopt;
    const json& t = spec["times"];
    if (!t.is_array()) fail(context + ".times", "expected an array");
    std::vector<double> out;
    for (const json& v : t) out.push_back(number(v, context + ".times"));
    return out;
}

Schedule parse_schedule(const json& spec, int depth, const std::string& context) {
    const std::string kind = text(field(spec, "kind", context), context + ".kind");
    if (kind == "geometric") {
        return Schedule::geometric(number(field(spec, "initial", context), context + ".initial"),
                                   number(field(spec, "ratio", context), context + ".ratio"), depth);
    }
    if (kind == "explicit") {
        const json& values = field(spec, "values", context);
        if (!values.is_array()) fail(context + ".values", "expected an array");
        std::vector<double> out;
        for (const json& v : values) out.push_back(number(v, context + ".values"));
        return Schedule::from_values(std::move(out));
    }
    fail(context + ".kind", "unknown schedule kind '" + kind + "'");
}

// Process specs come in two shapes: per-depth values broadcast across each
// level ("by_depth", deterministic hence previsible), or one value per node
// ("by_node" with lo/hi, same layout as the process document).
AdaptedProcess parse_process(const json& spec, const TreePtr& tree, int default_lo,
                             const std::string& context) {
    if (spec.contains("by_depth")) {
        const json& values = spec["by_depth"];
        if (!values.is_array() || values.empty()) fail(context + ".by_depth", "expected a non-empty array");
        const int lo = spec.contains("lo") ? integer(spec["lo"], context + ".lo") : default_lo;
        const int hi = lo + static_cast<int>(values.size()) - 1;
        if (lo < 0 || hi > tree->depth()) fail(context, "depth range outside the tree");
        AdaptedProcess out(tree, lo, hi);
        for (int d = lo; d <= hi; ++d) {
            const double v = number(values[static_cast<std::size_t>(d - lo)], context + ".by_depth");
            for (NodeId id = tree->level_begin(d); id < tree->level_end(d); ++id) out[id] = v;
        }
        return out;
    }
    if (spec.contains("by_node")) return process_from_json(spec["by_node"], tree);
    fail(context, "expected 'by_depth' or 'by_node'");
}

struct TreeParts {
    TreePtr tree;
    std::optional<BranchingModel> branching;
};

TreeParts parse_tree(const json& spec, const std::string& context) {
    const std::string kind = text(field(spec, "kind", context), context + ".kind");
    if (kind == "chain") {
        const int depth = integer(field(spec, "depth", context), context + ".depth");
        return {std::make_shared<const FiltrationTree>(
                    make_chain(depth, parse_times(spec, context))),
                std::nullopt};
    }
    if (kind == "binomial") {
        const int depth = integer(field(spec, "depth", context), context + ".depth");
        const double p = number(field(spec, "p", context), context + ".p");
        return {std::make_shared<const FiltrationTree>(
                    make_binomial(depth, p, parse_times(spec, context))),
                std::nullopt};
    }
    if (kind == "uniform") {
        const json& counts = field(spec, "child_counts", context);
        const json& probs = field(spec, "probabilities", context);
        if (!counts.is_array() || !probs.is_array()) fail(context, "expected arrays");
        std::vector<int> child_counts;
        for (const json& c : counts) child_counts.push_back(integer(c, context + ".child_counts"));
        std::vector<std::vector<double>> child_probs;
        for (const json& level : probs) {
            if (!level.is_array()) fail(context + ".probabilities", "expected arrays per level");
            std::vector<double> row;
            for (const json& p : level) row.push_back(number(p, context + ".probabilities"));
            child_probs.push_back(std::move(row));
        }
        return {std::make_shared<const FiltrationTree>(
                    build_tree(child_counts, child_probs, parse_times(spec, context))),
                std::nullopt};
    }
    if (kind == "explicit") {
        return {std::make_shared<const FiltrationTree>(tree_from_json(spec)), std::nullopt};
    }
    if (kind == "branching") {
        const int depth = integer(field(spec, "depth", context), context + ".depth");
        const json& pmf_spec = field(spec, "offspring", context);
        if (!pmf_spec.is_object()) fail(context + ".offspring", "expected {count: probability}");
        OffspringDistribution offspring;
        for (const auto& [key, value] : pmf_spec.items()) {
            try {
                offspring.pmf[std::stoi(key)] = number(value, context + ".offspring");
            } catch (const std::invalid_argument&) {
                fail(context + ".offspring", "offspring count '" + key + "' is not an integer");
            }
        }
        const int z0 = spec.contains("initial_population")
                           ? integer(spec["initial_population"], context + ".initial_population")
                           : 1;
        const std::size_t cap = spec.contains("max_nodes")
                                    ? static_cast<std::size_t>(
                                          integer(spec["max_nodes"], context + ".max_nodes"))
                                    : 100000;
        BranchingModel model = branching_martingale(offspring, z0, depth, cap);
        TreePtr tree = model.tree;
        return {std::move(tree), std::move(model)};
    }
    fail(context + ".kind", "unknown tree kind '" + kind + "'");
}

AdaptedProcess parse_martingale(const json& spec, const TreeParts& parts,
                                const std::string& context) {
    const std::string kind = text(field(spec, "kind", context), context + ".kind");
    if (kind == "binomial") {
        return binomial_martingale(parts.tree, number(field(spec, "up", context), context + ".up"),
                                   number(field(spec, "down", context), context + ".down"),
                                   number(field(spec, "p", context), context + ".p"),
                                   number(field(spec, "initial", context), context + ".initial"));
    }
    if (kind == "constant") {
        const double value = number(field(spec, "value", context), context + ".value");
        if (!(value > 0.0)) fail(context + ".value", "must be positive");
        return AdaptedProcess::constant(parts.tree, 0, parts.tree->depth(), value);
    }
    if (kind == "branching") {
        if (!parts.branching) fail(context, "'branching' martingale needs a branching tree");
        return parts.branching->martingale;
    }
    if (kind == "by_node") return process_from_json(field(spec, "values", context), parts.tree);
    fail(context + ".kind", "unknown martingale kind '" + kind + "'");
}

} // namespace

BuiltModel build_model(const json& config) {
    if (!config.is_object()) throw Error(Errc::ConfigParseError, "config must be a JSON object");

    double tolerance = 1e-10;
    if (config.contains("tolerance")) tolerance = number(config["tolerance"], "tolerance");
    KernelOptions options;
    options.tolerance = tolerance;

    TreeParts parts = parse_tree(field(config, "tree", "config"), "tree");
    const TreePtr& tree = parts.tree;

    const json& kernel_spec = field(config, "kernel", "config");
    const std::string kernel_kind = text(field(kernel_spec, "kind", "kernel"), "kernel.kind");

    std::optional<RationalParts> rational;
    std::optional<AdaptedProcess> driver;
    std::optional<PricingKernel> kernel;
    if (kernel_kind == "rational") {
        Schedule alpha = parse_schedule(field(kernel_spec, "alpha", "kernel"), tree->depth(),
                                        "kernel.alpha");
        Schedule beta = parse_schedule(field(kernel_spec, "beta", "kernel"), tree->depth(),
                                       "kernel.beta");
        AdaptedProcess martingale =
            parse_martingale(field(kernel_spec, "martingale", "kernel"), parts, "kernel.martingale");
        kernel = kernel_rational(tree, alpha, beta, martingale, options);
        rational = RationalParts{std::move(alpha), std::move(beta), std::move(martingale)};
    } else if (kernel_kind == "from_increasing") {
        AdaptedProcess g = parse_process(kernel_spec, tree, 0, "kernel");
        if (g.lo() != 0 || g.hi() != tree->depth())
            fail("kernel", "increasing driver must cover depths 0..N");
        IncreasingDriverResult result = kernel_from_increasing(g, options);
        kernel = std::move(result.kernel);
        driver = std::move(g);
    } else if (kernel_kind == "explicit") {
        AdaptedProcess pi = parse_process(kernel_spec, tree, 0, "kernel");
        kernel = kernel_from_process(std::move(pi), options);
    } else {
        fail("kernel.kind", "unknown kernel kind '" + kernel_kind + "'");
    }

    BuiltModel model{tree, std::move(*kernel), std::move(rational), std::move(driver), {}, tolerance};

    if (config.contains("assets")) {
        const json& assets = config["assets"];
        if (!assets.is_array()) fail("assets", "expected an array");
        std::set<std::string> ids;
        for (std::size_t k = 0; k < assets.size(); ++k) {
            const json& spec = assets[k];
            const std::string context = "assets[" + std::to_string(k) + "]";
            ConfiguredAsset asset;
            asset.id = text(field(spec, "id", context), context + ".id");
            if (!ids.insert(asset.id).second) fail(context + ".id", "duplicate asset id");
            const std::string kind = text(field(spec, "kind", context), context + ".kind");
            if (kind == "frn") {
                asset.kind = ConfiguredAsset::Kind::Frn;
                asset.redemption = 1.0;
            } else if (kind == "money_market") {
                asset.kind = ConfiguredAsset::Kind::MoneyMarket;
            } else if (kind == "dividend") {
                asset.kind = ConfiguredAsset::Kind::Dividend;
                asset.dividends =
                    parse_process(field(spec, "dividends", context), tree, 1, context + ".dividends");
                if (spec.contains("redemption"))
                    asset.redemption = number(spec["redemption"], context + ".redemption");
                if (spec.contains("value"))
                    asset.value = parse_process(spec["value"], tree, 0, context + ".value");
            } else if (kind == "fx") {
                asset.kind = ConfiguredAsset::Kind::Fx;
                asset.dividends = parse_process(field(spec, "foreign_rate", context), tree, 1,
                                                context + ".foreign_rate");
                asset.redemption = 1.0;
                if (spec.contains("redemption"))
                    asset.redemption = number(spec["redemption"], context + ".redemption");
            } else {
                fail(context + ".kind", "unknown asset kind '" + kind + "'");
            }
            model.assets.push_back(std::move(asset));
        }
    }
    return model;
}

BuiltModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::ConfigParseError, "cannot open '" + path + "'");
    json config;
    try {
        config = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(Errc::ConfigParseError, e.what());
    }
    return build_model(config);
}

} // namespace pktree
