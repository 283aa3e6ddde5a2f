#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pktree/assets.hpp"
#include "pktree/bonds.hpp"
#include "pktree/config.hpp"
#include "pktree/io.hpp"
#include "pktree/suite.hpp"

namespace {

using nlohmann::json;
using namespace pktree;

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;

json report_entry(const CheckReport& check) {
    json entry{{"name", check.name},
               {"pass", check.pass},
               {"max_violation", round_sig12(check.max_violation)},
               {"tolerance", round_sig12(check.tolerance)}};
    if (check.witness.id != kNoNode)
        entry["witness"] = json{{"depth", check.witness.depth}, {"node", check.witness.id}};
    return entry;
}

json process_entry(const AdaptedProcess& process) {
    json values = json::object();
    const FiltrationTree& tree = process.tree();
    for (NodeId id = tree.level_begin(process.lo()); id < tree.level_end(process.hi()); ++id)
        values[std::to_string(id)] = round_sig12(process[id]);
    return json{{"lo", process.lo()}, {"hi", process.hi()}, {"values", std::move(values)}};
}

// Reports go to --out when given (summary to stdout); otherwise the report
// itself goes to stdout and the summary to stderr.
struct OutputTarget {
    std::optional<std::string> path;

    int write(const std::string& payload, const std::string& summary) const {
        if (path) {
            std::ofstream out(*path, std::ios::binary);
            if (!out) {
                std::cerr << "cannot write to '" << *path << "'\n";
                return kExitUsage;
            }
            out << payload;
            std::cout << summary;
        } else {
            std::cout << payload;
            std::cerr << summary;
        }
        return kExitPass;
    }
};

BuiltModel load_with_tolerance(const std::string& config_path, std::optional<double> tolerance) {
    std::ifstream in(config_path);
    if (!in) throw Error(Errc::ConfigParseError, "cannot open '" + config_path + "'");
    json config;
    try {
        config = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(Errc::ConfigParseError, e.what());
    }
    if (tolerance) config["tolerance"] = *tolerance;
    return build_model(config);
}

std::vector<CheckReport> asset_checks(const BuiltModel& model) {
    std::vector<CheckReport> checks;
    const PricingKernel& kernel = model.kernel;
    for (const ConfiguredAsset& asset : model.assets) {
        if (asset.kind == ConfiguredAsset::Kind::Dividend && asset.value) {
            CheckReport check;
            check.name = "asset-" + asset.id + "-deflated-gains-martingale";
            check.tolerance = kernel.options().tolerance;
            try {
                decompose_value(kernel, *asset.value, *asset.dividends);
                check.pass = true;
            } catch (const Error& e) {
                if (e.code() != Errc::AxiomAViolation) throw;
                check.pass = false;
                check.max_violation = std::numeric_limits<double>::quiet_NaN();
            }
            checks.push_back(std::move(check));
        }
    }
    return checks;
}

int cmd_check(const std::string& config_path, std::optional<double> tolerance,
              const OutputTarget& target) {
    json report;
    bool pass = false;
    try {
        const BuiltModel model = load_with_tolerance(config_path, tolerance);
        std::vector<CheckReport> checks =
            run_check_suite(model.kernel, model.rational,
                            model.increasing_driver ? &*model.increasing_driver : nullptr);
        for (CheckReport& check : asset_checks(model)) checks.push_back(std::move(check));

        pass = all_pass(checks);
        report["checks"] = json::array();
        for (const CheckReport& check : checks) report["checks"].push_back(report_entry(check));
        report["pass"] = pass;
    } catch (const Error& e) {
        if (e.code() == Errc::ConfigParseError) throw; // usage problem, not a model failure
        report["checks"] = json::array({json{{"name", errc_name(e.code())},
                                             {"pass", false},
                                             {"message", e.what()}}});
        report["pass"] = false;
    }

    std::ostringstream summary;
    for (const json& entry : report["checks"]) {
        summary << (entry["pass"].get<bool>() ? "PASS " : "FAIL ") << entry["name"].get<std::string>();
        if (entry.contains("max_violation") && !entry["max_violation"].is_null())
            summary << " (max violation " << format_sig12(entry["max_violation"].get<double>())
                    << ")";
        summary << "\n";
    }
    summary << (pass ? "ALL CHECKS PASSED\n" : "CHECK FAILURES PRESENT\n");

    const int rc = target.write(report.dump(2) + "\n", summary.str());
    if (rc != kExitPass) return rc;
    return pass ? kExitPass : kExitCheckFailure;
}

int cmd_curve(const std::string& config_path, int from, std::optional<double> tolerance,
              const OutputTarget& target) {
    const BuiltModel model = load_with_tolerance(config_path, tolerance);
    const BondSurface surface = bond_surface(model.kernel);
    std::ostringstream csv;
    write_curve_csv(csv, surface, from);
    return target.write(csv.str(), "");
}

int cmd_price(const std::string& config_path, const std::string& asset_id,
              std::optional<double> tolerance, const OutputTarget& target) {
    const BuiltModel model = load_with_tolerance(config_path, tolerance);
    const ConfiguredAsset* asset = nullptr;
    for (const ConfiguredAsset& a : model.assets)
        if (a.id == asset_id) asset = &a;
    if (!asset) throw Error(Errc::ConfigParseError, "no asset with id '" + asset_id + "'");

    const PricingKernel& kernel = model.kernel;
    std::optional<AdaptedProcess> price;
    switch (asset->kind) {
        case ConfiguredAsset::Kind::Frn:
            price = price_fundamental(kernel, short_rate(kernel), 1.0);
            break;
        case ConfiguredAsset::Kind::Dividend:
            if (asset->value)
                price = *asset->value;
            else
                price = price_fundamental(kernel, *asset->dividends, asset->redemption);
            break;
        case ConfiguredAsset::Kind::MoneyMarket:
            price = multiplicative_decomposition(kernel).money_market.account;
            break;
        case ConfiguredAsset::Kind::Fx:
            price = fx_price(kernel, *asset->dividends, short_rate(kernel), asset->redemption);
            break;
    }

    const TransversalityReport trans =
        transversality_check(kernel, *price, model.tolerance);
    std::ostringstream csv;
    write_price_csv(csv, *price, trans.sequence);

    std::ostringstream summary;
    summary << "asset " << asset->id << ": terminal E[pi_H S_H] = "
            << format_sig12(trans.sequence.back())
            << (trans.report.pass ? " (transversality holds)\n" : " -> BUBBLE\n");
    return target.write(csv.str(), summary.str());
}

int cmd_decompose(const std::string& config_path, std::optional<double> tolerance,
                  const OutputTarget& target) {
    const BuiltModel model = load_with_tolerance(config_path, tolerance);
    const PricingKernel& kernel = model.kernel;

    const MultiplicativeDecomposition decomp = multiplicative_decomposition(kernel);
    const DoobDecomposition doob = doob_decomposition(kernel);
    const FHFamily family = fh_extract(kernel);

    json fh = json::array();
    for (int n = 1; n <= family.horizon() + 1; ++n) fh.push_back(process_entry(family.column(n)));

    const json report{
        {"kernel", process_entry(kernel.values())},
        {"account", process_entry(decomp.money_market.account)},
        {"short_rate", process_entry(decomp.money_market.short_rate)},
        {"rho", process_entry(decomp.rho)},
        {"doob_compensator", process_entry(doob.compensator)},
        {"doob_residual", process_entry(doob.residual)},
        {"fh_columns", std::move(fh)},
        {"checks",
         json{{"rho_martingale",
               report_entry(is_martingale(decomp.rho, kernel.options().tolerance, "rho-martingale"))},
              {"account_previsible",
               report_entry(is_previsible(decomp.money_market.short_rate, 0.0, "rate-previsible"))}}},
    };

    std::ostringstream summary;
    summary << "decomposition of a horizon-" << kernel.horizon() << " kernel written\n";
    return target.write(report.dump(2) + "\n", summary.str());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete-time pricing-kernel engine: builds kernels on event trees, "
                 "verifies their structural identities, and emits curves and decompositions"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<double> tolerance;
    OutputTarget target;
    int from = 0;
    std::string asset_id;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "model configuration document")->required();
        cmd->add_option("--tolerance", tolerance, "override the configured check tolerance");
        cmd->add_option("--out", target.path, "write the report here instead of stdout");
    };

    CLI::App* check = app.add_subcommand("check", "run the full identity suite");
    add_common(check);
    CLI::App* curve = app.add_subcommand("curve", "emit discount factors and per-period rates");
    add_common(curve);
    curve->add_option("--from", from, "valuation depth i (default 0)");
    CLI::App* price = app.add_subcommand("price", "price one configured asset");
    add_common(price);
    price->add_option("--asset", asset_id, "asset id from the configuration")->required();
    CLI::App* decompose = app.add_subcommand("decompose", "emit account/martingale decompositions");
    add_common(decompose);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (check->parsed()) return cmd_check(config_path, tolerance, target);
        if (curve->parsed()) return cmd_curve(config_path, from, tolerance, target);
        if (price->parsed()) return cmd_price(config_path, asset_id, tolerance, target);
        if (decompose->parsed()) return cmd_decompose(config_path, tolerance, target);
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return e.code() == Errc::ConfigParseError ? kExitUsage : kExitCheckFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCheckFailure;
    }
    return kExitUsage;
}
