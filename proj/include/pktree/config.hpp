#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pktree/suite.hpp"

namespace pktree {

/// One asset declared in a model configuration.
struct ConfiguredAsset {
    enum class Kind { Frn, Dividend, MoneyMarket, Fx };

    std::string id;
    Kind kind = Kind::Frn;
    std::optional<AdaptedProcess> dividends; // Dividend / Fx
    double redemption = 0.0;
    std::optional<AdaptedProcess> value;     // given S for decomposition
};

/// A fully built model: tree, validated kernel, declared assets, and any
/// provenance needed for closed-form cross-checks.
struct BuiltModel {
    TreePtr tree;
    PricingKernel kernel;
    std::optional<RationalParts> rational;
    std::optional<AdaptedProcess> increasing_driver;
    std::vector<ConfiguredAsset> assets;
    double tolerance = 1e-10;
};

/// Parses and builds a model from a configuration document. Schema errors
/// raise ConfigParseError with a field path in the message; model-validation
/// failures raise their own codes (NotStrictSupermartingale, ...).
BuiltModel build_model(const nlohmann::json& config);

/// Reads the file, parses JSON (ConfigParseError on syntax errors with
/// line diagnostics) and builds the model.
BuiltModel load_model(const std::string& path);

} // namespace pktree
