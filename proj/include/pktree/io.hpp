#pragma once

#include <string>

#include <json.hpp>

#include "pktree/process.hpp"

namespace pktree {

/// Shortest round-trip decimal form of a double (used for probability
/// strings in tree documents).
std::string format_exact(double value);
/// 12-significant-digit form used for all CLI-facing numeric output.
std::string format_sig12(double value);
/// Double nearest to the 12-significant-digit decimal form of `value`.
double round_sig12(double value);

/// Parses a probability string: plain decimal ("0.25") or fraction ("1/3").
double parse_probability_string(const std::string& text);

/// Tree document: {"depth": N, "nodes": [{"id", "depth", "parent",
/// "probability", "time"?}, ...]}. Probabilities are decimal strings; the
/// root's parent and probability are null. Nodes must be listed in canonical
/// breadth-first id order (the order save emits).
nlohmann::json tree_to_json(const FiltrationTree& tree);
FiltrationTree tree_from_json(const nlohmann::json& doc, double prob_tolerance = 1e-12);

/// Process document: {"lo", "hi", "values": {node id -> value}}.
nlohmann::json process_to_json(const AdaptedProcess& process);
AdaptedProcess process_from_json(const nlohmann::json& doc, const TreePtr& tree);

} // namespace pktree
