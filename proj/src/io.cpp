#include "pktree/io.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>

namespace pktree {

std::string format_exact(double value) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw Error(Errc::InvalidArgument, "value not representable");
    return std::string(buf, end);
}

std::string format_sig12(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

double round_sig12(double value) { return std::strtod(format_sig12(value).c_str(), nullptr); }

double parse_probability_string(const std::string& text) {
    const auto slash = text.find('/');
    char* end = nullptr;
    if (slash != std::string::npos) {
        const double num = std::strtod(text.c_str(), &end);
        const double den = std::strtod(text.c_str() + slash + 1, &end);
        if (!(den > 0.0)) throw Error(Errc::ConfigParseError, "bad fraction '" + text + "'");
        return num / den;
    }
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str()) throw Error(Errc::ConfigParseError, "bad number '" + text + "'");
    return v;
}

nlohmann::json tree_to_json(const FiltrationTree& tree) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const TreeNode& n : tree.nodes()) {
        nlohmann::json entry{{"id", n.id}, {"depth", n.depth}};
        if (n.parent == kNoNode) {
            entry["parent"] = nullptr;
            entry["probability"] = nullptr;
        } else {
            entry["parent"] = n.parent;
            entry["probability"] = format_exact(n.prob_from_parent);
        }
        if (tree.has_times()) entry["time"] = tree.time(n.depth);
        nodes.push_back(std::move(entry));
    }
    return nlohmann::json{{"depth", tree.depth()}, {"nodes", std::move(nodes)}};
}

FiltrationTree tree_from_json(const nlohmann::json& doc, double prob_tolerance) {
    if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array())
        throw Error(Errc::ConfigParseError, "tree document needs a 'nodes' array");

    TreeBuilder builder;
    std::vector<double> times;
    bool any_time = false;
    NodeId expected = 0;
    for (const nlohmann::json& entry : doc["nodes"]) {
        if (!entry.contains("id") || !entry.contains("depth"))
            throw Error(Errc::ConfigParseError, "tree node needs 'id' and 'depth'");
        const NodeId id = entry["id"].get<NodeId>();
        const int depth = entry["depth"].get<int>();
        if (id != expected)
            throw Error(Errc::ConfigParseError,
                        "node ids must follow canonical breadth-first order (saw " +
                            std::to_string(id) + ", expected " + std::to_string(expected) + ")");
        if (depth == 0) {
            if (id != 0) throw Error(Errc::ConfigParseError, "the root must carry id 0");
        } else {
            if (!entry.contains("parent") || entry["parent"].is_null())
                throw Error(Errc::ConfigParseError, "non-root node needs a parent");
            const NodeId parent = entry["parent"].get<NodeId>();
            if (!entry.contains("probability"))
                throw Error(Errc::ConfigParseError, "non-root node needs a probability");
            const double p = entry["probability"].is_string()
                                 ? parse_probability_string(entry["probability"].get<std::string>())
                                 : entry["probability"].get<double>();
            const NodeId got = builder.add_child(parent, p);
            if (got != id)
                throw Error(Errc::ConfigParseError,
                            "node ids must follow canonical breadth-first order");
        }
        if (entry.contains("time") && !entry["time"].is_null()) {
            const double t = entry["time"].get<double>();
            if (static_cast<std::size_t>(depth) >= times.size()) times.resize(static_cast<std::size_t>(depth) + 1);
            times[static_cast<std::size_t>(depth)] = t;
            any_time = true;
        }
        ++expected;
    }
    if (any_time) builder.set_times(std::move(times));

    FiltrationTree tree = builder.build(prob_tolerance);
    if (doc.contains("depth") && doc["depth"].get<int>() != tree.depth())
        throw Error(Errc::ConfigParseError, "declared depth does not match the node list");
    return tree;
}

nlohmann::json process_to_json(const AdaptedProcess& process) {
    nlohmann::json values = nlohmann::json::object();
    const FiltrationTree& tree = process.tree();
    for (NodeId id = tree.level_begin(process.lo()); id < tree.level_end(process.hi()); ++id)
        values[std::to_string(id)] = process[id];
    return nlohmann::json{{"lo", process.lo()}, {"hi", process.hi()}, {"values", std::move(values)}};
}

AdaptedProcess process_from_json(const nlohmann::json& doc, const TreePtr& tree) {
    if (!doc.is_object() || !doc.contains("lo") || !doc.contains("hi") || !doc.contains("values"))
        throw Error(Errc::ConfigParseError, "process document needs 'lo', 'hi' and 'values'");
    AdaptedProcess process(tree, doc["lo"].get<int>(), doc["hi"].get<int>());
    std::vector<bool> seen(tree->node_count(), false);
    for (const auto& [key, value] : doc["values"].items()) {
        const long id = std::strtol(key.c_str(), nullptr, 10);
        if (id < 0 || static_cast<std::size_t>(id) >= tree->node_count())
            throw Error(Errc::ConfigParseError, "process value for unknown node " + key);
        const int depth = tree->depth_of(static_cast<NodeId>(id));
        if (!process.defined_at(depth))
            throw Error(Errc::ConfigParseError, "process value for node " + key + " outside [lo, hi]");
        process[static_cast<NodeId>(id)] = value.get<double>();
        seen[static_cast<std::size_t>(id)] = true;
    }
    for (NodeId id = tree->level_begin(process.lo()); id < tree->level_end(process.hi()); ++id)
        if (!seen[static_cast<std::size_t>(id)])
            throw Error(Errc::ConfigParseError, "missing process value for node " + std::to_string(id));
    process.require_finite();
    return process;
}

} // namespace pktree
