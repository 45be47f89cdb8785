#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "causality/classify.hpp"

namespace causality {

using json = nlohmann::json;

/// {"labels": [...], "reach": [[bool, ...], ...]}
json to_json(const Preorder& order);
/// Accepts the object form or a builtin order string such as "diamond".
Preorder preorder_from_json(const json& j);

/// {"events": [...], "inputs": {"A": [0, 1]}, "histories": [{"A": 0}, ...]}.
/// Input lists other than 0..k-1 become value names.
json to_json(const HistorySpace& space);
/// Also accepts {"order": <order>, "inputs": k} for an induced space.
HistorySpace space_from_json(const json& j);

json to_json(const Stats& s);

/// A file path holding JSON, otherwise a builtin order name.
Preorder load_order(const std::string& arg);
HistorySpace load_space(const std::string& path);
json read_json(const std::string& path);
void write_text(const std::string& path, const std::string& text);

std::string hasse_dot(const Preorder& order);
/// Extended histories included in grey when `extended` is set.
std::string space_dot(const HistorySpace& space, bool colour_tips, bool extended);
std::string hierarchy_dot(const HierarchyGraph& graph, const Stats& s);

/// One record per line, comma-separated decimal codes, lines sorted.
std::string codes_text(std::span<const CanonicalCode> codes);
std::vector<CanonicalCode> read_codes(const std::string& path);

}  // namespace causality
