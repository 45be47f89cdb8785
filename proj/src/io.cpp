#include "causality/io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace causality {

json to_json(const Preorder& order) {
  json reach = json::array();
  for (std::size_t i = 0; i < order.size(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < order.size(); ++j) row.push_back(order.leq(i, j));
    reach.push_back(std::move(row));
  }
  return {{"labels", order.events().labels()}, {"reach", reach}};
}

Preorder preorder_from_json(const json& j) {
  if (j.is_string()) return builtin_order(j.get<std::string>());
  try {
    EventSet events(j.at("labels").get<std::vector<std::string>>());
    const json& reach = j.at("reach");
    if (reach.size() != events.size()) throw Error("reach matrix must have one row per label");
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < events.size(); ++i) {
      if (reach[i].size() != events.size()) throw Error("reach matrix must be square");
      for (std::size_t k = 0; k < events.size(); ++k) {
        if (reach[i][k].get<bool>()) pairs.emplace_back(i, k);
      }
    }
    Preorder order = Preorder::from_pairs(events, pairs);
    // a reach matrix must already be reflexive and transitive
    for (std::size_t i = 0; i < events.size(); ++i) {
      for (std::size_t k = 0; k < events.size(); ++k) {
        if (order.leq(i, k) != reach[i][k].get<bool>()) {
          throw Error("reach matrix is not a preorder (not reflexive and transitive)");
        }
      }
    }
    return order;
  } catch (const json::exception& e) {
    throw Error(std::string("bad order JSON: ") + e.what());
  }
}

json to_json(const HistorySpace& space) {
  const InputFamily& f = space.family();
  json inputs = json::object();
  for (std::size_t i = 0; i < f.size(); ++i) {
    json values = json::array();
    for (std::size_t v = 0; v < f.input_count(i); ++v) {
      if (f.value_names(i).empty()) {
        values.push_back(v);
      } else {
        values.push_back(f.value_names(i)[v]);
      }
    }
    inputs[f.events().label(i)] = values;
  }
  json histories = json::array();
  for (const auto& h : space.histories()) {
    json entry = json::object();
    for (std::size_t i = 0; i < h.arity(); ++i) {
      if (!h.defined(i)) continue;
      const auto v = static_cast<std::size_t>(h.at(i));
      if (f.value_names(i).empty()) {
        entry[f.events().label(i)] = v;
      } else {
        entry[f.events().label(i)] = f.value_names(i)[v];
      }
    }
    histories.push_back(entry);
  }
  return {{"events", f.events().labels()}, {"inputs", inputs}, {"histories", histories}};
}

namespace {

std::string value_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw Error("input values must be integers or strings");
}

}  // namespace

HistorySpace space_from_json(const json& j) {
  try {
    if (j.contains("order")) {
      const Preorder order = preorder_from_json(j.at("order"));
      return induce(order, InputFamily::uniform(order.events(), j.at("inputs").get<std::size_t>()));
    }
    EventSet events(j.at("events").get<std::vector<std::string>>());
    const json& inputs = j.at("inputs");
    std::vector<std::size_t> counts;
    std::vector<std::vector<std::string>> names(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
      const json& values = inputs.at(events.label(i));
      counts.push_back(values.size());
      bool plain = true;
      for (std::size_t v = 0; v < values.size(); ++v) {
        names[i].push_back(value_text(values[v]));
        plain = plain && values[v].is_number_integer() && values[v].get<long long>() == static_cast<long long>(v);
      }
      if (plain) names[i].clear();
    }
    InputFamily family(events, counts);
    for (std::size_t i = 0; i < events.size(); ++i) {
      if (!names[i].empty()) family.set_value_names(i, names[i]);
    }
    std::vector<PartialFunction> hs;
    for (const json& entry : j.at("histories")) {
      PartialFunction h(events.size());
      for (const auto& [label, value] : entry.items()) {
        const std::size_t e = events.index_of(label);
        h.set(e, family.parse_value(e, value_text(value)));
      }
      hs.push_back(h);
    }
    return HistorySpace(family, std::move(hs));
  } catch (const json::exception& e) {
    throw Error(std::string("bad space JSON: ") + e.what());
  }
}

json to_json(const Stats& s) {
  return {{"spaces", s.spaces},
          {"classes", s.classes},
          {"tight_classes", s.tight_classes},
          {"nontight_classes", s.nontight_classes},
          {"no_fixed_definite_classes", s.no_fixed_definite_classes},
          {"order_induced_classes", s.order_induced_classes},
          {"maxima_classes", s.maxima_classes}};
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error("bad JSON in " + path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + path);
}

Preorder load_order(const std::string& arg) {
  if (std::filesystem::is_regular_file(arg)) return preorder_from_json(read_json(arg));
  return builtin_order(arg);
}

HistorySpace load_space(const std::string& path) { return space_from_json(read_json(path)); }

// ---------------------------------------------------------------------------

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};

}  // namespace

std::string hasse_dot(const Preorder& order) {
  const HasseDiagram d = hasse_diagram(order);
  std::ostringstream os;
  os << "digraph order {\n  rankdir=BT;\n  node [shape=plaintext];\n";
  for (std::size_t c = 0; c < d.classes.size(); ++c) {
    const auto labels = order.events().labels_of(d.classes[c]);
    std::string name;
    for (const auto& l : labels) name += (name.empty() ? "" : ",") + l;
    if (labels.size() > 1) name = "{" + name + "}";
    os << "  n" << c << " [label=" << quoted(name) << "];\n";
  }
  for (const auto& [lo, hi] : d.edges) os << "  n" << lo << " -> n" << hi << ";\n";
  os << "}\n";
  return os.str();
}

std::string space_dot(const HistorySpace& space, bool colour_tips, bool extended) {
  const TipReport report = tips(space);
  std::vector<PartialFunction> shown;
  for (const auto& h : report.histories) {
    if (extended || space.contains(h)) shown.push_back(h);
  }
  std::ostringstream os;
  os << "digraph space {\n  rankdir=BT;\n  node [shape=box, style=filled, fillcolor=white];\n";
  for (std::size_t i = 0; i < shown.size(); ++i) {
    const PartialFunction& h = shown[i];
    os << "  h" << i << " [label=" << quoted(to_text(space.family(), h));
    if (!space.contains(h)) {
      os << ", fillcolor=grey85, fontcolor=grey40";
    } else if (colour_tips) {
      const EventMask t = report.tips_of(h);
      if (std::popcount(t) == 1) {
        os << ", color=" << quoted(kPalette[std::countr_zero(t) % std::size(kPalette)]) << ", penwidth=2";
      } else {
        os << ", color=black, penwidth=2, style=\"filled,dashed\"";
      }
    }
    os << "];\n";
  }
  for (std::size_t i = 0; i < shown.size(); ++i) {
    for (std::size_t j = 0; j < shown.size(); ++j) {
      if (i == j || !leq(shown[i], shown[j])) continue;
      const bool covered = std::none_of(shown.begin(), shown.end(), [&](const PartialFunction& k) {
        return k != shown[i] && k != shown[j] && leq(shown[i], k) && leq(k, shown[j]);
      });
      if (covered) os << "  h" << i << " -> h" << j << ";\n";
    }
  }
  os << "}\n";
  return os.str();
}

std::string hierarchy_dot(const HierarchyGraph& graph, const Stats& s) {
  std::ostringstream os;
  os << "digraph hierarchy {\n  rankdir=BT;\n  node [shape=ellipse];\n";
  for (std::size_t c = 0; c < graph.classes.size(); ++c) {
    const ClassInfo& info = s.per_class.at(c);
    os << "  c" << c << " [label=\"" << c << " (" << info.size << ")\"";
    if (info.order_induced) {
      os << ", penwidth=3, color=black";
    } else if (!info.tight) {
      os << ", penwidth=1, color=purple";
    }
    os << "];\n";
  }
  for (const auto& [lo, hi] : graph.class_edges) os << "  c" << lo << " -> c" << hi << ";\n";
  os << "}\n";
  return os.str();
}

std::string codes_text(std::span<const CanonicalCode> codes) {
  std::vector<std::string> lines;
  for (const auto& c : codes) {
    std::string line;
    for (std::size_t i = 0; i < c.size(); ++i) line += (i ? "," : "") + std::to_string(c[i]);
    lines.push_back(std::move(line));
  }
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l + '\n';
  return out;
}

std::vector<CanonicalCode> read_codes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::vector<CanonicalCode> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    CanonicalCode code;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) code.push_back(std::stoull(item));
    out.push_back(std::move(code));
  }
  return out;
}

}  // namespace causality
