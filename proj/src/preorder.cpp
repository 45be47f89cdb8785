#include "causality/preorder.hpp"

#include <algorithm>
#include <bit>
#include <set>

namespace causality {

EventSet::EventSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.size() > kMaxOrderEvents) {
    throw Error("event set too large: " + std::to_string(labels_.size()));
  }
  std::set<std::string> seen;
  for (const auto& l : labels_) {
    if (l.empty()) throw Error("empty event label");
    if (!seen.insert(l).second) throw Error("duplicate event label: " + l);
  }
}

EventSet EventSet::letters(std::size_t n) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels.push_back(i < 26 ? std::string(1, static_cast<char>('A' + i)) : "E" + std::to_string(i));
  }
  return EventSet(std::move(labels));
}

std::optional<std::size_t> EventSet::find(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

std::size_t EventSet::index_of(const std::string& label) const {
  auto i = find(label);
  if (!i) throw Error("unknown event: " + label);
  return *i;
}

EventMask EventSet::mask_of(std::span<const std::string> labels) const {
  EventMask m = 0;
  for (const auto& l : labels) m |= bit(index_of(l));
  return m;
}

std::vector<std::string> EventSet::labels_of(EventMask mask) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (mask & bit(i)) out.push_back(labels_[i]);
  }
  return out;
}

bool EventSet::same_members(const EventSet& other) const {
  if (size() != other.size()) return false;
  return std::all_of(labels_.begin(), labels_.end(),
                     [&](const std::string& l) { return other.contains(l); });
}

const char* to_string(CausalRelation r) {
  switch (r) {
    case CausalRelation::Precedes: return "precedes";
    case CausalRelation::Succeeds: return "succeeds";
    case CausalRelation::Unrelated: return "unrelated";
    case CausalRelation::Indefinite: return "indefinite";
    case CausalRelation::Equal: return "equal";
  }
  return "?";
}

// ---------------------------------------------------------------------------

Preorder::Preorder(EventSet events, std::vector<EventMask> rows)
    : events_(std::move(events)), rows_(std::move(rows)) {
  close();
}

void Preorder::close() {
  const std::size_t n = events_.size();
  rows_.resize(n, 0);
  const EventMask all = full_mask(n);
  for (std::size_t i = 0; i < n; ++i) rows_[i] = (rows_[i] & all) | bit(i);
  // Warshall
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (rows_[i] & bit(k)) rows_[i] |= rows_[k];
    }
  }
}

Preorder Preorder::from_pairs(EventSet events,
                              std::span<const std::pair<std::size_t, std::size_t>> pairs) {
  std::vector<EventMask> rows(events.size(), 0);
  for (auto [i, j] : pairs) {
    if (i >= events.size() || j >= events.size()) throw Error("relation index out of range");
    rows[i] |= bit(j);
  }
  return Preorder(std::move(events), std::move(rows));
}

Preorder Preorder::from_rows(EventSet events, std::vector<EventMask> rows) {
  if (rows.size() != events.size()) throw Error("row count does not match event count");
  return Preorder(std::move(events), std::move(rows));
}

EventMask Preorder::past(std::size_t i) const {
  EventMask m = 0;
  for (std::size_t j = 0; j < rows_.size(); ++j) {
    if (rows_[j] & bit(i)) m |= bit(j);
  }
  return m;
}

std::vector<bool> Preorder::encoding() const {
  const std::size_t n = size();
  std::vector<bool> out;
  out.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out.push_back(leq(i, j));
  }
  return out;
}

bool encoding_less(const Preorder& a, const Preorder& b) {
  if (a.events().labels() != b.events().labels()) {
    return a.events().labels() < b.events().labels();
  }
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const bool x = a.leq(i, j);
      const bool y = b.leq(i, j);
      if (x != y) return !x;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------

Preorder discrete(const EventSet& events) {
  return Preorder::from_rows(events, std::vector<EventMask>(events.size(), 0));
}

Preorder indiscrete(const EventSet& events) {
  return Preorder::from_rows(events, std::vector<EventMask>(events.size(), full_mask(events.size())));
}

Preorder total(const EventSet& events, std::span<const std::string> sequence) {
  if (sequence.size() != events.size()) throw Error("total order sequence is not a permutation");
  std::vector<std::vector<std::string>> layers;
  for (const auto& l : sequence) layers.push_back({l});
  return layered(events, layers);
}

Preorder total(const EventSet& events) { return total(events, events.labels()); }

Preorder layered(const EventSet& events, const std::vector<std::vector<std::string>>& layers) {
  std::vector<EventMask> rows(events.size(), 0);
  EventMask seen = 0;
  EventMask above = 0;
  // walk from the top layer down so `above` accumulates everything later
  for (auto it = layers.rbegin(); it != layers.rend(); ++it) {
    const EventMask layer = events.mask_of(*it);
    if (layer & seen) throw Error("layers overlap");
    if (static_cast<std::size_t>(std::popcount(layer)) != it->size()) {
      throw Error("duplicate label in layer");
    }
    seen |= layer;
    above |= layer;
    for (std::size_t i = 0; i < events.size(); ++i) {
      if (layer & bit(i)) rows[i] = above;
    }
  }
  if (seen != full_mask(events.size())) throw Error("layers do not cover every event");
  return Preorder::from_rows(events, std::move(rows));
}

Preorder from_relation(const EventSet& events,
                       std::span<const std::pair<std::string, std::string>> pairs) {
  std::vector<std::pair<std::size_t, std::size_t>> idx;
  idx.reserve(pairs.size());
  for (const auto& [a, b] : pairs) idx.emplace_back(events.index_of(a), events.index_of(b));
  return Preorder::from_pairs(events, idx);
}

Preorder construct(OrderKind kind, const EventSet& events, std::span<const std::string> sequence,
                   std::span<const std::pair<std::string, std::string>> pairs) {
  switch (kind) {
    case OrderKind::Discrete: return discrete(events);
    case OrderKind::Indiscrete: return indiscrete(events);
    case OrderKind::Total: return total(events, sequence);
    case OrderKind::FromRelation: return from_relation(events, pairs);
  }
  throw Error("unknown order kind");
}

CausalRelation classify_relation(const Preorder& order, std::size_t a, std::size_t b) {
  if (a >= order.size() || b >= order.size()) throw Error("event index out of range");
  if (a == b) return CausalRelation::Equal;
  const bool ab = order.leq(a, b);
  const bool ba = order.leq(b, a);
  if (ab && ba) return CausalRelation::Indefinite;
  if (ab) return CausalRelation::Precedes;
  if (ba) return CausalRelation::Succeeds;
  return CausalRelation::Unrelated;
}

CausalRelation classify_relation(const Preorder& order, const std::string& a,
                                 const std::string& b) {
  return classify_relation(order, order.events().index_of(a), order.events().index_of(b));
}

bool is_definite(const Preorder& order) {
  for (std::size_t i = 0; i < order.size(); ++i) {
    if ((order.future(i) & order.past(i)) != bit(i)) return false;
  }
  return true;
}

Cones cones(const Preorder& order, std::size_t event) {
  if (event >= order.size()) throw Error("event index out of range");
  Cones c;
  c.past = order.past(event);
  c.future = order.future(event);
  c.equivalence_class = c.past & c.future;
  return c;
}

Cones cones(const Preorder& order, const std::string& event) {
  return cones(order, order.events().index_of(event));
}

Preorder join(std::span<const Preorder> orders) {
  if (orders.empty()) throw Error("join of an empty list of orders");
  std::vector<std::string> labels;
  for (const auto& o : orders) {
    for (const auto& l : o.events().labels()) {
      if (std::find(labels.begin(), labels.end(), l) == labels.end()) labels.push_back(l);
    }
  }
  EventSet events(labels);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& o : orders) {
    std::vector<std::size_t> map(o.size());
    for (std::size_t i = 0; i < o.size(); ++i) map[i] = events.index_of(o.events().label(i));
    for (std::size_t i = 0; i < o.size(); ++i) {
      for (std::size_t j = 0; j < o.size(); ++j) {
        if (i != j && o.leq(i, j)) pairs.emplace_back(map[i], map[j]);
      }
    }
  }
  return Preorder::from_pairs(std::move(events), pairs);
}

Preorder join(const Preorder& a, const Preorder& b) {
  const Preorder both[] = {a, b};
  return join(both);
}

Preorder meet(std::span<const Preorder> orders) {
  if (orders.empty()) throw Error("meet of an empty list of orders");
  const EventSet& events = orders.front().events();
  std::vector<EventMask> rows = orders.front().rows();
  for (const auto& o : orders.subspan(1)) {
    if (!o.events().same_members(events)) throw Error("meet requires identical event sets");
    for (std::size_t i = 0; i < events.size(); ++i) {
      const std::size_t oi = o.events().index_of(events.label(i));
      EventMask row = 0;
      for (std::size_t j = 0; j < events.size(); ++j) {
        if (o.leq(oi, o.events().index_of(events.label(j)))) row |= bit(j);
      }
      rows[i] &= row;
    }
  }
  return Preorder::from_rows(events, std::move(rows));
}

Preorder meet(const Preorder& a, const Preorder& b) {
  const Preorder both[] = {a, b};
  return meet(both);
}

Preorder sequential_compose(std::span<const Preorder> orders) {
  if (orders.empty()) throw Error("sequential composition of an empty list of orders");
  std::vector<std::string> labels;
  for (const auto& o : orders) {
    for (const auto& l : o.events().labels()) {
      if (std::find(labels.begin(), labels.end(), l) != labels.end()) {
        throw Error("sequential composition requires disjoint event sets: " + l);
      }
      labels.push_back(l);
    }
  }
  EventSet events(labels);
  std::vector<EventMask> rows(events.size(), 0);
  std::size_t offset = events.size();
  EventMask later = 0;
  for (auto it = orders.rbegin(); it != orders.rend(); ++it) {
    offset -= it->size();
    for (std::size_t i = 0; i < it->size(); ++i) rows[offset + i] = (it->future(i) << offset) | later;
    later |= full_mask(it->size()) << offset;
  }
  return Preorder::from_rows(std::move(events), std::move(rows));
}

Preorder sequential_compose(const Preorder& first, const Preorder& second) {
  const Preorder both[] = {first, second};
  return sequential_compose(both);
}

Preorder replacement(const Preorder& order, const std::map<std::string, Preorder>& family) {
  for (const auto& [label, sub] : family) {
    if (!order.events().contains(label)) throw Error("replacement for unknown event: " + label);
  }
  std::vector<Preorder> blocks;
  blocks.reserve(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto it = family.find(order.events().label(i));
    if (it != family.end()) {
      blocks.push_back(it->second);
    } else {
      blocks.push_back(discrete(EventSet({order.events().label(i)})));
    }
  }
  std::vector<std::string> labels;
  std::vector<std::size_t> offsets;
  for (const auto& b : blocks) {
    offsets.push_back(labels.size());
    for (const auto& l : b.events().labels()) {
      if (std::find(labels.begin(), labels.end(), l) != labels.end()) {
        throw Error("replacement orders must be pairwise disjoint: " + l);
      }
      labels.push_back(l);
    }
  }
  EventSet events(labels);
  std::vector<EventMask> rows(events.size(), 0);
  for (std::size_t w = 0; w < blocks.size(); ++w) {
    EventMask strictly_later = 0;
    for (std::size_t v = 0; v < blocks.size(); ++v) {
      if (classify_relation(order, w, v) == CausalRelation::Precedes) {
        strictly_later |= full_mask(blocks[v].size()) << offsets[v];
      }
    }
    for (std::size_t i = 0; i < blocks[w].size(); ++i) {
      rows[offsets[w] + i] = (blocks[w].future(i) << offsets[w]) | strictly_later;
    }
  }
  return Preorder::from_rows(std::move(events), std::move(rows));
}

Preorder lexicographic_product(const Preorder& outer, const Preorder& inner) {
  std::map<std::string, Preorder> family;
  for (const auto& o : outer.events().labels()) {
    std::vector<std::string> labels;
    for (const auto& i : inner.events().labels()) labels.push_back(o + "." + i);
    family.emplace(o, Preorder::from_rows(EventSet(labels), inner.rows()));
  }
  return replacement(outer, family);
}

Preorder cartesian_product(const Preorder& a, const Preorder& b) {
  if (a.size() * b.size() > kMaxOrderEvents) throw Error("cartesian product too large");
  std::vector<std::string> labels;
  for (const auto& x : a.events().labels()) {
    for (const auto& y : b.events().labels()) labels.push_back("(" + x + "," + y + ")");
  }
  const std::size_t m = b.size();
  std::vector<EventMask> rows(labels.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      EventMask row = 0;
      for (std::size_t k = 0; k < a.size(); ++k) {
        if (a.leq(i, k)) row |= b.future(j) << (k * m);
      }
      rows[i * m + j] = row;
    }
  }
  return Preorder::from_rows(EventSet(labels), std::move(rows));
}

bool includes(const Preorder& smaller, const Preorder& larger) {
  std::vector<std::size_t> map(smaller.size());
  for (std::size_t i = 0; i < smaller.size(); ++i) {
    auto j = larger.events().find(smaller.events().label(i));
    if (!j) return false;
    map[i] = *j;
  }
  for (std::size_t i = 0; i < smaller.size(); ++i) {
    for (std::size_t j = 0; j < smaller.size(); ++j) {
      if (smaller.leq(i, j) && !larger.leq(map[i], map[j])) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------

namespace {

struct PreorderSearch {
  std::size_t n;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::vector<EventMask>> out;

  void run(std::size_t k, std::vector<EventMask>& rows, std::vector<EventMask>& forbidden) {
    while (k < pairs.size()) {
      auto [i, j] = pairs[k];
      if ((rows[i] & bit(j)) || (forbidden[i] & bit(j))) {
        ++k;
        continue;
      }
      break;
    }
    if (k == pairs.size()) {
      out.push_back(rows);
      return;
    }
    auto [i, j] = pairs[k];

    // include i <= j: everything below i now reaches everything above j
    std::vector<EventMask> with = rows;
    bool ok = true;
    for (std::size_t a = 0; a < n && ok; ++a) {
      if (rows[a] & bit(i)) {
        with[a] |= rows[j];
        if (with[a] & forbidden[a]) ok = false;
      }
    }
    if (ok) run(k + 1, with, forbidden);

    forbidden[i] |= bit(j);
    run(k + 1, rows, forbidden);
    forbidden[i] &= ~bit(j);
  }
};

}  // namespace

std::vector<Preorder> enumerate_preorders(const EventSet& events,
                                          const std::optional<Preorder>& restrict_below) {
  const std::size_t n = events.size();
  if (!restrict_below && n > kMaxUnrestrictedPreorderEvents) {
    throw SizeGuardError("unrestricted preorder enumeration is limited to " +
                         std::to_string(kMaxUnrestrictedPreorderEvents) + " events");
  }
  if (n > 8) throw SizeGuardError("preorder enumeration is limited to 8 events");

  PreorderSearch search{n, {}, {}};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) search.pairs.emplace_back(i, j);
    }
  }
  std::vector<EventMask> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = bit(i);
  std::vector<EventMask> forbidden(n, 0);
  if (restrict_below) {
    for (std::size_t i = 0; i < n; ++i) {
      auto bi = restrict_below->events().find(events.label(i));
      if (!bi) throw Error("restricting order lacks event " + events.label(i));
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t bj = restrict_below->events().index_of(events.label(j));
        if (!restrict_below->leq(*bi, bj)) forbidden[i] |= bit(j);
      }
    }
  }
  search.run(0, rows, forbidden);

  std::vector<Preorder> result;
  result.reserve(search.out.size());
  for (auto& r : search.out) result.push_back(Preorder::from_rows(events, std::move(r)));
  std::sort(result.begin(), result.end(), encoding_less);
  result.erase(std::unique(result.begin(), result.end()), result.end());
  return result;
}

HasseDiagram hasse_diagram(const Preorder& order) {
  HasseDiagram d;
  const std::size_t n = order.size();
  EventMask assigned = 0;
  std::vector<std::size_t> rep;
  for (std::size_t i = 0; i < n; ++i) {
    if (assigned & bit(i)) continue;
    const EventMask cls = order.future(i) & order.past(i);
    assigned |= cls;
    d.classes.push_back(cls);
    rep.push_back(i);
  }
  const std::size_t m = d.classes.size();
  auto lt = [&](std::size_t a, std::size_t b) { return a != b && order.leq(rep[a], rep[b]); };
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      if (!lt(a, b)) continue;
      bool cover = true;
      for (std::size_t c = 0; c < m && cover; ++c) {
        if (lt(a, c) && lt(c, b)) cover = false;
      }
      if (cover) d.edges.emplace_back(a, b);
    }
  }
  return d;
}

Preorder order_from_hasse(const EventSet& events, const HasseDiagram& diagram) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  auto members = [&](EventMask m) {
    std::vector<std::size_t> v;
    for (std::size_t i = 0; i < events.size(); ++i) {
      if (m & bit(i)) v.push_back(i);
    }
    return v;
  };
  for (EventMask cls : diagram.classes) {
    auto v = members(cls);
    for (std::size_t a : v) {
      for (std::size_t b : v) pairs.emplace_back(a, b);
    }
  }
  for (auto [lo, hi] : diagram.edges) {
    for (std::size_t a : members(diagram.classes[lo])) {
      for (std::size_t b : members(diagram.classes[hi])) pairs.emplace_back(a, b);
    }
  }
  return Preorder::from_pairs(events, pairs);
}

bool LowersetLattice::contains(EventMask set) const {
  return std::binary_search(sets.begin(), sets.end(), set);
}

LowersetLattice lowersets(const Preorder& order) {
  const std::size_t n = order.size();
  if (n > kMaxLowersetEvents) throw SizeGuardError("lowerset enumeration limited to 24 events");
  std::vector<EventMask> pasts(n);
  for (std::size_t i = 0; i < n; ++i) pasts[i] = order.past(i);
  LowersetLattice lat{order, {}};
  const EventMask limit = EventMask{1} << n;
  for (EventMask u = 0; u < limit; ++u) {
    bool closed = true;
    for (EventMask rest = u; rest && closed; rest &= rest - 1) {
      const auto i = static_cast<std::size_t>(std::countr_zero(rest));
      if ((pasts[i] & ~u) != 0) closed = false;
    }
    if (closed) lat.sets.push_back(u);
  }
  return lat;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::vector<std::string>> parse_groups(const std::string& text) {
  std::vector<std::vector<std::string>> groups;
  std::string token;
  bool in_brace = false;
  std::vector<std::string> brace_group;
  auto flush = [&] {
    if (token.empty()) return;
    if (in_brace) {
      brace_group.push_back(token);
    } else {
      groups.push_back({token});
    }
    token.clear();
  };
  for (char c : text) {
    if (c == '{') {
      if (in_brace) throw Error("nested braces in order spec");
      flush();
      in_brace = true;
    } else if (c == '}') {
      if (!in_brace) throw Error("unbalanced braces in order spec");
      flush();
      groups.push_back(brace_group);
      brace_group.clear();
      in_brace = false;
    } else if (c == ',' || c == ' ') {
      flush();
    } else {
      token.push_back(c);
    }
  }
  if (in_brace) throw Error("unbalanced braces in order spec");
  flush();
  return groups;
}

}  // namespace

Preorder builtin_order(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  auto groups = parse_groups(rest);
  std::vector<std::string> labels;
  for (const auto& g : groups) labels.insert(labels.end(), g.begin(), g.end());

  auto default_labels = [&](std::size_t n) {
    if (labels.empty()) {
      labels = EventSet::letters(n).labels();
      groups.clear();
      for (const auto& l : labels) groups.push_back({l});
    }
    if (labels.size() != n) throw Error(name + " order needs exactly " + std::to_string(n) + " events");
  };

  if (name == "discrete" || name == "indiscrete") {
    if (labels.empty()) throw Error(name + " order needs event labels");
    EventSet events(labels);
    return name == "discrete" ? discrete(events) : indiscrete(events);
  }
  if (name == "total") {
    if (labels.empty()) throw Error("total order needs event labels");
    return layered(EventSet(labels), groups);
  }
  if (name == "fork") {
    default_labels(3);
    return from_relation(EventSet(labels), std::vector<std::pair<std::string, std::string>>{
                                               {labels[0], labels[1]}, {labels[0], labels[2]}});
  }
  if (name == "wedge") {
    default_labels(3);
    return from_relation(EventSet(labels), std::vector<std::pair<std::string, std::string>>{
                                               {labels[0], labels[2]}, {labels[1], labels[2]}});
  }
  if (name == "diamond") {
    default_labels(4);
    return from_relation(EventSet(labels),
                         std::vector<std::pair<std::string, std::string>>{{labels[0], labels[1]},
                                                                          {labels[0], labels[2]},
                                                                          {labels[1], labels[3]},
                                                                          {labels[2], labels[3]}});
  }
  throw Error("unknown builtin order: " + name);
}

}  // namespace causality
