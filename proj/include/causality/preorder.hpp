#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace causality {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when an operation would exceed one of the enumeration size guards.
class SizeGuardError : public Error {
 public:
  using Error::Error;
};

/// Bitmask over event indices (bit i = event i).
using EventMask = std::uint64_t;

inline constexpr std::size_t kMaxOrderEvents = 64;

inline constexpr EventMask bit(std::size_t i) { return EventMask{1} << i; }

inline constexpr EventMask full_mask(std::size_t n) {
  return n >= 64 ? ~EventMask{0} : (EventMask{1} << n) - 1;
}

/// Ordered list of distinct event labels. Indices follow list order.
class EventSet {
 public:
  EventSet() = default;
  explicit EventSet(std::vector<std::string> labels);

  /// Events "A", "B", ... (then "E26", "E27", ... past Z).
  static EventSet letters(std::size_t n);

  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  const std::vector<std::string>& labels() const { return labels_; }

  std::optional<std::size_t> find(const std::string& label) const;
  /// Throws Error for an unknown label.
  std::size_t index_of(const std::string& label) const;
  bool contains(const std::string& label) const { return find(label).has_value(); }

  EventMask mask_of(std::span<const std::string> labels) const;
  std::vector<std::string> labels_of(EventMask mask) const;

  /// Same labels regardless of order.
  bool same_members(const EventSet& other) const;

  friend bool operator==(const EventSet&, const EventSet&) = default;

 private:
  std::vector<std::string> labels_;
};

enum class CausalRelation { Precedes, Succeeds, Unrelated, Indefinite, Equal };

const char* to_string(CausalRelation r);

/// A causal order: reflexive transitive relation on an EventSet, stored as
/// one bitmask row per event (row i holds every j with i <= j).
class Preorder {
 public:
  Preorder() = default;

  /// Reflexive-transitive closure of the given (i, j) index pairs.
  static Preorder from_pairs(EventSet events,
                             std::span<const std::pair<std::size_t, std::size_t>> pairs);
  /// Rows are closed before storing.
  static Preorder from_rows(EventSet events, std::vector<EventMask> rows);

  const EventSet& events() const { return events_; }
  std::size_t size() const { return events_.size(); }

  bool leq(std::size_t i, std::size_t j) const { return (rows_[i] >> j) & 1U; }
  bool leq(const std::string& a, const std::string& b) const {
    return leq(events_.index_of(a), events_.index_of(b));
  }

  /// {j : i <= j}
  EventMask future(std::size_t i) const { return rows_[i]; }
  /// {j : j <= i}
  EventMask past(std::size_t i) const;
  const std::vector<EventMask>& rows() const { return rows_; }

  /// Row-major reach matrix as a bit string, reach[0][0] first.
  std::vector<bool> encoding() const;

  friend bool operator==(const Preorder&, const Preorder&) = default;

 private:
  Preorder(EventSet events, std::vector<EventMask> rows);
  void close();

  EventSet events_;
  std::vector<EventMask> rows_;
};

/// Lexicographic order on the row-major encoding; events compared first.
bool encoding_less(const Preorder& a, const Preorder& b);

enum class OrderKind { Discrete, Indiscrete, Total, FromRelation };

Preorder discrete(const EventSet& events);
Preorder indiscrete(const EventSet& events);
/// `sequence` must be a permutation of the events.
Preorder total(const EventSet& events, std::span<const std::string> sequence);
Preorder total(const EventSet& events);
/// Chain of equivalence classes, e.g. {{"A"}, {"B","C"}, {"D"}} for A -> {B,C} -> D.
/// The layers must partition the events.
Preorder layered(const EventSet& events, const std::vector<std::vector<std::string>>& layers);
Preorder from_relation(const EventSet& events,
                       std::span<const std::pair<std::string, std::string>> pairs);

/// Dispatching constructor. `sequence` is used by Total, `pairs` by FromRelation.
Preorder construct(OrderKind kind, const EventSet& events,
                   std::span<const std::string> sequence = {},
                   std::span<const std::pair<std::string, std::string>> pairs = {});

CausalRelation classify_relation(const Preorder& order, std::size_t a, std::size_t b);
CausalRelation classify_relation(const Preorder& order, const std::string& a,
                                 const std::string& b);

bool is_definite(const Preorder& order);

struct Cones {
  EventMask past = 0;
  EventMask future = 0;
  EventMask equivalence_class = 0;
};

Cones cones(const Preorder& order, std::size_t event);
Cones cones(const Preorder& order, const std::string& event);

/// Transitive closure of the union. Events matched by label; the result lists
/// events in first-appearance order.
Preorder join(std::span<const Preorder> orders);
Preorder join(const Preorder& a, const Preorder& b);

/// Intersection of relations. All orders must share the same events; the
/// result uses the first order's event numbering.
Preorder meet(std::span<const Preorder> orders);
Preorder meet(const Preorder& a, const Preorder& b);

/// Every event of an earlier block precedes every event of a later block.
Preorder sequential_compose(std::span<const Preorder> orders);
Preorder sequential_compose(const Preorder& first, const Preorder& second);

/// Replaces each event by an order. Events missing from `family` are kept as
/// singletons. Replacement event sets must be pairwise disjoint.
Preorder replacement(const Preorder& order, const std::map<std::string, Preorder>& family);

/// Replacement by copies of `inner`, labelled "outer.inner".
Preorder lexicographic_product(const Preorder& outer, const Preorder& inner);

/// Componentwise order on pairs, labelled "(a,b)", row-major in (a, b).
Preorder cartesian_product(const Preorder& a, const Preorder& b);

/// Event containment and relation containment (events matched by label).
bool includes(const Preorder& smaller, const Preorder& larger);

inline constexpr std::size_t kMaxUnrestrictedPreorderEvents = 5;

/// All labelled preorders on `events`, optionally only those included in
/// `restrict_below`. Sorted by encoding_less.
std::vector<Preorder> enumerate_preorders(const EventSet& events,
                                          const std::optional<Preorder>& restrict_below = {});

struct HasseDiagram {
  /// Equivalence classes, ordered by their lowest event index.
  std::vector<EventMask> classes;
  /// (lower, upper) covering pairs between class indices.
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

HasseDiagram hasse_diagram(const Preorder& order);

/// Closure of a Hasse diagram back to an order on events.
Preorder order_from_hasse(const EventSet& events, const HasseDiagram& diagram);

/// Downward-closed subsets of a preorder, sorted by mask value. The empty set
/// is stored at index 0 and is omitted from displays.
struct LowersetLattice {
  Preorder order;
  std::vector<EventMask> sets;

  std::size_t nonempty_count() const { return sets.empty() ? 0 : sets.size() - 1; }
  bool contains(EventMask set) const;
  static constexpr bool empty_suppressed_in_display = true;
};

inline constexpr std::size_t kMaxLowersetEvents = 24;

LowersetLattice lowersets(const Preorder& order);

/// Named orders used by the CLI and tests. Accepted forms:
///   discrete:A,B,C   indiscrete:A,B   total:A,B,C   total:A,{B,C},D
///   fork:A,B,C (A below B and C)   wedge:A,B,C (A and B below C)
///   diamond:A,B,C,D (A below B and C, both below D)
/// The label list may be omitted for fork/wedge (A,B,C) and diamond (A,B,C,D).
Preorder builtin_order(const std::string& spec);

}  // namespace causality
