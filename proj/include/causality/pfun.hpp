#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "causality/preorder.hpp"

namespace causality {

inline constexpr std::size_t kMaxEvents = 16;
inline constexpr std::size_t kMaxInputs = 127;

/// Mixed-radix integer code of a partial function (digit = value + 1, 0 for
/// undefined; event 0 is the least significant digit).
using PFCode = std::uint64_t;

/// Per-event input sets I_ω = {0, ..., k_ω - 1}, with optional display names.
class InputFamily {
 public:
  InputFamily() = default;
  InputFamily(EventSet events, std::vector<std::size_t> input_counts);

  static InputFamily uniform(EventSet events, std::size_t inputs);
  static InputFamily uniform(std::size_t events, std::size_t inputs) {
    return uniform(EventSet::letters(events), inputs);
  }

  const EventSet& events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  std::size_t input_count(std::size_t event) const { return counts_.at(event); }
  const std::vector<std::size_t>& input_counts() const { return counts_; }
  bool is_uniform() const;

  /// Number of partial functions, ∏(|I_ω| + 1). Throws if it overflows.
  PFCode code_count() const;

  void set_value_names(std::size_t event, std::vector<std::string> names);
  std::string value_name(std::size_t event, std::size_t value) const;
  /// Empty when the event uses plain indices.
  const std::vector<std::string>& value_names(std::size_t event) const { return names_.at(event); }
  /// Parses either a display name or a decimal index.
  std::size_t parse_value(std::size_t event, const std::string& text) const;

  /// Sub-family on the given labels, in the given order.
  InputFamily restrict_to(std::span<const std::string> labels) const;

  friend bool operator==(const InputFamily& a, const InputFamily& b) {
    return a.events_ == b.events_ && a.counts_ == b.counts_;
  }

 private:
  EventSet events_;
  std::vector<std::size_t> counts_;
  std::vector<std::vector<std::string>> names_;
};

/// Disjoint union of families (labels must not collide).
InputFamily disjoint_union(const InputFamily& a, const InputFamily& b);

/// A partial function from event indices to input indices.
class PartialFunction {
 public:
  static constexpr std::int8_t kUndefined = -1;

  PartialFunction() { values_.fill(kUndefined); }
  explicit PartialFunction(std::size_t arity);
  PartialFunction(std::initializer_list<int> values);

  std::size_t arity() const { return arity_; }
  bool defined(std::size_t event) const { return values_[event] != kUndefined; }
  /// Input index at `event`, or -1.
  int at(std::size_t event) const { return values_[event]; }
  void set(std::size_t event, std::size_t value);
  void erase(std::size_t event) { values_[event] = kUndefined; }

  EventMask domain() const;
  std::size_t domain_size() const;
  bool empty() const { return domain() == 0; }

  /// Restriction to the events in `mask`.
  PartialFunction restrict(EventMask mask) const;

  friend bool operator==(const PartialFunction&, const PartialFunction&) = default;
  /// Agrees with PFCode order for functions of the same family.
  friend std::strong_ordering operator<=>(const PartialFunction& a, const PartialFunction& b);

 private:
  std::array<std::int8_t, kMaxEvents> values_{};
  std::uint8_t arity_ = 0;
};

/// The empty function of the family's arity.
PartialFunction empty_function(const InputFamily& family);

/// Throws Error when `f` has the wrong arity or out-of-range values.
void validate(const InputFamily& family, const PartialFunction& f);

PFCode encode(const InputFamily& family, const PartialFunction& f);
PartialFunction decode(const InputFamily& family, PFCode code);

/// Restriction order: dom f ⊆ dom g and g agrees with f there.
bool leq(const PartialFunction& f, const PartialFunction& g);
bool compatible(const PartialFunction& f, const PartialFunction& g);
/// Restriction of f to the events where f and g agree.
PartialFunction meet(const PartialFunction& f, const PartialFunction& g);

/// Compatible join. std::nullopt signals an incompatible pair/set.
std::optional<PartialFunction> join(const PartialFunction& f, const PartialFunction& g);
/// The empty collection joins to the empty function of `arity`.
std::optional<PartialFunction> join(std::span<const PartialFunction> fs, std::size_t arity);

/// All compatible joins of nonempty subsets of `w`, sorted, no duplicates.
/// Computed by pairwise saturation.
std::vector<PartialFunction> closure(std::span<const PartialFunction> w);

/// Elements of `w` that are not compatible joins of other elements of `w`.
std::vector<PartialFunction> prime_elements(std::span<const PartialFunction> w);

/// Sorts and removes duplicates.
void normalize(std::vector<PartialFunction>& fs);

/// "A/0, C/1" (events in family order).
std::string to_text(const InputFamily& family, const PartialFunction& f);
PartialFunction parse_text(const InputFamily& family, const std::string& text);

/// Builds a function from label/value pairs.
PartialFunction make_pf(const InputFamily& family,
                        std::initializer_list<std::pair<std::string, int>> assignment);

/// Re-indexes `f` from one family into another that contains all of its
/// defined events (matched by label).
PartialFunction embed(const PartialFunction& f, const InputFamily& from, const InputFamily& to);

}  // namespace causality
