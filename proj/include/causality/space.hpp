#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "causality/pfun.hpp"
#include "causality/preorder.hpp"

namespace causality {

/// A finite ∨-prime set of nonempty partial functions over a declared
/// InputFamily. Histories are kept sorted by PFCode.
class HistorySpace {
 public:
  HistorySpace() = default;
  /// Validates values and ∨-primality; throws Error otherwise.
  HistorySpace(InputFamily family, std::vector<PartialFunction> histories);

  /// Prime elements of an arbitrary set of nonempty functions.
  static HistorySpace from_extended(InputFamily family, std::vector<PartialFunction> ext);
  static HistorySpace parse(InputFamily family, const std::vector<std::string>& histories);

  const InputFamily& family() const { return family_; }
  const std::vector<PartialFunction>& histories() const { return histories_; }
  std::size_t size() const { return histories_.size(); }
  bool empty() const { return histories_.empty(); }
  bool contains(const PartialFunction& h) const;

  /// Union of history domains.
  EventMask events() const;
  /// Values appearing at each event of the family.
  std::vector<std::vector<std::size_t>> derived_inputs() const;
  std::vector<PFCode> codes() const;

  friend bool operator==(const HistorySpace& a, const HistorySpace& b) {
    return a.family_ == b.family_ && a.histories_ == b.histories_;
  }

 private:
  InputFamily family_;
  std::vector<PartialFunction> histories_;
};

struct ExtendedSpace {
  HistorySpace base;
  std::vector<PartialFunction> ext;
  std::vector<PartialFunction> maximal;
};

struct TipReport {
  std::vector<PartialFunction> histories;  // = Ext, sorted
  std::vector<EventMask> tips;              // parallel to `histories`

  EventMask tips_of(const PartialFunction& h) const;
};

HistorySpace induce(const Preorder& order, const InputFamily& family);

ExtendedSpace extend(const HistorySpace& space);
std::vector<PartialFunction> extended_histories(const HistorySpace& space);

/// Every total assignment of the declared family is an extended history.
bool free_choice(const HistorySpace& space);

/// Refinement order: a <= b iff Ext(a) ⊇ Ext(b). Spaces over different
/// families are compared by event label.
bool space_leq(const HistorySpace& a, const HistorySpace& b);

HistorySpace space_join(const HistorySpace& a, const HistorySpace& b);
HistorySpace space_meet(const HistorySpace& a, const HistorySpace& b);

HistorySpace parallel(const HistorySpace& a, const HistorySpace& b);
HistorySpace sequential(const HistorySpace& a, const HistorySpace& b);

/// Keyed by the maximal extended histories of the first space (in its family).
using Continuations = std::map<PartialFunction, HistorySpace>;
HistorySpace cond_sequential(const HistorySpace& a, const Continuations& next);

/// Re-expresses a space over another family that contains its events.
HistorySpace embed(const HistorySpace& space, const InputFamily& to);

TipReport tips(const HistorySpace& space);

/// Free choice and exactly one tip per input history.
bool is_causally_complete(const HistorySpace& space);
/// Free choice and one-step descent inside Ext for every |dom| >= 2 history.
bool is_causally_complete_by_descent(const HistorySpace& space);

enum class TightnessMode { AllExtended, MaximalOnly };
bool is_tight(const HistorySpace& space, TightnessMode mode = TightnessMode::AllExtended);

/// Θ == Ext(Θ)
bool is_join_closed(const HistorySpace& space);

/// Maximal causally complete refinements. Requires free choice and a family
/// small enough for the indexed universe.
std::vector<HistorySpace> causal_completions(const HistorySpace& space);

/// Causal switch spaces over `family`, sorted by history codes. For a family
/// without events this is the single empty space.
std::vector<HistorySpace> switch_spaces(const InputFamily& family);

/// ∏_{j=1..n} j^(k^(n-j)); throws SizeGuardError on 64-bit overflow.
std::uint64_t count_switch_spaces(std::size_t events, std::size_t inputs);
/// Recursive count for an arbitrary family.
std::uint64_t count_switch_spaces(const InputFamily& family);

/// Lexicographic order on history code lists.
bool code_less(const HistorySpace& a, const HistorySpace& b);

}  // namespace causality
