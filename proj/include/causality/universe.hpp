#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "causality/pfun.hpp"

namespace causality {

/// Fixed-capacity bitset over partial-function codes of a Universe.
class PfMask {
 public:
  static constexpr std::size_t kBits = 256;

  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  bool none() const { return (words_[0] | words_[1] | words_[2] | words_[3]) == 0; }
  bool any() const { return !none(); }
  bool intersects(const PfMask& o) const { return (*this & o).any(); }
  bool subset_of(const PfMask& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if (words_[i] & ~o.words_[i]) return false;
    }
    return true;
  }

  PfMask& operator|=(const PfMask& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  PfMask& operator&=(const PfMask& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  /// this \ o
  PfMask& remove(const PfMask& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
    return *this;
  }
  friend PfMask operator|(PfMask a, const PfMask& b) { return a |= b; }
  friend PfMask operator&(PfMask a, const PfMask& b) { return a &= b; }
  friend PfMask minus(PfMask a, const PfMask& b) { return a.remove(b); }
  friend bool operator==(const PfMask&, const PfMask&) = default;
  /// Arbitrary but fixed total order, for use as a map key.
  friend auto operator<=>(const PfMask& a, const PfMask& b) { return a.words_ <=> b.words_; }

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      for (std::uint64_t x = words_[w]; x; x &= x - 1) {
        f(w * 64 + static_cast<std::size_t>(std::countr_zero(x)));
      }
    }
  }

  std::vector<std::size_t> indices() const {
    std::vector<std::size_t> v;
    for_each([&](std::size_t i) { v.push_back(i); });
    return v;
  }

 private:
  std::array<std::uint64_t, 4> words_{};
};

/// Every partial function of an InputFamily, indexed by PFCode, with
/// precomputed order/compatibility/join tables. Code 0 is the empty function.
class Universe {
 public:
  static constexpr std::size_t kMaxCodes = PfMask::kBits;

  explicit Universe(InputFamily family);

  const InputFamily& family() const { return family_; }
  std::size_t size() const { return size_; }

  const PartialFunction& pf(std::size_t code) const { return pfs_[code]; }
  EventMask domain(std::size_t code) const { return domains_[code]; }
  std::size_t domain_size(std::size_t code) const {
    return static_cast<std::size_t>(std::popcount(domains_[code]));
  }

  /// Codes k with k < code in the restriction order (includes the empty code).
  const PfMask& strictly_below(std::size_t code) const { return below_[code]; }
  const PfMask& compatible_with(std::size_t code) const { return compatible_[code]; }
  /// -1 when incompatible.
  int join(std::size_t a, std::size_t b) const { return join_[a * size_ + b]; }
  /// Restriction of `code` to dom \ {event}; `event` must be in the domain.
  std::size_t without(std::size_t code, std::size_t event) const {
    return without_[code * family_.size() + event];
  }

  const PfMask& totals() const { return totals_; }
  const PfMask& nonempty() const { return nonempty_; }

  PfMask mask_of(std::span<const PartialFunction> fs) const;
  std::vector<PartialFunction> functions(const PfMask& m) const;

  bool is_closed(const PfMask& w) const;
  PfMask closure(const PfMask& w) const;
  PfMask prime(const PfMask& w) const;
  /// Every k in w with |dom k| >= 2 has some one-event restriction in w.
  bool has_descent(const PfMask& w) const;
  /// Closed, contains every total assignment, has descent, and omits the
  /// empty function: exactly the Ext sets of causally complete spaces.
  bool is_cc_closed(const PfMask& w) const;

 private:
  InputFamily family_;
  std::size_t size_ = 0;
  std::vector<PartialFunction> pfs_;
  std::vector<EventMask> domains_;
  std::vector<PfMask> below_;
  std::vector<PfMask> compatible_;
  std::vector<std::int16_t> join_;
  std::vector<std::uint16_t> without_;
  PfMask totals_;
  PfMask nonempty_;
};

/// Depth-first search over the cc-closed sets W ⊇ required (see
/// Universe::is_cc_closed). Non-total functions outside the forced set are
/// decided one at a time in descending domain size, included branch first.
/// A path records the decision (0/1) taken at each variable position.
class CcSearch {
 public:
  /// Return false from the visitor to stop the search.
  using Visitor = std::function<bool(const PfMask& w)>;

  CcSearch(const Universe& universe, const PfMask& required);

  std::size_t variable_count() const { return variables_.size(); }
  const std::vector<std::size_t>& variables() const { return variables_; }
  const PfMask& forced() const { return forced_; }
  /// False when the forced set already violates descent.
  bool feasible() const { return feasible_; }

  /// Full search. Returns false if the visitor stopped it.
  bool run(const Visitor& visit);

  /// Resumes after the leaf reached by `path` (that leaf is not revisited).
  bool run_after(const std::vector<std::uint8_t>& path, const Visitor& visit);

  /// Searches only the subtree below a prefix produced by `prefixes`.
  bool run_subtree(const std::vector<std::uint8_t>& prefix, const Visitor& visit);

  /// Every consistent decision prefix of the given length (or shorter prefixes
  /// that are already complete leaves), in search order.
  std::vector<std::vector<std::uint8_t>> prefixes(std::size_t depth);

  /// Decisions leading to the leaf currently being visited.
  const std::vector<std::uint8_t>& current_path() const { return path_; }

  /// Rebuilds W for a full path, or throws Error when the path is not a leaf.
  PfMask leaf_from_path(const std::vector<std::uint8_t>& path) const;

 private:
  enum class Mode { Normal, Replay, Subtree };

  bool can_include(std::size_t pos, const PfMask& w) const;
  bool descent_ok(std::size_t pos, const PfMask& w) const;
  bool dfs(std::size_t pos, PfMask& w, const Visitor& visit, Mode mode,
           const std::vector<std::uint8_t>* guide);

  const Universe& u_;
  PfMask forced_;
  bool feasible_ = true;
  std::vector<std::size_t> variables_;
  std::vector<std::vector<std::size_t>> checks_after_;
  std::vector<std::uint8_t> path_;
  std::vector<std::vector<std::uint8_t>>* collect_ = nullptr;
  std::size_t collect_depth_ = 0;
};

}  // namespace causality
