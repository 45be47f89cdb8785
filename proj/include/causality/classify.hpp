#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "causality/space.hpp"

namespace causality {

/// Sorted history codes, minimised over the symmetry orbit.
using CanonicalCode = std::vector<PFCode>;

/// Event permutations preserving input-set sizes, times a permutation of the
/// inputs at every event. g maps f to the function with value
/// inputs[ω][f(ω)] at event events[ω].
struct GroupElement {
  std::vector<std::size_t> events;
  std::vector<std::vector<std::size_t>> inputs;
};

class SymmetryGroup {
 public:
  static constexpr std::size_t kMaxOrder = 100000;

  explicit SymmetryGroup(InputFamily family);

  const InputFamily& family() const { return family_; }
  std::size_t order() const { return elements_.size(); }
  const std::vector<GroupElement>& elements() const { return elements_; }

  PartialFunction apply(std::size_t g, const PartialFunction& f) const;
  HistorySpace apply(std::size_t g, const HistorySpace& space) const;
  PFCode apply_code(std::size_t g, PFCode code) const;
  /// Sorted image of a sorted code list.
  std::vector<PFCode> apply_codes(std::size_t g, std::span<const PFCode> codes) const;

  CanonicalCode canonical(std::span<const PFCode> codes) const;
  /// True when `codes` (sorted) is already the orbit minimum.
  bool is_canonical(std::span<const PFCode> codes) const;
  std::size_t orbit_size(std::span<const PFCode> codes) const;
  /// Distinct images, sorted.
  std::vector<std::vector<PFCode>> orbit(std::span<const PFCode> codes) const;

 private:
  InputFamily family_;
  std::vector<GroupElement> elements_;
  std::size_t codes_ = 0;
  std::vector<PFCode> table_;  // g * codes_ + code, when small enough
};

CanonicalCode canonicalize(const HistorySpace& space);
std::vector<HistorySpace> orbit(const HistorySpace& space);
std::size_t orbit_size(const HistorySpace& space);

/// Space with the given history codes.
HistorySpace space_from_codes(const InputFamily& family, std::span<const PFCode> codes);

inline constexpr std::size_t kMaxBruteForceBits = 24;

/// Every causally complete space, by testing all sets of non-total functions
/// (totals forced in). Sorted by code.
std::vector<HistorySpace> enumerate_cc_bruteforce(const InputFamily& family);

struct DfsOptions {
  std::size_t jobs = 1;
  std::optional<double> max_seconds;
  std::optional<std::uint64_t> max_records;
  /// Checkpoint file; resumed from when it exists. Requires jobs == 1.
  std::optional<std::string> checkpoint;
  /// Append-only code stream; defaults to checkpoint + ".stream".
  std::optional<std::string> stream;
};

struct DfsResult {
  /// Canonical codes in search order.
  std::vector<CanonicalCode> records;
  bool complete = false;
  std::uint64_t leaves = 0;  // cc sets visited in this run
};

/// One canonical representative per symmetry class, in deterministic search
/// order (independent of `jobs`).
DfsResult enumerate_cc_dfs(const InputFamily& family, const DfsOptions& options = {});

/// All members of the given classes, sorted by code.
std::vector<HistorySpace> expand_classes(const InputFamily& family,
                                         std::span<const CanonicalCode> classes);

using Edge = std::pair<std::size_t, std::size_t>;

struct HierarchyGraph {
  InputFamily family;
  std::vector<HistorySpace> nodes;        // sorted by code
  std::vector<std::size_t> node_class;
  std::vector<Edge> edges;                // (finer, coarser) covering pairs
  std::vector<CanonicalCode> classes;     // sorted
  std::vector<std::size_t> class_size;
  std::vector<Edge> class_edges;          // covers projected to classes
  std::vector<Edge> quotient_class_edges; // covers of the class-level order

  /// Symmetric difference of class_edges and quotient_class_edges.
  std::vector<Edge> edge_discrepancy() const;
  std::vector<std::size_t> maximal_nodes() const;
};

HierarchyGraph build_hierarchy(std::vector<HistorySpace> spaces);

/// Θ = Hist(Ω, I) for some preorder Ω on the family's events.
bool is_order_induced(const HistorySpace& space);
/// Θ refines Hist(Ω, I) for some definite Ω.
bool has_fixed_definite_order(const HistorySpace& space);

struct ClassInfo {
  CanonicalCode code;
  std::size_t size = 0;
  bool tight = false;
  bool order_induced = false;
  bool fixed_definite = false;
  bool maximal = false;
};

struct Stats {
  std::size_t spaces = 0;
  std::size_t classes = 0;
  std::size_t tight_classes = 0;
  std::size_t nontight_classes = 0;
  std::size_t no_fixed_definite_classes = 0;
  std::size_t order_induced_classes = 0;
  std::size_t maxima_classes = 0;
  std::vector<ClassInfo> per_class;  // parallel to HierarchyGraph::classes
};

Stats stats(const HierarchyGraph& graph);

/// Class indices of structurally described spaces (3 events): "discrete",
/// "fork", "wedge", "total", "total+point", "switch". Missing ones are absent.
std::map<std::string, std::size_t> landmark_classes(const HierarchyGraph& graph);

}  // namespace causality
