#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "causality/classify.hpp"

using namespace causality;
namespace fs = std::filesystem;

namespace {

std::set<CanonicalCode> canonical_set(const std::vector<HistorySpace>& spaces) {
  std::set<CanonicalCode> out;
  for (const auto& s : spaces) out.insert(canonicalize(s));
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "causality-tests";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  fs::remove(p);
  fs::remove(p.string() + ".stream");
  return p;
}

}  // namespace

TEST_CASE("symmetry group") {
  CHECK(SymmetryGroup(InputFamily::uniform(2, 2)).order() == 8);
  CHECK(SymmetryGroup(InputFamily::uniform(3, 2)).order() == 48);
  CHECK(SymmetryGroup(InputFamily(EventSet::letters(3), {2, 2, 3})).order() == 2 * 2 * 2 * 6);

  const InputFamily f = InputFamily::uniform(3, 2);
  const SymmetryGroup g(f);
  const auto t = induce(builtin_order("total:A,B,C"), f);
  for (std::size_t i = 0; i < g.order(); ++i) {
    const auto img = g.apply(i, t);
    CHECK(img.codes() == g.apply_codes(i, t.codes()));
    CHECK(is_causally_complete(img));
  }
}

TEST_CASE("orbits") {
  const InputFamily f = InputFamily::uniform(3, 2);
  CHECK(orbit_size(induce(discrete(f.events()), f)) == 1);
  CHECK(orbit_size(induce(builtin_order("total:A,B,C"), f)) == 6);
  CHECK(orbit(induce(builtin_order("fork"), f)).size() == 3);
  const auto o = orbit(induce(builtin_order("wedge"), f));
  CHECK(o.size() == 3);
  for (const auto& s : o) CHECK(canonicalize(s) == canonicalize(o.front()));
}

TEST_CASE("brute force and dfs agree") {
  const std::size_t spaces[] = {1, 1, 7, 2644};
  const std::size_t classes[] = {1, 1, 3, 102};
  for (std::size_t n = 1; n <= 3; ++n) {
    const InputFamily f = InputFamily::uniform(n, 2);
    const auto brute = enumerate_cc_bruteforce(f);
    CHECK(brute.size() == spaces[n]);
    const auto want = canonical_set(brute);
    CHECK(want.size() == classes[n]);
    const auto dfs = enumerate_cc_dfs(f);
    CHECK(dfs.complete);
    const std::set<CanonicalCode> got(dfs.records.begin(), dfs.records.end());
    CHECK(got.size() == dfs.records.size());
    CHECK(got == want);
    CHECK(expand_classes(f, dfs.records) == brute);
  }
}

TEST_CASE("every enumerated space is complete both ways") {
  for (const auto& s : enumerate_cc_bruteforce(InputFamily::uniform(3, 2))) {
    CHECK(free_choice(s));
    CHECK(is_causally_complete_by_descent(s));
  }
}

TEST_CASE("two-event hierarchy") {
  const InputFamily f = InputFamily::uniform(2, 2);
  const auto g = build_hierarchy(enumerate_cc_bruteforce(f));
  REQUIRE(g.nodes.size() == 7);
  CHECK(g.classes.size() == 3);
  std::vector<std::size_t> sizes = g.class_size;
  std::sort(sizes.begin(), sizes.end());
  CHECK(sizes == std::vector<std::size_t>{1, 2, 4});

  const std::size_t disc =
      std::find(g.nodes.begin(), g.nodes.end(), induce(discrete(f.events()), f)) - g.nodes.begin();
  const auto maxima = g.maximal_nodes();
  CHECK(maxima.size() == 2);
  CHECK(g.edges.size() == 8);
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    if (i == disc || std::count(maxima.begin(), maxima.end(), i)) continue;
    std::vector<Edge> touching;
    for (const auto& e : g.edges) {
      if (e.first == i || e.second == i) touching.push_back(e);
    }
    REQUIRE(touching.size() == 2);
    // middle layer: refines one total-order space, coarsens the discrete space
    CHECK(std::count(touching.begin(), touching.end(), Edge{disc, i}) == 1);
    const auto up = touching[0] == Edge{disc, i} ? touching[1] : touching[0];
    CHECK(up.first == i);
    CHECK(std::count(maxima.begin(), maxima.end(), up.second) == 1);
  }

  // the group acts by poset automorphisms
  const SymmetryGroup sg(f);
  for (std::size_t e = 0; e < sg.order(); ++e) {
    for (const auto& a : g.nodes) {
      for (const auto& b : g.nodes) {
        CHECK(space_leq(a, b) == space_leq(sg.apply(e, a), sg.apply(e, b)));
      }
    }
  }
}

TEST_CASE("three-event hierarchy") {
  const InputFamily f = InputFamily::uniform(3, 2);
  const auto g = build_hierarchy(enumerate_cc_bruteforce(f));
  CHECK(g.classes.size() == 102);
  std::size_t total = 0, free_action = 0;
  for (std::size_t s : g.class_size) {
    total += s;
    CHECK(48 % s == 0);
    free_action += s == 48;
  }
  CHECK(total == 2644);
  CHECK(free_action == 27);
  CHECK(g.maximal_nodes().size() == 12);
  CHECK(g.edge_discrepancy().empty());

  const auto st = stats(g);
  CHECK(st.tight_classes == 44);
  CHECK(st.nontight_classes == 58);
  CHECK(st.no_fixed_definite_classes == 13);
  CHECK(st.order_induced_classes == 5);
  CHECK(st.maxima_classes == 2);

  // maxima are exactly the switch spaces
  std::vector<HistorySpace> maxima;
  for (std::size_t i : g.maximal_nodes()) maxima.push_back(g.nodes[i]);
  CHECK(canonical_set(maxima) == canonical_set(switch_spaces(f)));

  const auto lm = landmark_classes(g);
  CHECK(lm.size() == 6);
  CHECK(g.class_size[lm.at("discrete")] == 1);
  CHECK(g.class_size[lm.at("total")] == 6);
  CHECK(g.class_size[lm.at("switch")] == 6);
  CHECK(g.class_size[lm.at("fork")] == 3);
  CHECK(g.class_size[lm.at("wedge")] == 3);
  CHECK(g.class_size[lm.at("total+point")] == 6);
}

TEST_CASE("joins and meets at two events") {
  const InputFamily f = InputFamily::uniform(2, 2);
  const auto a = induce(builtin_order("total:A,B"), f);
  const auto b = induce(builtin_order("total:B,A"), f);
  const auto m = space_meet(a, b);
  CHECK(is_order_induced(a));
  CHECK(m == induce(discrete(f.events()), f));
  const auto spaces = enumerate_cc_bruteforce(f);
  std::size_t induced = 0;
  for (const auto& s : spaces) induced += is_order_induced(s);
  CHECK(induced == 3);
  // complete spaces are not closed under join
  const auto j = space_join(a, b);
  CHECK(j == induce(indiscrete(f.events()), f));
  CHECK_FALSE(is_causally_complete(j));
}

TEST_CASE("hierarchy of a single space") {
  const InputFamily f = InputFamily::uniform(2, 2);
  const auto g = build_hierarchy({induce(discrete(f.events()), f)});
  CHECK(g.nodes.size() == 1);
  CHECK(g.edges.empty());
  CHECK(g.classes.size() == 1);
}

TEST_CASE("dfs jobs give the same stream") {
  const InputFamily f = InputFamily::uniform(3, 2);
  const auto one = enumerate_cc_dfs(f);
  DfsOptions o;
  o.jobs = 4;
  const auto four = enumerate_cc_dfs(f, o);
  CHECK(four.records == one.records);
  o.checkpoint = scratch("jobs.json").string();
  CHECK_THROWS_AS(enumerate_cc_dfs(f, o), Error);
}

TEST_CASE("dfs resume") {
  const InputFamily f = InputFamily::uniform(3, 2);
  const auto full = enumerate_cc_dfs(f);
  const auto cp = scratch("resume.json");
  DfsOptions o;
  o.checkpoint = cp.string();
  o.max_records = 40;
  const auto first = enumerate_cc_dfs(f, o);
  CHECK_FALSE(first.complete);
  CHECK(first.records.size() == 40);
  o.max_records.reset();
  const auto rest = enumerate_cc_dfs(f, o);
  CHECK(rest.complete);
  // the resumed run reloads the stream, then continues it
  CHECK(rest.records == full.records);
  CHECK(std::equal(first.records.begin(), first.records.end(), full.records.begin()));

  std::ifstream stream(cp.string() + ".stream");
  std::size_t lines = 0;
  for (std::string line; std::getline(stream, line);) ++lines;
  CHECK(lines == full.records.size());
}

TEST_CASE("corrupt checkpoint") {
  const InputFamily f = InputFamily::uniform(3, 2);
  const auto cp = scratch("corrupt.json");
  DfsOptions o;
  o.checkpoint = cp.string();
  o.max_records = 10;
  enumerate_cc_dfs(f, o);
  fs::resize_file(cp.string() + ".stream", 5);
  o.max_records.reset();
  CHECK_THROWS_AS(enumerate_cc_dfs(f, o), Error);

  std::ofstream(cp) << "{not json";
  CHECK_THROWS_AS(enumerate_cc_dfs(f, o), Error);

  const auto other = scratch("other.json");
  o.checkpoint = other.string();
  o.max_records = 5;
  enumerate_cc_dfs(f, o);
  CHECK_THROWS_AS(enumerate_cc_dfs(InputFamily::uniform(2, 2), o), Error);
}

TEST_CASE("size guards") {
  CHECK_THROWS_AS(enumerate_cc_bruteforce(InputFamily::uniform(4, 2)), SizeGuardError);
}
