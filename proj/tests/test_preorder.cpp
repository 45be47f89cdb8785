#include <doctest.h>

#include <algorithm>
#include <random>

#include "causality/preorder.hpp"

using namespace causality;

namespace {

EventMask mask(const Preorder& o, std::initializer_list<std::string> labels) {
  EventMask m = 0;
  for (const auto& l : labels) m |= bit(o.events().index_of(l));
  return m;
}

std::vector<EventMask> sets(const Preorder& o, std::initializer_list<std::initializer_list<std::string>> ls) {
  std::vector<EventMask> out{0};
  for (auto l : ls) out.push_back(mask(o, l));
  std::sort(out.begin(), out.end());
  return out;
}

// reflexive transitive relations by brute force over all n*n bit matrices
std::size_t count_preorders_naive(std::size_t n) {
  std::size_t count = 0;
  const std::size_t off = n * n - n;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << off); ++bits) {
    std::vector<std::vector<bool>> r(n, std::vector<bool>(n, true));
    std::size_t b = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) r[i][j] = (bits >> b++) & 1U;
      }
    }
    bool transitive = true;
    for (std::size_t i = 0; i < n && transitive; ++i) {
      for (std::size_t j = 0; j < n && transitive; ++j) {
        for (std::size_t k = 0; k < n && transitive; ++k) {
          if (r[i][j] && r[j][k] && !r[i][k]) transitive = false;
        }
      }
    }
    count += transitive;
  }
  return count;
}

}  // namespace

TEST_CASE("event sets") {
  const EventSet e({"A", "B", "C"});
  CHECK(e.index_of("C") == 2);
  CHECK_FALSE(e.find("D").has_value());
  CHECK_THROWS_AS(e.index_of("D"), Error);
  CHECK_THROWS_AS(EventSet({"A", "A"}), Error);
  CHECK(EventSet::letters(3) == e);
  CHECK(EventSet({"B", "A"}).same_members(EventSet({"A", "B"})));
}

TEST_CASE("construction") {
  const EventSet ab({"A", "B"}), abc({"A", "B", "C"});
  const Preorder d = discrete(ab);
  CHECK(d.rows() == std::vector<EventMask>{bit(0), bit(1)});
  CHECK(classify_relation(d, "A", "B") == CausalRelation::Unrelated);

  const Preorder t = total(abc);
  CHECK(t.leq("A", "B"));
  CHECK(t.leq("B", "C"));
  CHECK(t.leq("A", "C"));
  CHECK_FALSE(t.leq("C", "A"));

  const std::pair<std::string, std::string> bc[] = {{"B", "C"}, {"C", "B"}};
  const Preorder r = from_relation(abc, bc);
  CHECK(classify_relation(r, "B", "C") == CausalRelation::Indefinite);
  CHECK(classify_relation(r, "A", "B") == CausalRelation::Unrelated);
  CHECK(classify_relation(r, "A", "C") == CausalRelation::Unrelated);

  const std::vector<std::string> bad{"A", "A", "B"};
  CHECK_THROWS_AS(total(abc, bad), Error);
  const std::pair<std::string, std::string> unknown[] = {{"A", "Z"}};
  CHECK_THROWS_AS(from_relation(abc, unknown), Error);
}

TEST_CASE("classify relation and definiteness") {
  const EventSet ab({"A", "B"});
  CHECK(classify_relation(total(ab), "A", "B") == CausalRelation::Precedes);
  CHECK(classify_relation(total(ab), "B", "A") == CausalRelation::Succeeds);
  CHECK(classify_relation(indiscrete(ab), "A", "B") == CausalRelation::Indefinite);
  CHECK(classify_relation(discrete(ab), "A", "B") == CausalRelation::Unrelated);
  CHECK(classify_relation(discrete(ab), "A", "A") == CausalRelation::Equal);
  CHECK_THROWS_AS(classify_relation(discrete(ab), "A", "Q"), Error);

  CHECK(is_definite(discrete(EventSet::letters(5))));
  CHECK_FALSE(is_definite(indiscrete(EventSet::letters(3))));
  CHECK_FALSE(is_definite(builtin_order("total:A,{B,C},D")));
}

TEST_CASE("cones") {
  const Preorder t = builtin_order("total:A,B,C");
  CHECK(cones(t, "B").past == mask(t, {"A", "B"}));
  CHECK(cones(t, "B").future == mask(t, {"B", "C"}));
  const Preorder d = builtin_order("diamond");
  CHECK(cones(d, "D").past == mask(d, {"A", "B", "C", "D"}));
  CHECK(cones(d, "B").past == mask(d, {"A", "B"}));
  const Preorder ind = builtin_order("total:A,{B,C},D");
  CHECK(cones(ind, "B").equivalence_class == mask(ind, {"B", "C"}));
}

TEST_CASE("join") {
  const Preorder ab = builtin_order("total:A,B");
  const Preorder c = builtin_order("discrete:C");
  const Preorder j = join(ab, c);
  CHECK(j.size() == 3);
  CHECK(j.leq("A", "B"));
  CHECK(classify_relation(j, "A", "C") == CausalRelation::Unrelated);
  CHECK(classify_relation(j, "B", "C") == CausalRelation::Unrelated);

  const Preorder k = join(builtin_order("total:A,B,C"), builtin_order("total:A,C,B"));
  CHECK(classify_relation(k, "B", "C") == CausalRelation::Indefinite);

  const Preorder m = join(builtin_order("total:A,B,C,D"), builtin_order("total:A,C,B,D"));
  CHECK(m == builtin_order("total:A,{B,C},D"));
}

TEST_CASE("meet") {
  const Preorder m = meet(builtin_order("total:A,B,C,D"), builtin_order("total:A,C,B,D"));
  CHECK(m == builtin_order("diamond"));
  const Preorder t = builtin_order("total:A,B,C");
  CHECK(meet(t, t) == t);

  // indefinite pairs resolve to the definite side's direction
  const Preorder left = builtin_order("total:A,{B,C},D");
  const Preorder right = builtin_order("total:A,B,{C,D}");
  const Preorder both = meet(left, right);
  CHECK(classify_relation(both, "B", "C") == CausalRelation::Precedes);
  CHECK(classify_relation(both, "C", "D") == CausalRelation::Precedes);
  CHECK_THROWS_AS(meet(t, builtin_order("total:A,B")), Error);
}

TEST_CASE("sequential composition") {
  const Preorder ab = builtin_order("total:A,B");
  const Preorder cd = builtin_order("discrete:C,D");
  CHECK(sequential_compose(std::span<const Preorder>(&ab, 1)) == ab);
  const Preorder fork = sequential_compose(ab, cd);
  CHECK(classify_relation(fork, "B", "C") == CausalRelation::Precedes);
  CHECK(classify_relation(fork, "B", "D") == CausalRelation::Precedes);
  CHECK(classify_relation(fork, "C", "D") == CausalRelation::Unrelated);
  const Preorder wedge = sequential_compose(cd, ab);
  CHECK(classify_relation(wedge, "C", "A") == CausalRelation::Precedes);
  CHECK(classify_relation(wedge, "D", "A") == CausalRelation::Precedes);
  CHECK_THROWS_AS(sequential_compose(ab, ab), Error);
}

TEST_CASE("replacement and products") {
  const Preorder t = builtin_order("total:A,B,C");
  std::map<std::string, Preorder> singletons;
  for (const auto& l : t.events().labels()) singletons.emplace(l, builtin_order("discrete:" + l));
  CHECK(replacement(t, singletons) == t);

  const Preorder xi = builtin_order("diamond:P,Q,R,S");
  const Preorder five = join(xi, builtin_order("discrete:T"));
  const Preorder r = replacement(t, {{"B", five}});
  CHECK(r.size() == 7);
  for (const auto& l : five.events().labels()) {
    CHECK(r.leq("A", l));
    CHECK(r.leq(l, "C"));
  }
  CHECK(classify_relation(r, "P", "T") == CausalRelation::Unrelated);
  CHECK_THROWS_AS(replacement(t, {{"A", builtin_order("discrete:X")}, {"B", builtin_order("discrete:X")}}), Error);

  const Preorder lex = lexicographic_product(builtin_order("wedge"), builtin_order("fork:X,Y,Z"));
  CHECK(lex.size() == 9);
  CHECK(lex.leq("A.Y", "C.X"));
  CHECK(lex.leq("A.X", "A.Z"));
  CHECK(classify_relation(lex, "A.X", "B.X") == CausalRelation::Unrelated);

  const Preorder grid = cartesian_product(builtin_order("total:A,B,C"), builtin_order("total:X,Y,Z"));
  CHECK(grid.size() == 9);
  CHECK(classify_relation(grid, "(B,X)", "(A,Y)") == CausalRelation::Unrelated);
  CHECK(grid.leq("(A,X)", "(C,Z)"));
  CHECK(is_definite(grid));
  const Preorder one = cartesian_product(t, builtin_order("discrete:X"));
  CHECK(one.rows() == t.rows());
}

TEST_CASE("inclusion") {
  CHECK(includes(builtin_order("fork"), builtin_order("total:A,B,C")));
  CHECK_FALSE(includes(builtin_order("total:A,B"), builtin_order("total:B,A")));
  for (const auto& o : enumerate_preorders(EventSet::letters(3))) {
    CHECK(includes(o, indiscrete(o.events())));
    CHECK(includes(discrete(o.events()), o));
  }
}

TEST_CASE("enumeration") {
  const std::size_t want[] = {1, 1, 4, 29, 355};
  for (std::size_t n = 1; n <= 4; ++n) CHECK(enumerate_preorders(EventSet::letters(n)).size() == want[n]);
  // independent count over all relation matrices
  for (std::size_t n = 1; n <= 4; ++n) CHECK(count_preorders_naive(n) == want[n]);
  CHECK(enumerate_preorders(EventSet::letters(4), builtin_order("diamond")).size() == 25);
  CHECK(enumerate_preorders(EventSet::letters(3), discrete(EventSet::letters(3))).size() == 1);
  CHECK_THROWS_AS(enumerate_preorders(EventSet::letters(6)), SizeGuardError);

  const auto all = enumerate_preorders(EventSet::letters(3));
  CHECK(std::is_sorted(all.begin(), all.end(), encoding_less));
}

TEST_CASE("lattice laws on 3 events") {
  const auto all = enumerate_preorders(EventSet::letters(3));
  std::mt19937 rng(7);
  std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
  for (int i = 0; i < 200; ++i) {
    const auto &a = all[pick(rng)], &b = all[pick(rng)], &c = all[pick(rng)];
    CHECK(join(a, b) == join(b, a));
    CHECK(meet(a, b) == meet(b, a));
    CHECK(join(join(a, b), c) == join(a, join(b, c)));
    CHECK(meet(meet(a, b), c) == meet(a, meet(b, c)));
    CHECK(join(a, a) == a);
    CHECK(join(a, meet(a, b)) == a);
  }
}

TEST_CASE("hasse diagrams") {
  auto d = hasse_diagram(builtin_order("total:A,B,C"));
  CHECK(d.classes.size() == 3);
  CHECK(d.edges.size() == 2);

  const Preorder diamond = builtin_order("diamond");
  d = hasse_diagram(diamond);
  CHECK(d.classes.size() == 4);
  using E = std::pair<std::size_t, std::size_t>;
  std::vector<E> edges = d.edges;
  std::sort(edges.begin(), edges.end());
  CHECK(edges == std::vector<E>{{0, 1}, {0, 2}, {1, 3}, {2, 3}});

  const Preorder ind = builtin_order("total:A,{B,C},D");
  d = hasse_diagram(ind);
  CHECK(d.classes.size() == 3);
  CHECK(d.edges.size() == 2);
  CHECK(d.classes[1] == mask(ind, {"B", "C"}));

  for (const auto& o : enumerate_preorders(EventSet::letters(4))) {
    CHECK(order_from_hasse(o.events(), hasse_diagram(o)) == o);
  }
}

TEST_CASE("lowersets") {
  const Preorder t = builtin_order("total:A,B,C");
  CHECK(lowersets(t).sets == sets(t, {{"A"}, {"A", "B"}, {"A", "B", "C"}}));
  CHECK(lowersets(t).nonempty_count() == 3);
  const Preorder d = builtin_order("diamond");
  CHECK(lowersets(d).sets == sets(d, {{"A"}, {"A", "B"}, {"A", "C"}, {"A", "B", "C"}, {"A", "B", "C", "D"}}));
  const Preorder ind = builtin_order("total:A,{B,C},D");
  CHECK(lowersets(ind).sets == sets(ind, {{"A"}, {"A", "B", "C"}, {"A", "B", "C", "D"}}));

  for (const auto& o : enumerate_preorders(EventSet::letters(3))) {
    const auto l = lowersets(o);
    for (EventMask u : l.sets) {
      for (EventMask v : l.sets) {
        CHECK(l.contains(u | v));
        CHECK(l.contains(u & v));
      }
    }
  }
}

TEST_CASE("lowerset propositions at n=4 spot check") {
  const auto all = enumerate_preorders(EventSet::letters(4));
  std::mt19937 rng(11);
  std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
  for (int i = 0; i < 300; ++i) {
    const auto &a = all[pick(rng)], &b = all[pick(rng)];
    const auto la = lowersets(a).sets, lb = lowersets(b).sets;
    std::vector<EventMask> both;
    std::set_intersection(la.begin(), la.end(), lb.begin(), lb.end(), std::back_inserter(both));
    CHECK(both == lowersets(join(a, b)).sets);
    CHECK(includes(a, b) == std::includes(la.begin(), la.end(), lb.begin(), lb.end()));
  }
}

TEST_CASE("builtin orders") {
  CHECK(builtin_order("fork").leq("A", "C"));
  CHECK(builtin_order("wedge").leq("B", "C"));
  CHECK_FALSE(is_definite(builtin_order("indiscrete:A,B")));
  CHECK_THROWS_AS(builtin_order("nonsense"), Error);
}
