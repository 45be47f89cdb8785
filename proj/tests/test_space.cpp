#include <doctest.h>

#include <algorithm>

#include "causality/space.hpp"

using namespace causality;

namespace {

HistorySpace hist(const std::string& order, std::size_t k = 2) {
  const Preorder o = builtin_order(order);
  return induce(o, InputFamily::uniform(o.events(), k));
}

HistorySpace switch3() {
  const InputFamily a = InputFamily::uniform(EventSet({"A"}), 2);
  const HistorySpace sa = induce(builtin_order("discrete:A"), a);
  Continuations next;
  next.emplace(make_pf(a, {{"A", 0}}), hist("total:B,C"));
  next.emplace(make_pf(a, {{"A", 1}}), hist("total:C,B"));
  return cond_sequential(sa, next);
}

std::size_t count_tips(const TipReport& r, EventMask tip_set) {
  return static_cast<std::size_t>(std::count(r.tips.begin(), r.tips.end(), tip_set));
}

}  // namespace

TEST_CASE("induced spaces") {
  CHECK(hist("total:A,B,C").size() == 14);
  CHECK(hist("discrete:A,B,C").size() == 6);
  CHECK(extended_histories(hist("discrete:A,B,C")).size() == 26);
  CHECK(hist("wedge").size() == 12);
  CHECK(hist("fork").size() == 10);
  CHECK(hist("total:A,{B,C}").size() == 2 + 8);
  const Preorder tp = join(builtin_order("total:A,B"), builtin_order("discrete:C"));
  CHECK(induce(tp, InputFamily::uniform(tp.events(), 2)).size() == 8);
  CHECK(extended_histories(hist("diamond")).size() == 34);
  CHECK_THROWS_AS(induce(builtin_order("total:A,B"), InputFamily::uniform(3, 2)), Error);
}

TEST_CASE("history space validation") {
  const InputFamily ab = InputFamily::uniform(2, 2);
  CHECK_THROWS_AS(HistorySpace(ab, {make_pf(ab, {{"A", 0}}), make_pf(ab, {{"B", 0}}),
                                    make_pf(ab, {{"A", 0}, {"B", 0}})}),
                  Error);
  CHECK_THROWS_AS(HistorySpace(ab, {empty_function(ab)}), Error);
  const auto s = HistorySpace::parse(ab, {"B/0", "A/1"});
  CHECK(s.size() == 2);
  CHECK(s.histories().front() == make_pf(ab, {{"A", 1}}));
}

TEST_CASE("extended histories") {
  for (const char* t : {"total:A,B,C", "total:B,A", "total:C,A,B"}) {
    const auto s = hist(t);
    CHECK(extended_histories(s) == s.histories());
    CHECK(is_join_closed(s));
  }
  // M shape: two maxima over a shared middle event, no total history
  const std::pair<std::string, std::string> m[] = {{"A", "C"}, {"B", "C"}, {"B", "D"}};
  const Preorder om = from_relation(EventSet::letters(4), m);
  const auto sm = induce(om, InputFamily::uniform(om.events(), 2));
  CHECK_FALSE(is_join_closed(sm));
  for (const auto& h : sm.histories()) CHECK(h.domain_size() < 4);
  const auto e = extend(sm);
  for (const auto& k : e.maximal) CHECK(k.domain_size() == 4);
}

TEST_CASE("free choice") {
  const InputFamily ab = InputFamily::uniform(2, 2);
  CHECK_FALSE(free_choice(HistorySpace::parse(ab, {"A/0", "A/1", "B/0"})));
  CHECK(free_choice(HistorySpace::parse(InputFamily::uniform(1, 2), {"A/0", "A/1"})));
  for (const auto& o : enumerate_preorders(EventSet::letters(3))) {
    CHECK(free_choice(induce(o, InputFamily::uniform(o.events(), 2))));
  }
}

TEST_CASE("refinement order") {
  CHECK(space_leq(hist("fork"), hist("total:A,B,C")));
  CHECK_FALSE(space_leq(hist("total:A,B,C"), hist("fork")));
  CHECK(space_leq(switch3(), hist("total:A,{B,C}")));
  CHECK(space_leq(switch3(), switch3()));

  const auto all = enumerate_preorders(EventSet::letters(3));
  for (const auto& a : all) {
    const auto ha = induce(a, InputFamily::uniform(a.events(), 2));
    for (const auto& b : all) {
      const auto hb = induce(b, InputFamily::uniform(b.events(), 2));
      CHECK(includes(a, b) == space_leq(ha, hb));
    }
  }
}

TEST_CASE("join and meet") {
  const auto all = enumerate_preorders(EventSet::letters(3));
  const InputFamily f = InputFamily::uniform(3, 2);
  for (std::size_t i = 0; i < all.size(); i += 3) {
    for (std::size_t j = 0; j < all.size(); j += 2) {
      CHECK(space_join(induce(all[i], f), induce(all[j], f)) == induce(join(all[i], all[j]), f));
    }
  }
  const auto t = hist("total:A,B,C");
  CHECK(space_join(t, t) == t);
  CHECK(space_meet(t, t) == t);

  const Preorder left = join(builtin_order("total:A,B"), builtin_order("discrete:C"));
  const Preorder right = join(builtin_order("discrete:A"), builtin_order("total:C,B"));
  const auto theta3 = space_meet(induce(left, f), induce(right, f));
  CHECK(free_choice(theta3));
  CHECK(is_causally_complete(theta3));
  CHECK_FALSE(is_tight(theta3));
  for (const auto& o : all) CHECK_FALSE(theta3 == induce(o, f));
  CHECK(space_leq(theta3, induce(left, f)));
  CHECK(space_leq(theta3, induce(right, f)));
}

TEST_CASE("compositions") {
  const auto ab = hist("discrete:A,B");
  const auto cd = hist("total:C,D");
  CHECK(parallel(ab, cd).size() == ab.size() + cd.size());
  const Preorder joined = join(builtin_order("discrete:A,B"), builtin_order("total:C,D"));
  CHECK(parallel(ab, cd) == induce(joined, InputFamily::uniform(joined.events(), 2)));

  const auto seq = sequential(ab, cd);
  // Θ plus one copy of Θ' above each of the 4 maximal histories
  CHECK(seq.size() == ab.size() + 4 * cd.size());
  CHECK(free_choice(seq));
  CHECK(is_causally_complete(seq));
  CHECK_THROWS_AS(parallel(ab, ab), Error);

  const auto sw = switch3();
  CHECK(sw.size() == 14);
  CHECK(is_causally_complete(sw));
  CHECK(is_join_closed(sw));
  CHECK(is_tight(sw));

  const InputFamily a = InputFamily::uniform(EventSet({"A"}), 2);
  Continuations missing;
  missing.emplace(make_pf(a, {{"A", 0}}), hist("total:B,C"));
  CHECK_THROWS_AS(cond_sequential(induce(builtin_order("discrete:A"), a), missing), Error);
}

TEST_CASE("sequential of complete spaces stays complete and tight") {
  const auto seq = sequential(hist("total:A,B"), hist("fork:C,D,E"));
  CHECK(free_choice(seq));
  CHECK(is_causally_complete(seq));
  CHECK(is_tight(seq));
  const auto par = parallel(hist("total:A,B"), hist("fork:C,D,E"));
  CHECK(is_causally_complete(par));
  CHECK(is_tight(par));
}

TEST_CASE("tips") {
  const auto ind = hist("total:A,{B,C}");
  const auto r = tips(ind);
  const EventMask bc = bit(1) | bit(2);
  CHECK(count_tips(r, bc) == 8);
  CHECK(count_tips(r, bit(0)) == 2);
  CHECK_FALSE(is_causally_complete(ind));
  CHECK_FALSE(is_causally_complete_by_descent(ind));

  const auto t = hist("total:A,B,C");
  const auto rt = tips(t);
  for (std::size_t i = 0; i < rt.histories.size(); ++i) {
    const auto& h = rt.histories[i];
    const EventMask d = h.domain();
    CHECK(rt.tips[i] == (d & ~(d >> 1)) );
  }
  // strictly extended histories have no tips
  const auto disc = hist("discrete:A,B,C");
  const auto rd = tips(disc);
  for (std::size_t i = 0; i < rd.histories.size(); ++i) {
    CHECK((rd.tips[i] != 0) == disc.contains(rd.histories[i]));
  }
}

TEST_CASE("completeness characterisations agree") {
  for (const auto& o : enumerate_preorders(EventSet::letters(3))) {
    const auto s = induce(o, InputFamily::uniform(o.events(), 2));
    CHECK(is_causally_complete(s) == is_definite(o));
    CHECK(is_causally_complete_by_descent(s) == is_definite(o));
    CHECK(is_tight(s));
    CHECK(is_tight(s, TightnessMode::MaximalOnly));
  }
}

TEST_CASE("tightness counterexample with a shared tip") {
  const InputFamily f = InputFamily::uniform(3, 2);
  // C is a tip of both A/1,C/1 and B/1,C/1 below A/1,B/1,C/1
  std::vector<std::string> hs{"A/0", "A/1", "B/0", "B/1", "C/0", "A/1, C/1", "B/1, C/1"};
  const auto theta = HistorySpace::parse(f, hs);
  CHECK_FALSE(is_tight(theta));
}

TEST_CASE("causal completions") {
  const auto ind = hist("total:A,{B,C}");
  const auto cs = causal_completions(ind);
  REQUIRE(cs.size() == 4);
  CHECK(std::find(cs.begin(), cs.end(), hist("total:A,B,C")) != cs.end());
  CHECK(std::find(cs.begin(), cs.end(), induce(total(EventSet::letters(3), std::vector<std::string>{"A", "C", "B"}), InputFamily::uniform(3, 2))) != cs.end());
  CHECK(std::find(cs.begin(), cs.end(), switch3()) != cs.end());
  for (const auto& c : cs) {
    CHECK(is_causally_complete(c));
    CHECK(space_leq(c, ind));
    CHECK(c.events() == ind.events());
  }
  const auto t = hist("fork");
  CHECK(causal_completions(t) == std::vector<HistorySpace>{t});
  const InputFamily ab = InputFamily::uniform(2, 2);
  CHECK_THROWS_AS(causal_completions(HistorySpace::parse(ab, {"A/0", "A/1", "B/0"})), Error);
}

TEST_CASE("switch spaces") {
  CHECK(count_switch_spaces(0, 2) == 1);
  CHECK(count_switch_spaces(1, 2) == 1);
  CHECK(count_switch_spaces(2, 2) == 2);
  CHECK(count_switch_spaces(3, 2) == 12);
  CHECK(count_switch_spaces(4, 2) == 576);
  CHECK(count_switch_spaces(3, 3) == 1 * 8 * 3);
  CHECK_THROWS_AS(count_switch_spaces(12, 3), SizeGuardError);

  const auto two = switch_spaces(InputFamily::uniform(2, 2));
  REQUIRE(two.size() == 2);
  CHECK(std::find(two.begin(), two.end(), hist("total:A,B")) != two.end());
  CHECK(std::find(two.begin(), two.end(), induce(total(EventSet::letters(2), std::vector<std::string>{"B", "A"}), InputFamily::uniform(2, 2))) != two.end());

  for (std::size_t n = 0; n <= 3; ++n) {
    const InputFamily f = InputFamily::uniform(n, 2);
    const auto sw = switch_spaces(f);
    CHECK(sw.size() == count_switch_spaces(n, 2));
    CHECK(sw.size() == count_switch_spaces(f));
    for (const auto& s : sw) {
      CHECK(is_join_closed(s));
      if (n > 0) CHECK(is_causally_complete(s));
    }
  }
  CHECK(switch_spaces(InputFamily::uniform(4, 2)).size() == 576);
  const InputFamily mixed(EventSet::letters(2), {3, 1});
  CHECK(switch_spaces(mixed).size() == count_switch_spaces(mixed));
}
