#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "causality/pfun.hpp"

using namespace causality;

namespace {

const InputFamily kAB = InputFamily::uniform(2, 2);

std::vector<PartialFunction> all_functions(const InputFamily& family) {
  std::vector<PartialFunction> out;
  for (PFCode c = 0; c < family.code_count(); ++c) out.push_back(decode(family, c));
  return out;
}

bool is_compatible_join(const PartialFunction& f, std::span<const PartialFunction> w) {
  std::vector<PartialFunction> below;
  for (const auto& g : w) {
    if (g != f && leq(g, f)) below.push_back(g);
  }
  const auto j = join(below, f.arity());
  return !below.empty() && j && *j == f;
}

}  // namespace

TEST_CASE("order and compatibility") {
  const auto a0 = make_pf(kAB, {{"A", 0}});
  const auto a0b1 = make_pf(kAB, {{"A", 0}, {"B", 1}});
  const auto a1 = make_pf(kAB, {{"A", 1}});
  const auto b0 = make_pf(kAB, {{"B", 0}});
  const auto b1 = make_pf(kAB, {{"B", 1}});
  CHECK(leq(a0, a0b1));
  CHECK_FALSE(leq(a1, a0b1));
  CHECK(leq(empty_function(kAB), a1));
  CHECK(compatible(a0, b1));
  CHECK_FALSE(compatible(a0, a1));
  CHECK(join(a0, b1) == a0b1);
  CHECK_FALSE(join(a0, a1).has_value());
  CHECK(meet(a0b1, make_pf(kAB, {{"A", 0}, {"B", 0}})) == a0);
  CHECK(meet(a0, b0).empty());
  CHECK(join(std::span<const PartialFunction>{}, 2) == empty_function(kAB));
}

TEST_CASE("meet is the greatest lower bound") {
  const auto fs = all_functions(kAB);
  REQUIRE(fs.size() == 9);
  for (const auto& f : fs) {
    for (const auto& g : fs) {
      const auto m = meet(f, g);
      CHECK(leq(m, f));
      CHECK(leq(m, g));
      for (const auto& h : fs) {
        if (leq(h, f) && leq(h, g)) CHECK(leq(h, m));
      }
      const auto j = join(f, g);
      CHECK(j.has_value() == compatible(f, g));
      if (j) {
        for (const auto& h : fs) {
          if (leq(f, h) && leq(g, h)) CHECK(leq(*j, h));
        }
      }
    }
  }
}

TEST_CASE("encoding") {
  const InputFamily abc = InputFamily::uniform(3, 2);
  CHECK(abc.code_count() == 27);
  std::set<PFCode> seen;
  for (PFCode c = 0; c < 27; ++c) {
    const auto f = decode(abc, c);
    CHECK(encode(abc, f) == c);
    seen.insert(c);
    if (c > 0) CHECK(decode(abc, c - 1) < f);
  }
  CHECK(seen.size() == 27);
  CHECK(encode(abc, make_pf(abc, {{"A", 0}})) == 1);
  CHECK(encode(abc, make_pf(abc, {{"B", 1}})) == 6);
  CHECK_THROWS_AS(decode(abc, 27), Error);

  const InputFamily mixed(EventSet::letters(2), {3, 1});
  CHECK(mixed.code_count() == 8);
  CHECK(encode(mixed, make_pf(mixed, {{"A", 2}, {"B", 0}})) == 7);
  CHECK_THROWS_AS(validate(mixed, make_pf(kAB, {{"B", 1}})), Error);
}

TEST_CASE("text form") {
  const InputFamily abc = InputFamily::uniform(3, 2);
  const auto f = make_pf(abc, {{"A", 0}, {"C", 1}});
  CHECK(to_text(abc, f) == "A/0, C/1");
  CHECK(parse_text(abc, "A/0, C/1") == f);
  CHECK(parse_text(abc, "C/1,A/0") == f);
  CHECK_THROWS_AS(parse_text(abc, "A/2"), Error);
  CHECK_THROWS_AS(parse_text(abc, "D/0"), Error);
}

TEST_CASE("closure and prime elements") {
  const auto a0 = make_pf(kAB, {{"A", 0}}), a1 = make_pf(kAB, {{"A", 1}});
  const auto b0 = make_pf(kAB, {{"B", 0}}), b1 = make_pf(kAB, {{"B", 1}});
  const std::vector<PartialFunction> singles{a0, a1, b0, b1};
  const auto c = closure(singles);
  CHECK(c.size() == 8);
  CHECK(prime_elements(c) == singles);

  const InputFamily abc = InputFamily::uniform(3, 2);
  std::vector<PartialFunction> discrete;
  for (std::size_t e = 0; e < 3; ++e) {
    for (std::size_t v = 0; v < 2; ++v) {
      PartialFunction f(3);
      f.set(e, v);
      discrete.push_back(f);
    }
  }
  const auto ext = closure(discrete);
  CHECK(ext.size() == 26);
  CHECK(prime_elements(ext) == discrete);

  std::vector<PartialFunction> dup{b0, a0, b0};
  normalize(dup);
  CHECK(dup == std::vector<PartialFunction>{a0, b0});
}

TEST_CASE("closure and primes round trip on random sets") {
  const InputFamily abc = InputFamily::uniform(3, 2);
  auto fs = all_functions(abc);
  fs.erase(fs.begin());  // empty function
  std::mt19937 rng(3);
  for (int round = 0; round < 300; ++round) {
    std::vector<PartialFunction> w;
    for (const auto& f : fs) {
      if (rng() % 4 == 0) w.push_back(f);
    }
    normalize(w);
    const auto c = closure(w);
    // closure is closed and contains w
    CHECK(closure(c) == c);
    CHECK(std::includes(c.begin(), c.end(), w.begin(), w.end()));
    const auto p = prime_elements(c);
    CHECK(closure(p) == c);
    // naive primes: elements of c that are not joins of smaller elements of c
    std::vector<PartialFunction> naive;
    for (const auto& f : c) {
      if (!is_compatible_join(f, c)) naive.push_back(f);
    }
    CHECK(p == naive);
  }
}

TEST_CASE("families") {
  InputFamily f(EventSet({"X", "Y"}), {2, 3});
  f.set_value_names(0, {"lo", "hi"});
  CHECK(f.value_name(0, 1) == "hi");
  CHECK(f.parse_value(0, "lo") == 0);
  CHECK(f.parse_value(1, "2") == 2);
  CHECK_FALSE(f.is_uniform());
  const std::vector<std::string> y{"Y"};
  CHECK(f.restrict_to(y).input_counts() == std::vector<std::size_t>{3});
  const auto u = disjoint_union(f, InputFamily(EventSet({"Z"}), {1}));
  CHECK(u.size() == 3);
  CHECK_THROWS_AS(disjoint_union(f, f), Error);

  const auto g = make_pf(f, {{"Y", 2}});
  const auto e = embed(g, f, u);
  CHECK(e.arity() == 3);
  CHECK(e.at(1) == 2);
}
