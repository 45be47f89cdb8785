#include "causality/acceptance.hpp"

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "causality/classify.hpp"
#include "causality/universe.hpp"

namespace causality {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

// Collects failed checks; the first few become the detail line.
struct Checker {
  std::vector<std::string> failures;
  std::vector<std::string> notes;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  template <class A, class B>
  void equal(const A& got, const B& want, const std::string& what) {
    if (!(got == want)) {
      std::ostringstream os;
      os << what << ": got " << got << ", want " << want;
      failures.push_back(os.str());
    }
  }
  void note(const std::string& s) { notes.push_back(s); }

  std::string detail() const {
    std::string s;
    const auto& items = failures.empty() ? notes : failures;
    for (std::size_t i = 0; i < items.size() && i < 4; ++i) s += (i ? "; " : "") + items[i];
    if (items.size() > 4) s += "; ...";
    return s;
  }
};

std::set<CanonicalCode> canonical_set(const std::vector<HistorySpace>& spaces) {
  if (spaces.empty()) return {};
  const SymmetryGroup group(spaces.front().family());
  std::set<CanonicalCode> out;
  for (const auto& s : spaces) out.insert(group.canonical(s.codes()));
  return out;
}

std::set<std::vector<PFCode>> code_set(const std::vector<HistorySpace>& spaces) {
  std::set<std::vector<PFCode>> out;
  for (const auto& s : spaces) out.insert(s.codes());
  return out;
}

InputFamily binary(std::size_t n) { return InputFamily::uniform(n, 2); }

// ---------------------------------------------------------------------------

void preorder_counts(Checker& c) {
  const auto t = Clock::now();
  const std::size_t want[] = {0, 0, 4, 29, 355};
  for (std::size_t n = 2; n <= 4; ++n) {
    c.equal(enumerate_preorders(EventSet::letters(n)).size(), want[n], "orders on " + std::to_string(n));
  }
  const double small = since(t);
  c.expect(small < 5, "n<=4 took " + std::to_string(small) + " s");
  const auto t5 = Clock::now();
  c.equal(enumerate_preorders(EventSet::letters(5)).size(), std::size_t{6942}, "orders on 5");
  const double five = since(t5);
  c.expect(five < 60, "n=5 took " + std::to_string(five) + " s");
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << "4/29/355 in " << small << " s, 6942 in " << five << " s";
  c.note(os.str());
}

void diamond_suborders(Checker& c) {
  const Preorder diamond = builtin_order("diamond");
  const auto subs = enumerate_preorders(diamond.events(), diamond);
  c.equal(subs.size(), std::size_t{25}, "suborders of the diamond");
  c.expect(std::all_of(subs.begin(), subs.end(), [](const Preorder& o) { return is_definite(o); }),
           "every suborder definite");
  c.note("25 suborders, all definite");
}

void lowerset_props(Checker& c) {
  const auto orders = enumerate_preorders(EventSet::letters(3));
  std::size_t pairs = 0;
  for (const auto& a : orders) {
    const auto la = lowersets(a).sets;
    for (const auto& b : orders) {
      const auto lb = lowersets(b).sets;
      const bool contains = std::includes(la.begin(), la.end(), lb.begin(), lb.end());
      c.expect(includes(a, b) == contains, "inclusion equivalence");
      std::vector<EventMask> both;
      std::set_intersection(la.begin(), la.end(), lb.begin(), lb.end(), std::back_inserter(both));
      c.expect(both == lowersets(join(a, b)).sets, "intersection equals lowersets of join");
      ++pairs;
    }
  }
  c.equal(pairs, std::size_t{841}, "pairs checked");

  const EventSet ev = EventSet::letters(4);
  const std::pair<std::string, std::string> first[] = {{"A", "C"}, {"C", "D"}};
  const std::pair<std::string, std::string> second[] = {{"B", "C"}, {"C", "D"}};
  const Preorder o1 = from_relation(ev, first), o2 = from_relation(ev, second);
  const auto l1 = lowersets(o1).sets, l2 = lowersets(o2).sets;
  std::set<EventMask> uni(l1.begin(), l1.end());
  uni.insert(l2.begin(), l2.end());
  std::set<EventMask> missing;
  for (EventMask u : uni) {
    for (EventMask v : uni) {
      if (!uni.contains(u & v)) missing.insert(u & v);
    }
  }
  const std::vector<std::string> c_only{"C"}, c_d{"C", "D"};
  const std::set<EventMask> want{ev.mask_of(c_only), ev.mask_of(c_d)};
  c.expect(missing == want, "union counterexample misses exactly {C} and {C,D}");
  std::set<EventMask> completed = uni;
  completed.insert(want.begin(), want.end());
  const auto lm = lowersets(meet(o1, o2)).sets;
  c.expect(completed == std::set<EventMask>(lm.begin(), lm.end()),
           "adding the two intersections gives the lowersets of the meet");
  c.note("841 pairs at n=3; union misses {C} and {C,D}");
}

void induced_counts(Checker& c) {
  const InputFamily f = binary(3);
  const EventSet& ev = f.events();
  const std::pair<std::string, std::string> ab{"A", "B"};
  const struct {
    const char* name;
    Preorder order;
    std::size_t histories;
  } cases[] = {
      {"total", total(ev), 14},
      {"wedge", builtin_order("wedge"), 12},
      {"fork", builtin_order("fork"), 10},
      {"total+point", from_relation(ev, std::span(&ab, 1)), 8},
      {"discrete", discrete(ev), 6},
  };
  for (const auto& k : cases) c.equal(induce(k.order, f).size(), k.histories, k.name);
  c.equal(extended_histories(induce(discrete(ev), f)).size(), std::size_t{26}, "|Ext(discrete)|");
  c.note("14/12/10/8/6 histories, |Ext(discrete)|=26");
}

void cc_enumeration(Checker& c) {
  const std::size_t want[] = {0, 1, 7, 2644};
  for (std::size_t n = 1; n <= 3; ++n) {
    const InputFamily f = binary(n);
    const auto tb = Clock::now();
    const auto brute = enumerate_cc_bruteforce(f);
    const double brute_s = since(tb);
    const auto td = Clock::now();
    const DfsResult dfs = enumerate_cc_dfs(f);
    const double dfs_s = since(td);
    const std::string tag = "n=" + std::to_string(n);
    c.equal(brute.size(), want[n], tag + " brute-force spaces");
    c.expect(dfs.complete, tag + " dfs complete");
    const std::set<CanonicalCode> from_dfs(dfs.records.begin(), dfs.records.end());
    c.equal(from_dfs.size(), dfs.records.size(), tag + " dfs emits each class once");
    c.expect(canonical_set(brute) == from_dfs, tag + " engines agree on canonical codes");
    c.equal(expand_classes(f, dfs.records).size(), want[n], tag + " dfs spaces");
    if (n == 3) {
      c.equal(from_dfs.size(), std::size_t{102}, "n=3 classes");
      c.expect(brute_s < 600, "brute force under 10 min");
      c.expect(dfs_s < 60, "dfs under 1 min");
      std::ostringstream os;
      os << std::fixed << std::setprecision(2) << "1/7/2644 spaces, 102 classes; brute " << brute_s
         << " s, dfs " << dfs_s << " s";
      c.note(os.str());
    }
  }
}

void hierarchy_stats(Checker& c) {
  const InputFamily f = binary(3);
  const HierarchyGraph g = build_hierarchy(enumerate_cc_bruteforce(f));
  const Stats s = stats(g);
  c.equal(s.tight_classes, std::size_t{44}, "tight classes");
  c.equal(s.nontight_classes, std::size_t{58}, "non-tight classes");
  c.equal(s.no_fixed_definite_classes, std::size_t{13}, "classes without a fixed definite order");
  const auto maxima = g.maximal_nodes();
  c.equal(maxima.size(), std::size_t{12}, "maximal spaces");
  std::set<std::size_t> max_classes;
  for (std::size_t i : maxima) max_classes.insert(g.node_class[i]);
  c.equal(max_classes.size(), std::size_t{2}, "maximal classes");
  for (std::size_t k : max_classes) c.equal(g.class_size[k], std::size_t{6}, "maximal class size");
  const auto marks = landmark_classes(g);
  c.expect(marks.contains("discrete") && g.class_size[marks.at("discrete")] == 1,
           "discrete class has orbit size 1");
  const auto sizes = g.class_size;
  c.expect(std::count(sizes.begin(), sizes.end(), 24) >= 1, "some class has orbit size 24");
  c.equal(static_cast<std::size_t>(std::count(sizes.begin(), sizes.end(), 48)), std::size_t{27},
          "classes of orbit size 48");
  c.note("44 tight / 58 non-tight, 13 without fixed order, maxima 12 in 2x6, 27 free orbits");
}

void switch_checks(Checker& c) {
  const std::uint64_t want[] = {1, 1, 2, 12, 576};
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto t = Clock::now();
    const auto spaces = switch_spaces(binary(n));
    const double secs = since(t);
    const std::string tag = "n=" + std::to_string(n);
    c.equal(count_switch_spaces(n, 2), want[n], tag + " closed form");
    c.equal(static_cast<std::uint64_t>(spaces.size()), want[n], tag + " enumerated");
    c.equal(code_set(spaces).size(), spaces.size(), tag + " distinct");
    if (n == 4) {
      c.expect(secs < 10, "n=4 switch enumeration under 10 s");
      std::ostringstream os;
      os << std::fixed << std::setprecision(2) << "1/2/12/576; n=4 in " << secs << " s";
      c.note(os.str());
    }
  }
  for (std::size_t n = 1; n <= 3; ++n) {
    const InputFamily f = binary(n);
    const HierarchyGraph g = build_hierarchy(enumerate_cc_bruteforce(f));
    std::vector<HistorySpace> maxima;
    for (std::size_t i : g.maximal_nodes()) maxima.push_back(g.nodes[i]);
    c.expect(code_set(maxima) == code_set(switch_spaces(f)),
             "n=" + std::to_string(n) + " maxima equal switch spaces");
  }
}

void completion_checks(Checker& c) {
  const Preorder order = builtin_order("total:A,{B,C}");
  const InputFamily f = InputFamily::uniform(order.events(), 2);
  const auto comps = causal_completions(induce(order, f));
  c.equal(comps.size(), std::size_t{4}, "completions");
  const auto switches = code_set(switch_spaces(f));
  std::size_t definite = 0, switch_type = 0;
  for (const auto& s : comps) {
    const bool fixed = s == induce(builtin_order("total:A,B,C"), f) ||
                       s == induce(builtin_order("total:A,C,B"), f);
    const bool sw = switches.contains(s.codes()) && !is_order_induced(s);
    definite += fixed;
    switch_type += sw;
  }
  c.equal(definite, std::size_t{2}, "completions induced by A<B<C or A<C<B");
  c.equal(switch_type, std::size_t{2}, "switch completions not induced by any order");
  c.note("4 completions: 2 fixed orders, 2 switches");
}

// ---------------------------------------------------------------------------

// Random spaces on the given labels: induced, causally complete, or an
// arbitrary prime set.
class SpaceSource {
 public:
  explicit SpaceSource(std::uint64_t seed) : rng_(seed) {}

  HistorySpace draw(const std::vector<std::string>& labels) {
    const std::size_t n = labels.size();
    std::vector<std::size_t> counts(n);
    for (auto& k : counts) k = pick(2) + 1;
    const InputFamily fam(EventSet(labels), counts);
    switch (pick(3)) {
      case 0: {
        const auto orders = enumerate_preorders(fam.events());
        return induce(orders[pick(orders.size())], fam);
      }
      case 1:
        return pick_from(cc_spaces(fam));
      default: {
        const Universe u(fam);
        std::vector<PartialFunction> fs;
        u.nonempty().for_each([&](std::size_t code) {
          if (pick(3) == 0) fs.push_back(u.pf(code));
        });
        if (fs.empty()) fs.push_back(u.pf(1));
        return HistorySpace::from_extended(fam, fs);
      }
    }
  }

  const std::vector<HistorySpace>& cc_spaces(const InputFamily& fam) {
    auto key = std::make_pair(fam.events().labels(), fam.input_counts());
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, enumerate_cc_bruteforce(fam)).first;
    return it->second;
  }

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  const HistorySpace& pick_from(const std::vector<HistorySpace>& v) { return v[pick(v.size())]; }

 private:
  std::mt19937_64 rng_;
  std::map<std::pair<std::vector<std::string>, std::vector<std::size_t>>, std::vector<HistorySpace>> cache_;
};

void property_suites(Checker& c, std::uint64_t seed) {
  const InputFamily f3 = binary(3);
  const auto all3 = enumerate_cc_bruteforce(f3);

  // completeness: tips definition vs descent characterisation
  std::size_t agree = 0;
  for (const auto& s : all3) {
    agree += is_causally_complete(s) && is_causally_complete_by_descent(s) &&
             is_tight(s, TightnessMode::AllExtended) == is_tight(s, TightnessMode::MaximalOnly);
  }
  for (const auto& o : enumerate_preorders(f3.events())) {
    const auto h = induce(o, f3);
    c.expect(is_causally_complete(h) == is_causally_complete_by_descent(h), "characterisation on induced");
    c.expect(is_causally_complete(h) == is_definite(o), "induced completeness iff definite");
  }
  c.equal(agree, all3.size(), "completeness tests agree on every enumerated space");

  // tight meets of induced spaces
  const auto orders = enumerate_preorders(f3.events());
  std::size_t meets = 0;
  for (const auto& a : orders) {
    for (const auto& b : orders) {
      bool nested = true;
      for (std::size_t w = 0; w < 3; ++w) {
        const EventMask pa = a.past(w), pb = b.past(w);
        nested = nested && ((pa & ~pb) == 0 || (pb & ~pa) == 0);
      }
      const bool tight = is_tight(space_meet(induce(a, f3), induce(b, f3)));
      c.expect(tight == nested, "tight-meet criterion");
      ++meets;
    }
  }

  // composition preservation
  SpaceSource src(seed);
  const std::vector<std::string> left{"A", "B"}, right{"C", "D"};
  std::size_t fuzz = 0, premise_cc = 0;
  for (; fuzz < 1000; ++fuzz) {
    const auto a = src.draw(std::vector<std::string>(left.begin(), left.begin() + 1 + src.pick(2)));
    const auto b = src.draw(std::vector<std::string>(right.begin(), right.begin() + 1 + src.pick(2)));
    const bool fc = free_choice(a) && free_choice(b);
    const bool cc = is_causally_complete(a) && is_causally_complete(b);
    const bool tt = is_tight(a) && is_tight(b);
    premise_cc += cc;
    for (const auto& r : {parallel(a, b), sequential(a, b)}) {
      c.expect(!fc || free_choice(r), "composition preserves free choice");
      c.expect(!cc || is_causally_complete(r), "composition preserves completeness");
      c.expect(!tt || is_tight(r), "composition preserves tightness");
    }
    if (!cc || a.empty()) continue;
    Continuations next;
    for (const auto& k : extend(a).maximal) next.emplace(k, src.pick_from(src.cc_spaces(b.family())));
    const auto r = cond_sequential(a, next);
    c.expect(is_causally_complete(r), "conditional composition preserves completeness");
    c.expect(is_tight(r), "conditional composition of complete spaces is tight");
  }
  c.expect(premise_cc >= 100, "enough complete pairs in the fuzz sample");

  // meet closure
  const auto codes3 = code_set(all3);
  std::mt19937_64 rng(seed + 1);
  std::uniform_int_distribution<std::size_t> any(0, all3.size() - 1);
  for (int i = 0; i < 500; ++i) {
    const auto m = space_meet(all3[any(rng)], all3[any(rng)]);
    c.expect(codes3.contains(m.codes()), "meet of complete spaces is complete (n=3)");
  }
  const auto all2 = enumerate_cc_bruteforce(binary(2));
  const auto codes2 = code_set(all2);
  for (const auto& a : all2) {
    for (const auto& b : all2) c.expect(codes2.contains(space_meet(a, b).codes()), "meet closure (n=2)");
  }

  // symmetry acts as a poset automorphism
  const SymmetryGroup g2(binary(2));
  for (std::size_t g = 0; g < g2.order(); ++g) {
    for (const auto& a : all2) {
      const auto ga = g2.apply(g, a);
      c.expect(codes2.contains(ga.codes()), "group maps the hierarchy to itself");
      for (const auto& b : all2) {
        c.expect(space_leq(a, b) == space_leq(ga, g2.apply(g, b)), "group preserves refinement");
      }
    }
  }
  std::ostringstream os;
  os << all3.size() << " completeness agreements, " << meets << " tight meets, " << fuzz
     << " composition pairs (" << premise_cc << " complete), 500+49 meets, " << g2.order()
     << " automorphisms";
  c.note(os.str());
}

// ---------------------------------------------------------------------------

void resume_cycle(Checker& c, const AcceptanceOptions& o) {
  namespace fs = std::filesystem;
  const InputFamily f = binary(4);
  const fs::path dir = fs::path(o.work_dir) / "resume-check";
  fs::remove_all(dir);
  fs::create_directories(dir);
  DfsOptions opts;
  opts.checkpoint = (dir / "state.json").string();
  opts.max_seconds = o.resume_run_seconds;

  const pid_t child = fork();
  if (child < 0) {
    c.expect(false, "fork failed");
    return;
  }
  if (child == 0) {
    try {
      enumerate_cc_dfs(f, opts);
    } catch (...) {
      _exit(3);
    }
    _exit(0);
  }
  std::this_thread::sleep_for(std::chrono::duration<double>(o.kill_after_seconds));
  kill(child, SIGKILL);
  int status = 0;
  waitpid(child, &status, 0);
  c.expect(WIFSIGNALED(status) && WTERMSIG(status) == SIGKILL, "first run was killed mid-search");

  opts.max_seconds = o.resume_run_seconds - o.kill_after_seconds;
  DfsResult resumed;
  try {
    resumed = enumerate_cc_dfs(f, opts);
  } catch (const std::exception& e) {
    c.expect(false, std::string("resume failed: ") + e.what());
    return;
  }
  DfsOptions straight;
  straight.max_records = resumed.records.size();
  const DfsResult reference = enumerate_cc_dfs(f, straight);
  c.expect(!resumed.records.empty(), "records produced");
  c.expect(resumed.records == reference.records, "resumed stream equals uninterrupted prefix");

  std::ifstream stream(opts.checkpoint.value() + ".stream");
  std::size_t lines = 0;
  for (std::string line; std::getline(stream, line);) ++lines;
  c.equal(lines, resumed.records.size(), "stream file length");
  std::ostringstream os;
  os << "killed after " << o.kill_after_seconds << " s, resumed to " << resumed.records.size()
     << " canonical records, identical to an uninterrupted run";
  c.note(os.str());
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, std::ostream& out) {
  const std::vector<std::pair<std::string, std::function<void(Checker&)>>> criteria = {
      {"preorder counts", preorder_counts},
      {"diamond sub-hierarchy", diamond_suborders},
      {"lowerset propositions", lowerset_props},
      {"induced history counts", induced_counts},
      {"causally complete enumeration", cc_enumeration},
      {"hierarchy statistics", hierarchy_stats},
      {"switch spaces and canopy", switch_checks},
      {"causal completions", completion_checks},
      {"property suites", [&](Checker& c) { property_suites(c, options.seed); }},
      {"dfs kill/resume cycle", [&](Checker& c) { resume_cycle(c, options); }},
  };
  std::vector<CriterionResult> results;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), id) == options.only.end()) {
      continue;
    }
    CriterionResult r{id, criteria[i].first, false, "", 0};
    Checker c;
    const auto t = Clock::now();
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    r.seconds = since(t);
    r.pass = c.failures.empty();
    r.detail = c.detail();
    out << (r.pass ? "PASS" : "FAIL") << " [" << std::setw(2) << id << "] " << r.title << ": "
        << r.detail << " (" << std::fixed << std::setprecision(2) << r.seconds << " s)" << std::endl;
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace causality
