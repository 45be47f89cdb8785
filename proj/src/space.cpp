#include "causality/space.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "causality/universe.hpp"

namespace causality {

namespace {

void check_nonempty_valid(const InputFamily& family, const std::vector<PartialFunction>& fs) {
  for (const auto& f : fs) {
    validate(family, f);
    if (f.empty()) throw Error("spaces of input histories never contain the empty function");
  }
}

void require_same_family(const HistorySpace& a, const HistorySpace& b) {
  if (!(a.family() == b.family())) throw Error("spaces over different input families");
}

PFCode total_count(const InputFamily& family) {
  PFCode total = 1;
  for (std::size_t c : family.input_counts()) {
    if (total > std::numeric_limits<PFCode>::max() / c) throw SizeGuardError("too many totals");
    total *= c;
  }
  return total;
}

using LabelledHistory = std::vector<std::pair<std::string, int>>;

std::set<LabelledHistory> labelled(const InputFamily& family,
                                   const std::vector<PartialFunction>& fs) {
  std::set<LabelledHistory> out;
  for (const auto& f : fs) {
    LabelledHistory h;
    for (std::size_t i = 0; i < f.arity(); ++i) {
      if (f.defined(i)) h.emplace_back(family.events().label(i), f.at(i));
    }
    std::sort(h.begin(), h.end());
    out.insert(std::move(h));
  }
  return out;
}

}  // namespace

HistorySpace::HistorySpace(InputFamily family, std::vector<PartialFunction> histories)
    : family_(std::move(family)), histories_(std::move(histories)) {
  check_nonempty_valid(family_, histories_);
  normalize(histories_);
  if (prime_elements(histories_) != histories_) {
    throw Error("history set is not join-prime");
  }
}

HistorySpace HistorySpace::from_extended(InputFamily family, std::vector<PartialFunction> ext) {
  check_nonempty_valid(family, ext);
  auto primes = prime_elements(ext);
  return HistorySpace(std::move(family), std::move(primes));
}

HistorySpace HistorySpace::parse(InputFamily family, const std::vector<std::string>& histories) {
  std::vector<PartialFunction> fs;
  fs.reserve(histories.size());
  for (const auto& h : histories) fs.push_back(parse_text(family, h));
  return HistorySpace(std::move(family), std::move(fs));
}

bool HistorySpace::contains(const PartialFunction& h) const {
  return std::binary_search(histories_.begin(), histories_.end(), h);
}

EventMask HistorySpace::events() const {
  EventMask m = 0;
  for (const auto& h : histories_) m |= h.domain();
  return m;
}

std::vector<std::vector<std::size_t>> HistorySpace::derived_inputs() const {
  std::vector<std::set<std::size_t>> seen(family_.size());
  for (const auto& h : histories_) {
    for (std::size_t i = 0; i < h.arity(); ++i) {
      if (h.defined(i)) seen[i].insert(static_cast<std::size_t>(h.at(i)));
    }
  }
  std::vector<std::vector<std::size_t>> out;
  for (const auto& s : seen) out.emplace_back(s.begin(), s.end());
  return out;
}

std::vector<PFCode> HistorySpace::codes() const {
  std::vector<PFCode> out;
  out.reserve(histories_.size());
  for (const auto& h : histories_) out.push_back(encode(family_, h));
  return out;
}

EventMask TipReport::tips_of(const PartialFunction& h) const {
  auto it = std::lower_bound(histories.begin(), histories.end(), h);
  if (it == histories.end() || *it != h) throw Error("not an extended history of this space");
  return tips[static_cast<std::size_t>(it - histories.begin())];
}

// ---------------------------------------------------------------------------

HistorySpace induce(const Preorder& order, const InputFamily& family) {
  if (!order.events().same_members(family.events())) {
    throw Error("order and input family have different events");
  }
  const std::size_t n = family.size();
  std::vector<std::size_t> to_family(n);
  for (std::size_t i = 0; i < n; ++i) to_family[i] = family.events().index_of(order.events().label(i));

  std::set<EventMask> pasts;
  for (std::size_t i = 0; i < n; ++i) {
    EventMask p = 0;
    const EventMask op = order.past(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (op & bit(j)) p |= bit(to_family[j]);
    }
    pasts.insert(p);
  }

  std::vector<PartialFunction> hs;
  for (EventMask p : pasts) {
    std::vector<std::size_t> evs;
    for (std::size_t i = 0; i < n; ++i) {
      if (p & bit(i)) evs.push_back(i);
    }
    std::vector<std::size_t> digits(evs.size(), 0);
    while (true) {
      PartialFunction f(n);
      for (std::size_t d = 0; d < evs.size(); ++d) f.set(evs[d], digits[d]);
      hs.push_back(f);
      std::size_t d = 0;
      while (d < evs.size() && ++digits[d] == family.input_count(evs[d])) digits[d++] = 0;
      if (d == evs.size()) break;
    }
  }
  return HistorySpace(family, std::move(hs));
}

std::vector<PartialFunction> extended_histories(const HistorySpace& space) {
  return closure(space.histories());
}

ExtendedSpace extend(const HistorySpace& space) {
  ExtendedSpace e{space, extended_histories(space), {}};
  for (const auto& k : e.ext) {
    const bool has_above = std::any_of(e.ext.begin(), e.ext.end(), [&](const PartialFunction& j) {
      return j != k && leq(k, j);
    });
    if (!has_above) e.maximal.push_back(k);
  }
  return e;
}

bool free_choice(const HistorySpace& space) {
  const InputFamily& family = space.family();
  if (family.size() == 0) return true;
  const auto ext = extended_histories(space);
  const EventMask all = full_mask(family.size());
  const auto totals = static_cast<PFCode>(std::count_if(
      ext.begin(), ext.end(), [&](const PartialFunction& k) { return k.domain() == all; }));
  return totals == total_count(family);
}

bool space_leq(const HistorySpace& a, const HistorySpace& b) {
  const auto ea = extended_histories(a);
  const auto eb = extended_histories(b);
  if (a.family() == b.family()) return std::includes(ea.begin(), ea.end(), eb.begin(), eb.end());
  const auto la = labelled(a.family(), ea);
  const auto lb = labelled(b.family(), eb);
  return std::includes(la.begin(), la.end(), lb.begin(), lb.end());
}

HistorySpace space_join(const HistorySpace& a, const HistorySpace& b) {
  require_same_family(a, b);
  const auto ea = extended_histories(a);
  const auto eb = extended_histories(b);
  std::vector<PartialFunction> both;
  std::set_intersection(ea.begin(), ea.end(), eb.begin(), eb.end(), std::back_inserter(both));
  return HistorySpace::from_extended(a.family(), std::move(both));
}

HistorySpace space_meet(const HistorySpace& a, const HistorySpace& b) {
  require_same_family(a, b);
  const auto ea = extended_histories(a);
  const auto eb = extended_histories(b);
  std::vector<PartialFunction> either;
  std::set_union(ea.begin(), ea.end(), eb.begin(), eb.end(), std::back_inserter(either));
  return HistorySpace::from_extended(a.family(), std::move(either));
}

HistorySpace embed(const HistorySpace& space, const InputFamily& to) {
  if (space.family() == to) return space;
  for (std::size_t i = 0; i < space.family().size(); ++i) {
    const auto j = to.events().find(space.family().events().label(i));
    if (!j) throw Error("target family lacks event " + space.family().events().label(i));
    if (to.input_count(*j) != space.family().input_count(i)) {
      throw Error("target family has different inputs at " + space.family().events().label(i));
    }
  }
  std::vector<PartialFunction> hs;
  hs.reserve(space.size());
  for (const auto& h : space.histories()) hs.push_back(embed(h, space.family(), to));
  return HistorySpace(to, std::move(hs));
}

HistorySpace parallel(const HistorySpace& a, const HistorySpace& b) {
  const InputFamily family = disjoint_union(a.family(), b.family());
  std::vector<PartialFunction> hs;
  for (const auto& h : a.histories()) hs.push_back(embed(h, a.family(), family));
  for (const auto& h : b.histories()) hs.push_back(embed(h, b.family(), family));
  return HistorySpace(family, std::move(hs));
}

HistorySpace cond_sequential(const HistorySpace& a, const Continuations& next) {
  const auto maxima = extend(a).maximal;
  if (next.size() != maxima.size()) throw Error("continuations must be keyed by max Ext exactly");
  for (const auto& k : maxima) {
    if (!next.contains(k)) throw Error("missing continuation for a maximal extended history");
  }

  std::vector<std::string> labels = a.family().events().labels();
  std::vector<std::size_t> counts = a.family().input_counts();
  for (const auto& [key, child] : next) {
    const InputFamily& cf = child.family();
    for (std::size_t i = 0; i < cf.size(); ++i) {
      const std::string& l = cf.events().label(i);
      if (a.family().events().contains(l)) throw Error("continuation overlaps first space at " + l);
      auto it = std::find(labels.begin(), labels.end(), l);
      if (it == labels.end()) {
        labels.push_back(l);
        counts.push_back(cf.input_count(i));
      } else if (counts[static_cast<std::size_t>(it - labels.begin())] != cf.input_count(i)) {
        throw Error("continuations disagree on the inputs at " + l);
      }
    }
  }
  InputFamily family(EventSet(labels), counts);
  for (std::size_t i = 0; i < a.family().size(); ++i) {
    if (!a.family().value_names(i).empty()) family.set_value_names(i, a.family().value_names(i));
  }

  std::vector<PartialFunction> hs;
  for (const auto& h : a.histories()) hs.push_back(embed(h, a.family(), family));
  for (const auto& [key, child] : next) {
    const PartialFunction k = embed(key, a.family(), family);
    for (const auto& h : child.histories()) {
      auto j = join(k, embed(h, child.family(), family));
      hs.push_back(*j);  // disjoint domains always join
    }
  }
  return HistorySpace(family, std::move(hs));
}

HistorySpace sequential(const HistorySpace& a, const HistorySpace& b) {
  Continuations next;
  for (const auto& k : extend(a).maximal) next.emplace(k, b);
  if (next.empty()) return parallel(a, HistorySpace(b.family(), {}));
  return cond_sequential(a, next);
}

TipReport tips(const HistorySpace& space) {
  TipReport r;
  r.histories = extended_histories(space);
  r.tips.reserve(r.histories.size());
  for (const auto& h : r.histories) {
    EventMask covered = 0;
    for (const auto& k : r.histories) {
      if (k != h && leq(k, h)) covered |= k.domain();
    }
    r.tips.push_back(h.domain() & ~covered);
  }
  return r;
}

bool is_causally_complete(const HistorySpace& space) {
  if (!free_choice(space)) return false;
  const TipReport report = tips(space);
  return std::all_of(space.histories().begin(), space.histories().end(),
                     [&](const PartialFunction& h) { return std::popcount(report.tips_of(h)) == 1; });
}

bool is_causally_complete_by_descent(const HistorySpace& space) {
  if (!free_choice(space)) return false;
  const auto ext = extended_histories(space);
  for (const auto& k : ext) {
    if (k.domain_size() < 2) continue;
    bool found = false;
    for (std::size_t i = 0; i < k.arity() && !found; ++i) {
      if (!k.defined(i)) continue;
      PartialFunction r = k;
      r.erase(i);
      found = std::binary_search(ext.begin(), ext.end(), r);
    }
    if (!found) return false;
  }
  return true;
}

bool is_tight(const HistorySpace& space, TightnessMode mode) {
  const TipReport report = tips(space);
  std::vector<EventMask> history_tips;
  for (const auto& h : space.histories()) history_tips.push_back(report.tips_of(h));

  std::vector<PartialFunction> targets;
  if (mode == TightnessMode::AllExtended) {
    targets = report.histories;
  } else {
    targets = extend(space).maximal;
  }
  for (const auto& k : targets) {
    for (std::size_t w = 0; w < k.arity(); ++w) {
      if (!k.defined(w)) continue;
      int witnesses = 0;
      for (std::size_t i = 0; i < space.size(); ++i) {
        if ((history_tips[i] & bit(w)) && leq(space.histories()[i], k)) ++witnesses;
      }
      if (witnesses != 1) return false;
    }
  }
  return true;
}

bool is_join_closed(const HistorySpace& space) {
  return extended_histories(space) == space.histories();
}

std::vector<HistorySpace> causal_completions(const HistorySpace& space) {
  if (!free_choice(space)) {
    throw Error("causal completions require a space satisfying free choice");
  }
  const Universe u(space.family());
  const auto ext = extended_histories(space);
  CcSearch search(u, u.mask_of(ext));
  std::vector<PfMask> found;
  search.run([&](const PfMask& w) {
    found.push_back(w);
    return true;
  });
  // maximal refinements = inclusion-minimal Ext sets
  std::sort(found.begin(), found.end(),
            [](const PfMask& a, const PfMask& b) { return a.count() < b.count(); });
  std::vector<PfMask> minimal;
  for (const auto& w : found) {
    const bool dominated = std::any_of(minimal.begin(), minimal.end(),
                                       [&](const PfMask& m) { return m.subset_of(w); });
    if (!dominated) minimal.push_back(w);
  }
  std::vector<HistorySpace> out;
  for (const auto& w : minimal) out.push_back(HistorySpace(space.family(), u.functions(u.prime(w))));
  std::sort(out.begin(), out.end(), code_less);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    throw SizeGuardError("switch space count overflows 64 bits");
  }
  return a * b;
}

std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t r = 1;
  if (base <= 1) return exp == 0 ? 1 : base;
  for (std::uint64_t i = 0; i < exp; ++i) r = checked_mul(r, base);
  return r;
}

}  // namespace

std::uint64_t count_switch_spaces(std::size_t events, std::size_t inputs) {
  std::uint64_t total = 1;
  for (std::size_t j = 2; j <= events; ++j) {
    // exponent k^(n-j), itself guarded
    const std::uint64_t exponent = checked_pow(inputs, events - j);
    total = checked_mul(total, checked_pow(j, exponent));
  }
  return total;
}

std::uint64_t count_switch_spaces(const InputFamily& family) {
  const std::size_t n = family.size();
  std::vector<std::uint64_t> count(std::size_t{1} << n, 0);
  count[0] = 1;
  for (std::size_t s = 1; s < count.size(); ++s) {
    std::uint64_t c = 0;
    for (std::size_t w = 0; w < n; ++w) {
      if (!(s & (std::size_t{1} << w))) continue;
      const std::uint64_t term = checked_pow(count[s & ~(std::size_t{1} << w)], family.input_count(w));
      if (c > std::numeric_limits<std::uint64_t>::max() - term) {
        throw SizeGuardError("switch space count overflows 64 bits");
      }
      c += term;
    }
    count[s] = c;
  }
  return count.back();
}

std::vector<HistorySpace> switch_spaces(const InputFamily& family) {
  if (family.size() == 0) return {HistorySpace(family, {})};
  if (count_switch_spaces(family) > 2'000'000) {
    throw SizeGuardError("too many switch spaces to materialise");
  }
  std::vector<HistorySpace> out;
  const auto& labels = family.events().labels();
  for (std::size_t first = 0; first < family.size(); ++first) {
    const std::vector<std::string> head{labels[first]};
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (i != first) rest.push_back(labels[i]);
    }
    const InputFamily head_family = family.restrict_to(head);
    const auto children = switch_spaces(family.restrict_to(rest));
    const HistorySpace base = induce(discrete(head_family.events()), head_family);
    const std::size_t k = family.input_count(first);

    std::vector<std::size_t> choice(k, 0);
    while (true) {
      Continuations next;
      for (std::size_t i = 0; i < k; ++i) {
        PartialFunction key(1);
        key.set(0, i);
        next.emplace(key, children[choice[i]]);
      }
      out.push_back(embed(cond_sequential(base, next), family));
      std::size_t d = 0;
      while (d < k && ++choice[d] == children.size()) choice[d++] = 0;
      if (d == k) break;
    }
  }
  std::sort(out.begin(), out.end(), code_less);
  return out;
}

bool code_less(const HistorySpace& a, const HistorySpace& b) {
  return a.histories() < b.histories();
}

}  // namespace causality
