#include "causality/pfun.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <sstream>

namespace causality {

InputFamily::InputFamily(EventSet events, std::vector<std::size_t> input_counts)
    : events_(std::move(events)), counts_(std::move(input_counts)) {
  if (counts_.size() != events_.size()) throw Error("input family: one input count per event");
  if (events_.size() > kMaxEvents) {
    throw Error("input family limited to " + std::to_string(kMaxEvents) + " events");
  }
  for (std::size_t c : counts_) {
    if (c == 0) throw Error("input family: every input set must be nonempty");
    if (c > kMaxInputs) throw Error("input family: too many inputs at one event");
  }
  names_.resize(events_.size());
}

InputFamily InputFamily::uniform(EventSet events, std::size_t inputs) {
  std::vector<std::size_t> counts(events.size(), inputs);
  return InputFamily(std::move(events), std::move(counts));
}

bool InputFamily::is_uniform() const {
  return std::adjacent_find(counts_.begin(), counts_.end(), std::not_equal_to<>()) ==
         counts_.end();
}

PFCode InputFamily::code_count() const {
  PFCode total = 1;
  for (std::size_t c : counts_) {
    if (total > std::numeric_limits<PFCode>::max() / (c + 1)) {
      throw SizeGuardError("partial function codes overflow 64 bits");
    }
    total *= c + 1;
  }
  return total;
}

void InputFamily::set_value_names(std::size_t event, std::vector<std::string> names) {
  if (names.size() != counts_.at(event)) throw Error("value names must cover the input set");
  names_.at(event) = std::move(names);
}

std::string InputFamily::value_name(std::size_t event, std::size_t value) const {
  const auto& names = names_.at(event);
  if (!names.empty()) return names.at(value);
  return std::to_string(value);
}

std::size_t InputFamily::parse_value(std::size_t event, const std::string& text) const {
  const auto& names = names_.at(event);
  auto it = std::find(names.begin(), names.end(), text);
  if (it != names.end()) return static_cast<std::size_t>(it - names.begin());
  std::size_t value = 0;
  try {
    std::size_t pos = 0;
    value = std::stoul(text, &pos);
    if (pos != text.size()) throw Error("");
  } catch (const std::exception&) {
    throw Error("bad input value '" + text + "' for event " + events_.label(event));
  }
  if (value >= counts_.at(event)) {
    throw Error("input value " + text + " out of range for event " + events_.label(event));
  }
  return value;
}

InputFamily InputFamily::restrict_to(std::span<const std::string> labels) const {
  std::vector<std::size_t> counts;
  std::vector<std::string> out_labels(labels.begin(), labels.end());
  for (const auto& l : labels) counts.push_back(counts_.at(events_.index_of(l)));
  InputFamily r(EventSet(out_labels), counts);
  for (std::size_t i = 0; i < labels.size(); ++i) r.names_[i] = names_[events_.index_of(labels[i])];
  return r;
}

InputFamily disjoint_union(const InputFamily& a, const InputFamily& b) {
  std::vector<std::string> labels = a.events().labels();
  std::vector<std::size_t> counts = a.input_counts();
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (a.events().contains(b.events().label(i))) {
      throw Error("event label collision: " + b.events().label(i));
    }
    labels.push_back(b.events().label(i));
    counts.push_back(b.input_count(i));
  }
  InputFamily u(EventSet(labels), counts);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto& names = i < a.size() ? a.value_names(i) : b.value_names(i - a.size());
    if (!names.empty()) u.set_value_names(i, names);
  }
  return u;
}

// ---------------------------------------------------------------------------

PartialFunction::PartialFunction(std::size_t arity) {
  if (arity > kMaxEvents) throw Error("partial function arity too large");
  values_.fill(kUndefined);
  arity_ = static_cast<std::uint8_t>(arity);
}

PartialFunction::PartialFunction(std::initializer_list<int> values)
    : PartialFunction(values.size()) {
  std::size_t i = 0;
  for (int v : values) {
    if (v >= 0) set(i, static_cast<std::size_t>(v));
    ++i;
  }
}

void PartialFunction::set(std::size_t event, std::size_t value) {
  if (event >= arity_) throw Error("partial function: event index out of range");
  if (value > kMaxInputs) throw Error("partial function: value out of range");
  values_[event] = static_cast<std::int8_t>(value);
}

EventMask PartialFunction::domain() const {
  EventMask m = 0;
  for (std::size_t i = 0; i < arity_; ++i) {
    if (values_[i] != kUndefined) m |= bit(i);
  }
  return m;
}

std::size_t PartialFunction::domain_size() const {
  return static_cast<std::size_t>(std::popcount(domain()));
}

PartialFunction PartialFunction::restrict(EventMask mask) const {
  PartialFunction r = *this;
  for (std::size_t i = 0; i < arity_; ++i) {
    if (!(mask & bit(i))) r.values_[i] = kUndefined;
  }
  return r;
}

std::strong_ordering operator<=>(const PartialFunction& a, const PartialFunction& b) {
  if (auto c = a.arity_ <=> b.arity_; c != 0) return c;
  for (std::size_t i = a.arity_; i-- > 0;) {
    if (auto c = a.values_[i] <=> b.values_[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

PartialFunction empty_function(const InputFamily& family) { return PartialFunction(family.size()); }

void validate(const InputFamily& family, const PartialFunction& f) {
  if (f.arity() != family.size()) throw Error("partial function does not match family arity");
  for (std::size_t i = 0; i < f.arity(); ++i) {
    if (f.defined(i) && static_cast<std::size_t>(f.at(i)) >= family.input_count(i)) {
      throw Error("partial function value out of range at event " + family.events().label(i));
    }
  }
}

PFCode encode(const InputFamily& family, const PartialFunction& f) {
  validate(family, f);
  PFCode code = 0;
  for (std::size_t i = family.size(); i-- > 0;) {
    code = code * (family.input_count(i) + 1) + static_cast<PFCode>(f.at(i) + 1);
  }
  return code;
}

PartialFunction decode(const InputFamily& family, PFCode code) {
  if (code >= family.code_count()) throw Error("partial function code out of range");
  PartialFunction f(family.size());
  for (std::size_t i = 0; i < family.size(); ++i) {
    const PFCode radix = family.input_count(i) + 1;
    const PFCode digit = code % radix;
    code /= radix;
    if (digit != 0) f.set(i, static_cast<std::size_t>(digit - 1));
  }
  return f;
}

namespace {

void check_same_arity(const PartialFunction& f, const PartialFunction& g) {
  if (f.arity() != g.arity()) throw Error("partial functions from different families");
}

}  // namespace

bool leq(const PartialFunction& f, const PartialFunction& g) {
  check_same_arity(f, g);
  for (std::size_t i = 0; i < f.arity(); ++i) {
    if (f.defined(i) && f.at(i) != g.at(i)) return false;
  }
  return true;
}

bool compatible(const PartialFunction& f, const PartialFunction& g) {
  check_same_arity(f, g);
  for (std::size_t i = 0; i < f.arity(); ++i) {
    if (f.defined(i) && g.defined(i) && f.at(i) != g.at(i)) return false;
  }
  return true;
}

PartialFunction meet(const PartialFunction& f, const PartialFunction& g) {
  check_same_arity(f, g);
  PartialFunction r(f.arity());
  for (std::size_t i = 0; i < f.arity(); ++i) {
    if (f.defined(i) && f.at(i) == g.at(i)) r.set(i, static_cast<std::size_t>(f.at(i)));
  }
  return r;
}

std::optional<PartialFunction> join(const PartialFunction& f, const PartialFunction& g) {
  if (!compatible(f, g)) return std::nullopt;
  PartialFunction r = f;
  for (std::size_t i = 0; i < g.arity(); ++i) {
    if (g.defined(i)) r.set(i, static_cast<std::size_t>(g.at(i)));
  }
  return r;
}

std::optional<PartialFunction> join(std::span<const PartialFunction> fs, std::size_t arity) {
  PartialFunction acc(arity);
  for (const auto& f : fs) {
    auto j = join(acc, f);
    if (!j) return std::nullopt;
    acc = *j;
  }
  return acc;
}

void normalize(std::vector<PartialFunction>& fs) {
  std::sort(fs.begin(), fs.end());
  fs.erase(std::unique(fs.begin(), fs.end()), fs.end());
}

std::vector<PartialFunction> closure(std::span<const PartialFunction> w) {
  std::vector<PartialFunction> out(w.begin(), w.end());
  normalize(out);
  // saturate: each new element is joined against everything present
  for (std::size_t next = 0; next < out.size(); ++next) {
    for (std::size_t j = 0; j < next; ++j) {
      auto k = join(out[next], out[j]);
      if (k && *k != out[next] && *k != out[j] &&
          std::find(out.begin(), out.end(), *k) == out.end()) {
        out.push_back(*k);
      }
    }
  }
  normalize(out);
  return out;
}

std::vector<PartialFunction> prime_elements(std::span<const PartialFunction> w) {
  std::vector<PartialFunction> out;
  for (const auto& x : w) {
    // x is a join of other elements iff the strictly smaller ones cover dom x
    EventMask covered = 0;
    for (const auto& y : w) {
      if (y != x && leq(y, x)) covered |= y.domain();
    }
    if (covered != x.domain()) out.push_back(x);
  }
  normalize(out);
  return out;
}

std::string to_text(const InputFamily& family, const PartialFunction& f) {
  std::string s;
  for (std::size_t i = 0; i < f.arity(); ++i) {
    if (!f.defined(i)) continue;
    if (!s.empty()) s += ", ";
    s += family.events().label(i) + "/" + family.value_name(i, static_cast<std::size_t>(f.at(i)));
  }
  return s;
}

PartialFunction parse_text(const InputFamily& family, const std::string& text) {
  PartialFunction f(family.size());
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    auto last = item.find_last_not_of(" \t");
    item = item.substr(first, last - first + 1);
    const auto slash = item.find('/');
    if (slash == std::string::npos) throw Error("history entry without '/': " + item);
    const std::size_t e = family.events().index_of(item.substr(0, slash));
    if (f.defined(e)) throw Error("event assigned twice in history: " + item);
    f.set(e, family.parse_value(e, item.substr(slash + 1)));
  }
  return f;
}

PartialFunction make_pf(const InputFamily& family,
                        std::initializer_list<std::pair<std::string, int>> assignment) {
  PartialFunction f(family.size());
  for (const auto& [label, value] : assignment) {
    f.set(family.events().index_of(label), static_cast<std::size_t>(value));
  }
  validate(family, f);
  return f;
}

PartialFunction embed(const PartialFunction& f, const InputFamily& from, const InputFamily& to) {
  if (from == to) return f;
  PartialFunction g(to.size());
  for (std::size_t i = 0; i < f.arity(); ++i) {
    if (f.defined(i)) g.set(to.events().index_of(from.events().label(i)), static_cast<std::size_t>(f.at(i)));
  }
  validate(to, g);
  return g;
}

}  // namespace causality
