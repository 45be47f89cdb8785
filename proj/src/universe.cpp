#include "causality/universe.hpp"

#include <algorithm>

namespace causality {

Universe::Universe(InputFamily family) : family_(std::move(family)) {
  const PFCode count = family_.code_count();
  if (count > kMaxCodes) {
    throw SizeGuardError("family has " + std::to_string(count) +
                         " partial functions; indexed search supports at most " +
                         std::to_string(kMaxCodes));
  }
  size_ = static_cast<std::size_t>(count);
  const std::size_t n = family_.size();
  pfs_.reserve(size_);
  for (std::size_t c = 0; c < size_; ++c) {
    pfs_.push_back(decode(family_, c));
    domains_.push_back(pfs_.back().domain());
  }
  below_.resize(size_);
  compatible_.resize(size_);
  join_.assign(size_ * size_, -1);
  without_.assign(size_ * n, 0);
  for (std::size_t a = 0; a < size_; ++a) {
    for (std::size_t b = 0; b < size_; ++b) {
      if (a != b && leq(pfs_[b], pfs_[a])) below_[a].set(b);
      if (auto j = causality::join(pfs_[a], pfs_[b])) {
        compatible_[a].set(b);
        join_[a * size_ + b] = static_cast<std::int16_t>(encode(family_, *j));
      }
    }
    for (std::size_t e = 0; e < n; ++e) {
      if (domains_[a] & bit(e)) {
        PartialFunction r = pfs_[a];
        r.erase(e);
        without_[a * n + e] = static_cast<std::uint16_t>(encode(family_, r));
      }
    }
    if (a != 0) nonempty_.set(a);
    if (domains_[a] == full_mask(n) && n > 0) totals_.set(a);
  }
}

PfMask Universe::mask_of(std::span<const PartialFunction> fs) const {
  PfMask m;
  for (const auto& f : fs) m.set(static_cast<std::size_t>(encode(family_, f)));
  return m;
}

std::vector<PartialFunction> Universe::functions(const PfMask& m) const {
  std::vector<PartialFunction> out;
  m.for_each([&](std::size_t c) { out.push_back(pfs_[c]); });
  return out;
}

bool Universe::is_closed(const PfMask& w) const {
  bool ok = true;
  w.for_each([&](std::size_t a) {
    if (!ok) return;
    (w & compatible_[a]).for_each([&](std::size_t b) {
      if (ok && b < a && !w.test(static_cast<std::size_t>(join(a, b)))) ok = false;
    });
  });
  return ok;
}

PfMask Universe::closure(const PfMask& w) const {
  PfMask out = w;
  bool changed = true;
  while (changed) {
    changed = false;
    PfMask add;
    out.for_each([&](std::size_t a) {
      (out & compatible_[a]).for_each([&](std::size_t b) {
        if (b < a) {
          const auto j = static_cast<std::size_t>(join(a, b));
          if (!out.test(j)) add.set(j);
        }
      });
    });
    if (add.any()) {
      out |= add;
      changed = true;
    }
  }
  return out;
}

PfMask Universe::prime(const PfMask& w) const {
  PfMask out;
  w.for_each([&](std::size_t x) {
    EventMask covered = 0;
    (w & below_[x]).for_each([&](std::size_t y) { covered |= domains_[y]; });
    if (covered != domains_[x]) out.set(x);
  });
  return out;
}

bool Universe::has_descent(const PfMask& w) const {
  bool ok = true;
  w.for_each([&](std::size_t k) {
    if (!ok || domain_size(k) < 2) return;
    bool found = false;
    for (EventMask d = domains_[k]; d && !found; d &= d - 1) {
      if (w.test(without(k, static_cast<std::size_t>(std::countr_zero(d))))) found = true;
    }
    ok = found;
  });
  return ok;
}

bool Universe::is_cc_closed(const PfMask& w) const {
  return !w.test(0) && totals_.subset_of(w) && is_closed(w) && has_descent(w);
}

// ---------------------------------------------------------------------------

CcSearch::CcSearch(const Universe& universe, const PfMask& required) : u_(universe) {
  if (required.test(0)) throw Error("the empty function cannot be required");
  forced_ = u_.closure(required | u_.totals());

  std::vector<std::size_t> free;
  minus(u_.nonempty(), forced_).for_each([&](std::size_t c) {
    if (!u_.totals().test(c)) free.push_back(c);
  });
  std::stable_sort(free.begin(), free.end(), [&](std::size_t a, std::size_t b) {
    return u_.domain_size(a) > u_.domain_size(b);
  });
  variables_ = std::move(free);

  std::vector<std::size_t> pos_of(u_.size(), 0);
  for (std::size_t p = 0; p < variables_.size(); ++p) pos_of[variables_[p]] = p;

  checks_after_.resize(variables_.size());
  u_.nonempty().for_each([&](std::size_t k) {
    if (u_.domain_size(k) < 2) return;
    bool satisfied = false;
    std::size_t last = 0;
    for (EventMask d = u_.domain(k); d; d &= d - 1) {
      const std::size_t r = u_.without(k, static_cast<std::size_t>(std::countr_zero(d)));
      if (forced_.test(r)) satisfied = true;
      last = std::max(last, pos_of[r]);
    }
    if (satisfied) return;
    if (variables_.empty()) {
      if (forced_.test(k)) feasible_ = false;
      return;
    }
    checks_after_[last].push_back(k);
  });
}

bool CcSearch::can_include(std::size_t pos, const PfMask& w) const {
  const std::size_t x = variables_[pos];
  bool ok = true;
  (w & u_.compatible_with(x)).for_each([&](std::size_t y) {
    if (!ok) return;
    const auto j = static_cast<std::size_t>(u_.join(x, y));
    if (j != x && j != y && !w.test(j)) ok = false;
  });
  return ok;
}

bool CcSearch::descent_ok(std::size_t pos, const PfMask& w) const {
  for (std::size_t k : checks_after_[pos]) {
    if (!w.test(k)) continue;
    bool found = false;
    for (EventMask d = u_.domain(k); d && !found; d &= d - 1) {
      if (w.test(u_.without(k, static_cast<std::size_t>(std::countr_zero(d))))) found = true;
    }
    if (!found) return false;
  }
  return true;
}

bool CcSearch::dfs(std::size_t pos, PfMask& w, const Visitor& visit, Mode mode,
                   const std::vector<std::uint8_t>* guide) {
  if (collect_ && (pos == collect_depth_ || pos == variables_.size())) {
    collect_->push_back(path_);
    return true;
  }
  if (pos == variables_.size()) {
    if (mode == Mode::Replay) return true;
    return visit(w);
  }
  if (mode == Mode::Subtree && pos >= guide->size()) mode = Mode::Normal;

  auto explore = [&](std::uint8_t b, Mode m) -> bool {
    const std::size_t x = variables_[pos];
    if (b == 1) {
      if (!can_include(pos, w)) {
        if (m != Mode::Normal) throw Error("search path is inconsistent with the family");
        return true;
      }
      w.set(x);
    }
    path_.push_back(b);
    bool keep_going = true;
    if (descent_ok(pos, w)) {
      keep_going = dfs(pos + 1, w, visit, m, guide);
    } else if (m != Mode::Normal) {
      throw Error("search path is inconsistent with the family");
    }
    path_.pop_back();
    if (b == 1) w.reset(x);
    return keep_going;
  };

  if (mode == Mode::Replay) {
    const std::uint8_t b = (*guide)[pos];
    if (!explore(b, Mode::Replay)) return false;
    return b == 1 ? explore(0, Mode::Normal) : true;
  }
  if (mode == Mode::Subtree) return explore((*guide)[pos], Mode::Subtree);
  if (!explore(1, Mode::Normal)) return false;
  return explore(0, Mode::Normal);
}

bool CcSearch::run(const Visitor& visit) {
  if (!feasible_) return true;
  PfMask w = forced_;
  path_.clear();
  return dfs(0, w, visit, Mode::Normal, nullptr);
}

bool CcSearch::run_after(const std::vector<std::uint8_t>& path, const Visitor& visit) {
  if (path.size() != variables_.size()) throw Error("resume path has the wrong length");
  if (!feasible_) return true;
  PfMask w = forced_;
  path_.clear();
  return dfs(0, w, visit, Mode::Replay, &path);
}

bool CcSearch::run_subtree(const std::vector<std::uint8_t>& prefix, const Visitor& visit) {
  if (prefix.size() > variables_.size()) throw Error("prefix longer than the search depth");
  if (!feasible_) return true;
  PfMask w = forced_;
  path_.clear();
  return dfs(0, w, visit, Mode::Subtree, &prefix);
}

std::vector<std::vector<std::uint8_t>> CcSearch::prefixes(std::size_t depth) {
  std::vector<std::vector<std::uint8_t>> out;
  if (!feasible_) return out;
  collect_ = &out;
  collect_depth_ = std::min(depth, variables_.size());
  PfMask w = forced_;
  path_.clear();
  dfs(0, w, [](const PfMask&) { return true; }, Mode::Normal, nullptr);
  collect_ = nullptr;
  return out;
}

PfMask CcSearch::leaf_from_path(const std::vector<std::uint8_t>& path) const {
  if (path.size() != variables_.size()) throw Error("path is not a full search path");
  PfMask w = forced_;
  for (std::size_t p = 0; p < path.size(); ++p) {
    if (path[p] > 1) throw Error("path entries must be 0 or 1");
    if (path[p] == 1) {
      if (!can_include(p, w)) throw Error("path is not a search leaf");
      w.set(variables_[p]);
    }
    if (!descent_ok(p, w)) throw Error("path is not a search leaf");
  }
  return w;
}

}  // namespace causality
