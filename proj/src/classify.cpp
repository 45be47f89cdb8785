#include "causality/classify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "causality/universe.hpp"

namespace causality {

namespace {

std::uint64_t factorial(std::size_t n) {
  std::uint64_t f = 1;
  for (std::size_t i = 2; i <= n; ++i) {
    if (f > SymmetryGroup::kMaxOrder) return SymmetryGroup::kMaxOrder + 1;
    f *= i;
  }
  return f;
}

std::vector<std::vector<std::size_t>> all_permutations(std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  std::vector<std::vector<std::size_t>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

}  // namespace

SymmetryGroup::SymmetryGroup(InputFamily family) : family_(std::move(family)) {
  const std::size_t n = family_.size();
  std::uint64_t order = factorial(n);
  for (std::size_t c : family_.input_counts()) {
    order *= factorial(c);
    if (order > kMaxOrder) break;
  }
  if (order > kMaxOrder) throw SizeGuardError("symmetry group too large to materialise");

  std::vector<std::vector<std::vector<std::size_t>>> perms_of(kMaxInputs + 1);
  for (std::size_t c : family_.input_counts()) {
    if (perms_of[c].empty()) perms_of[c] = all_permutations(c);
  }

  for (const auto& sigma : all_permutations(n)) {
    bool preserves = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (family_.input_count(sigma[i]) != family_.input_count(i)) preserves = false;
    }
    if (!preserves) continue;
    std::vector<std::size_t> choice(n, 0);
    while (true) {
      GroupElement g{sigma, {}};
      for (std::size_t i = 0; i < n; ++i) g.inputs.push_back(perms_of[family_.input_count(i)][choice[i]]);
      elements_.push_back(std::move(g));
      std::size_t d = 0;
      while (d < n && ++choice[d] == perms_of[family_.input_count(d)].size()) choice[d++] = 0;
      if (d == n) break;
    }
  }

  const PFCode count = family_.code_count();
  if (count * elements_.size() <= (PFCode{1} << 24)) {
    codes_ = static_cast<std::size_t>(count);
    table_.resize(codes_ * elements_.size());
    for (std::size_t g = 0; g < elements_.size(); ++g) {
      for (std::size_t c = 0; c < codes_; ++c) {
        table_[g * codes_ + c] = encode(family_, apply(g, decode(family_, c)));
      }
    }
  }
}

PartialFunction SymmetryGroup::apply(std::size_t g, const PartialFunction& f) const {
  const GroupElement& e = elements_.at(g);
  PartialFunction r(f.arity());
  for (std::size_t i = 0; i < f.arity(); ++i) {
    if (f.defined(i)) r.set(e.events[i], e.inputs[i][static_cast<std::size_t>(f.at(i))]);
  }
  return r;
}

HistorySpace SymmetryGroup::apply(std::size_t g, const HistorySpace& space) const {
  std::vector<PartialFunction> hs;
  for (const auto& h : space.histories()) hs.push_back(apply(g, h));
  return HistorySpace(space.family(), std::move(hs));
}

PFCode SymmetryGroup::apply_code(std::size_t g, PFCode code) const {
  if (codes_ != 0) return table_[g * codes_ + code];
  return encode(family_, apply(g, decode(family_, code)));
}

std::vector<PFCode> SymmetryGroup::apply_codes(std::size_t g, std::span<const PFCode> codes) const {
  std::vector<PFCode> out;
  out.reserve(codes.size());
  for (PFCode c : codes) out.push_back(apply_code(g, c));
  std::sort(out.begin(), out.end());
  return out;
}

CanonicalCode SymmetryGroup::canonical(std::span<const PFCode> codes) const {
  CanonicalCode best(codes.begin(), codes.end());
  for (std::size_t g = 0; g < order(); ++g) {
    auto image = apply_codes(g, codes);
    if (image < best) best = std::move(image);
  }
  return best;
}

bool SymmetryGroup::is_canonical(std::span<const PFCode> codes) const {
  const std::vector<PFCode> self(codes.begin(), codes.end());
  std::vector<PFCode> image(codes.size());
  for (std::size_t g = 0; g < order(); ++g) {
    for (std::size_t i = 0; i < codes.size(); ++i) image[i] = apply_code(g, codes[i]);
    std::sort(image.begin(), image.end());
    if (image < self) return false;
  }
  return true;
}

std::size_t SymmetryGroup::orbit_size(std::span<const PFCode> codes) const {
  const std::vector<PFCode> self(codes.begin(), codes.end());
  std::size_t stabiliser = 0;
  for (std::size_t g = 0; g < order(); ++g) {
    if (apply_codes(g, codes) == self) ++stabiliser;
  }
  return order() / stabiliser;
}

std::vector<std::vector<PFCode>> SymmetryGroup::orbit(std::span<const PFCode> codes) const {
  std::set<std::vector<PFCode>> seen;
  for (std::size_t g = 0; g < order(); ++g) seen.insert(apply_codes(g, codes));
  return {seen.begin(), seen.end()};
}

CanonicalCode canonicalize(const HistorySpace& space) {
  return SymmetryGroup(space.family()).canonical(space.codes());
}

std::vector<HistorySpace> orbit(const HistorySpace& space) {
  const SymmetryGroup group(space.family());
  std::vector<HistorySpace> out;
  for (const auto& codes : group.orbit(space.codes())) {
    out.push_back(space_from_codes(space.family(), codes));
  }
  return out;
}

std::size_t orbit_size(const HistorySpace& space) {
  return SymmetryGroup(space.family()).orbit_size(space.codes());
}

HistorySpace space_from_codes(const InputFamily& family, std::span<const PFCode> codes) {
  std::vector<PartialFunction> hs;
  hs.reserve(codes.size());
  for (PFCode c : codes) hs.push_back(decode(family, c));
  return HistorySpace(family, std::move(hs));
}

// ---------------------------------------------------------------------------

namespace {

std::vector<PFCode> prime_codes(const Universe& u, const PfMask& w) {
  std::vector<PFCode> out;
  u.prime(w).for_each([&](std::size_t c) { out.push_back(c); });
  return out;
}

}  // namespace

std::vector<HistorySpace> enumerate_cc_bruteforce(const InputFamily& family) {
  const Universe u(family);
  std::vector<std::size_t> optional;
  minus(u.nonempty(), u.totals()).for_each([&](std::size_t c) { optional.push_back(c); });
  if (optional.size() > kMaxBruteForceBits) {
    throw SizeGuardError("brute force over " + std::to_string(optional.size()) +
                         " optional functions exceeds the guard of " +
                         std::to_string(kMaxBruteForceBits));
  }
  std::vector<HistorySpace> out;
  const std::uint64_t subsets = std::uint64_t{1} << optional.size();
  for (std::uint64_t s = 0; s < subsets; ++s) {
    PfMask w = u.totals();
    for (std::size_t i = 0; i < optional.size(); ++i) {
      if ((s >> i) & 1U) w.set(optional[i]);
    }
    if (u.is_cc_closed(w)) out.push_back(space_from_codes(family, prime_codes(u, w)));
  }
  std::sort(out.begin(), out.end(), code_less);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

using json = nlohmann::json;

std::string code_line(std::span<const PFCode> codes) {
  std::string s;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(codes[i]);
  }
  return s;
}

std::vector<PFCode> parse_code_line(const std::string& line) {
  std::vector<PFCode> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    out.push_back(std::stoull(item, &pos));
    if (pos != item.size()) throw Error("bad code record: " + line);
  }
  return out;
}

struct Checkpoint {
  std::uint64_t records = 0;
  std::vector<std::uint8_t> path;
  bool done = false;
};

json family_json(const InputFamily& family) {
  return {{"events", family.events().labels()}, {"inputs", family.input_counts()}};
}

void write_checkpoint(const std::string& file, const InputFamily& family, const Checkpoint& c) {
  std::string path;
  for (auto b : c.path) path += static_cast<char>('0' + b);
  json j = family_json(family);
  j["records"] = c.records;
  j["path"] = path;
  j["done"] = c.done;
  const std::string tmp = file + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << j.dump() << '\n';
    if (!out) throw Error("cannot write checkpoint " + tmp);
  }
  std::filesystem::rename(tmp, file);
}

Checkpoint read_checkpoint(const std::string& file, const InputFamily& family) {
  std::ifstream in(file);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error("corrupt checkpoint " + file + ": " + e.what());
  }
  try {
    if (j.at("events") != family_json(family)["events"] ||
        j.at("inputs") != family_json(family)["inputs"]) {
      throw Error("checkpoint " + file + " belongs to a different family");
    }
    Checkpoint c;
    c.records = j.at("records").get<std::uint64_t>();
    c.done = j.at("done").get<bool>();
    for (char ch : j.at("path").get<std::string>()) {
      if (ch != '0' && ch != '1') throw Error("corrupt checkpoint path in " + file);
      c.path.push_back(static_cast<std::uint8_t>(ch - '0'));
    }
    return c;
  } catch (const json::exception& e) {
    throw Error("corrupt checkpoint " + file + ": " + e.what());
  }
}

// Keeps the first `records` lines of the stream and returns them.
std::vector<CanonicalCode> load_stream(const std::string& file, std::uint64_t records) {
  std::vector<CanonicalCode> out;
  if (records == 0) {
    std::ofstream(file, std::ios::trunc);
    return out;
  }
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("checkpoint refers to a missing stream " + file);
  std::string line;
  std::uintmax_t offset = 0;
  while (out.size() < records && std::getline(in, line)) {
    if (in.eof()) break;  // unterminated tail from an interrupted write
    out.push_back(parse_code_line(line));
    offset += line.size() + 1;
  }
  if (out.size() < records) throw Error("stream " + file + " is shorter than its checkpoint");
  in.close();
  std::filesystem::resize_file(file, offset);
  return out;
}

using Clock = std::chrono::steady_clock;

DfsResult dfs_serial(const Universe& u, const SymmetryGroup& group, const DfsOptions& options) {
  DfsResult result;
  CcSearch search(u, PfMask{});
  Checkpoint ckpt;
  std::string stream_file;
  std::ofstream stream;

  if (options.checkpoint) {
    stream_file = options.stream.value_or(*options.checkpoint + ".stream");
    if (std::filesystem::exists(*options.checkpoint)) {
      ckpt = read_checkpoint(*options.checkpoint, u.family());
      result.records = load_stream(stream_file, ckpt.records);
      if (ckpt.records > 0) {
        const PfMask w = search.leaf_from_path(ckpt.path);
        if (group.canonical(prime_codes(u, w)) != result.records.back()) {
          throw Error("last stream record does not match the checkpoint path");
        }
      }
      if (ckpt.done) {
        result.complete = true;
        return result;
      }
    } else {
      std::ofstream(stream_file, std::ios::trunc);
      ckpt = Checkpoint{};
      write_checkpoint(*options.checkpoint, u.family(), ckpt);
    }
    stream.open(stream_file, std::ios::app);
    if (!stream) throw Error("cannot open stream " + stream_file);
  }

  const auto start = Clock::now();
  auto last_save = start;
  const bool resumed = ckpt.records > 0;

  auto visit = [&](const PfMask& w) {
    ++result.leaves;
    auto codes = prime_codes(u, w);
    if (group.is_canonical(codes)) {
      if (stream.is_open()) {
        stream << code_line(codes) << '\n';
        stream.flush();
        ckpt.records += 1;
        ckpt.path = search.current_path();
        const auto now = Clock::now();
        if (now - last_save > std::chrono::milliseconds(200)) {
          write_checkpoint(*options.checkpoint, u.family(), ckpt);
          last_save = now;
        }
      }
      result.records.push_back(std::move(codes));
      if (options.max_records && result.records.size() >= *options.max_records) return false;
    }
    if (options.max_seconds &&
        std::chrono::duration<double>(Clock::now() - start).count() >= *options.max_seconds) {
      return false;
    }
    return true;
  };

  if (options.max_records && result.records.size() >= *options.max_records) {
    return result;
  }
  result.complete = resumed ? search.run_after(ckpt.path, visit) : search.run(visit);

  if (options.checkpoint) {
    ckpt.done = result.complete;
    write_checkpoint(*options.checkpoint, u.family(), ckpt);
  }
  return result;
}

DfsResult dfs_parallel(const Universe& u, const SymmetryGroup& group, const DfsOptions& options) {
  CcSearch root(u, PfMask{});
  std::vector<std::vector<std::uint8_t>> prefixes;
  for (std::size_t depth = 1;; ++depth) {
    prefixes = root.prefixes(depth);
    if (prefixes.size() >= 8 * options.jobs || depth >= root.variable_count()) break;
  }

  std::vector<std::vector<CanonicalCode>> found(prefixes.size());
  std::vector<std::uint64_t> leaves(prefixes.size(), 0);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  const auto start = Clock::now();

  auto worker = [&] {
    CcSearch search(u, PfMask{});
    for (std::size_t i; !stop && (i = next++) < prefixes.size();) {
      search.run_subtree(prefixes[i], [&](const PfMask& w) {
        ++leaves[i];
        auto codes = prime_codes(u, w);
        if (group.is_canonical(codes)) found[i].push_back(std::move(codes));
        if (options.max_seconds &&
            std::chrono::duration<double>(Clock::now() - start).count() >= *options.max_seconds) {
          stop = true;
        }
        return !stop;
      });
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < options.jobs; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  DfsResult result;
  result.complete = !stop;
  for (std::size_t i = 0; i < prefixes.size(); ++i) {
    result.leaves += leaves[i];
    for (auto& c : found[i]) result.records.push_back(std::move(c));
  }
  return result;
}

}  // namespace

DfsResult enumerate_cc_dfs(const InputFamily& family, const DfsOptions& options) {
  if (options.jobs == 0) throw Error("jobs must be positive");
  if (options.jobs > 1 && (options.checkpoint || options.max_records)) {
    throw Error("checkpointing and record limits need a single job");
  }
  const Universe u(family);
  const SymmetryGroup group(family);
  return options.jobs == 1 ? dfs_serial(u, group, options) : dfs_parallel(u, group, options);
}

std::vector<HistorySpace> expand_classes(const InputFamily& family,
                                         std::span<const CanonicalCode> classes) {
  const SymmetryGroup group(family);
  std::vector<HistorySpace> out;
  for (const auto& code : classes) {
    for (const auto& image : group.orbit(code)) out.push_back(space_from_codes(family, image));
  }
  std::sort(out.begin(), out.end(), code_less);
  return out;
}

// ---------------------------------------------------------------------------

std::vector<Edge> HierarchyGraph::edge_discrepancy() const {
  std::vector<Edge> a = class_edges, b = quotient_class_edges, out;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<std::size_t> HierarchyGraph::maximal_nodes() const {
  std::vector<bool> has_upper(nodes.size(), false);
  for (const auto& [lo, hi] : edges) has_upper[lo] = true;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!has_upper[i]) out.push_back(i);
  }
  return out;
}

HierarchyGraph build_hierarchy(std::vector<HistorySpace> spaces) {
  HierarchyGraph g;
  if (spaces.empty()) return g;
  g.family = spaces.front().family();
  for (const auto& s : spaces) {
    if (!(s.family() == g.family)) throw Error("hierarchy spaces must share one family");
  }
  std::sort(spaces.begin(), spaces.end(), code_less);
  if (std::adjacent_find(spaces.begin(), spaces.end()) != spaces.end()) {
    throw Error("hierarchy input contains duplicate spaces");
  }
  g.nodes = std::move(spaces);
  const std::size_t n = g.nodes.size();

  const Universe u(g.family);
  const SymmetryGroup group(g.family);
  std::vector<PfMask> ext(n);
  std::vector<std::size_t> ext_size(n);
  std::vector<CanonicalCode> canon(n);
  for (std::size_t i = 0; i < n; ++i) {
    ext[i] = u.closure(u.mask_of(g.nodes[i].histories()));
    ext_size[i] = ext[i].count();
    canon[i] = group.canonical(g.nodes[i].codes());
  }
  g.classes = canon;
  std::sort(g.classes.begin(), g.classes.end());
  g.classes.erase(std::unique(g.classes.begin(), g.classes.end()), g.classes.end());
  const std::size_t c = g.classes.size();
  g.class_size.assign(c, 0);
  g.node_class.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.node_class[i] = static_cast<std::size_t>(
        std::lower_bound(g.classes.begin(), g.classes.end(), canon[i]) - g.classes.begin());
    ++g.class_size[g.node_class[i]];
  }

  std::vector<std::vector<bool>> class_leq(c, std::vector<bool>(c, false));
  std::set<Edge> projected;
  for (std::size_t a = 0; a < n; ++a) {
    // strictly coarser spaces, finest first; a cover is one not above another cover
    std::vector<std::size_t> uppers;
    for (std::size_t b = 0; b < n; ++b) {
      if (b != a && ext_size[b] < ext_size[a] && ext[b].subset_of(ext[a])) uppers.push_back(b);
    }
    std::stable_sort(uppers.begin(), uppers.end(),
                     [&](std::size_t x, std::size_t y) { return ext_size[x] > ext_size[y]; });
    std::vector<std::size_t> covers;
    for (std::size_t b : uppers) {
      class_leq[g.node_class[a]][g.node_class[b]] = true;
      const bool above_cover = std::any_of(covers.begin(), covers.end(), [&](std::size_t k) {
        return ext_size[b] < ext_size[k] && ext[b].subset_of(ext[k]);
      });
      if (!above_cover) covers.push_back(b);
    }
    std::sort(covers.begin(), covers.end());
    for (std::size_t b : covers) {
      g.edges.emplace_back(a, b);
      projected.emplace(g.node_class[a], g.node_class[b]);
    }
  }
  g.class_edges.assign(projected.begin(), projected.end());

  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      if (i == j || !class_leq[i][j]) continue;
      bool between = false;
      for (std::size_t k = 0; k < c && !between; ++k) {
        between = k != i && k != j && class_leq[i][k] && class_leq[k][j];
      }
      if (!between) g.quotient_class_edges.emplace_back(i, j);
    }
  }
  return g;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<HistorySpace> induced_spaces(const InputFamily& family, bool definite_only) {
  std::vector<HistorySpace> out;
  for (const auto& order : enumerate_preorders(family.events())) {
    if (!definite_only || is_definite(order)) out.push_back(induce(order, family));
  }
  return out;
}

}  // namespace

bool is_order_induced(const HistorySpace& space) {
  const auto candidates = induced_spaces(space.family(), false);
  return std::find(candidates.begin(), candidates.end(), space) != candidates.end();
}

bool has_fixed_definite_order(const HistorySpace& space) {
  const auto candidates = induced_spaces(space.family(), true);
  return std::any_of(candidates.begin(), candidates.end(),
                     [&](const HistorySpace& h) { return space_leq(space, h); });
}

Stats stats(const HierarchyGraph& graph) {
  Stats s;
  s.spaces = graph.nodes.size();
  s.classes = graph.classes.size();
  if (graph.nodes.empty()) return s;

  const Universe u(graph.family);
  auto ext_of = [&](const HistorySpace& h) { return u.closure(u.mask_of(h.histories())); };
  std::vector<PfMask> all_orders, definite;
  for (const auto& order : enumerate_preorders(graph.family.events())) {
    const PfMask e = ext_of(induce(order, graph.family));
    all_orders.push_back(e);
    if (is_definite(order)) definite.push_back(e);
  }

  std::vector<std::size_t> representative(s.classes, graph.nodes.size());
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    auto& r = representative[graph.node_class[i]];
    r = std::min(r, i);
  }
  std::vector<bool> maximal(s.classes, false);
  for (std::size_t i : graph.maximal_nodes()) maximal[graph.node_class[i]] = true;

  for (std::size_t k = 0; k < s.classes; ++k) {
    const HistorySpace& rep = graph.nodes[representative[k]];
    const PfMask e = ext_of(rep);
    ClassInfo info;
    info.code = graph.classes[k];
    info.size = graph.class_size[k];
    info.tight = is_tight(rep);
    info.order_induced = std::find(all_orders.begin(), all_orders.end(), e) != all_orders.end();
    info.fixed_definite = std::any_of(definite.begin(), definite.end(),
                                      [&](const PfMask& d) { return d.subset_of(e); });
    info.maximal = maximal[k];
    s.tight_classes += info.tight;
    s.nontight_classes += !info.tight;
    s.no_fixed_definite_classes += !info.fixed_definite;
    s.order_induced_classes += info.order_induced;
    s.maxima_classes += info.maximal;
    s.per_class.push_back(std::move(info));
  }
  return s;
}

std::map<std::string, std::size_t> landmark_classes(const HierarchyGraph& graph) {
  std::map<std::string, std::size_t> out;
  const InputFamily& family = graph.family;
  if (family.size() != 3 || graph.nodes.empty()) return out;
  const auto& l = family.events().labels();
  const EventSet& ev = family.events();

  std::vector<std::pair<std::string, HistorySpace>> named;
  named.emplace_back("discrete", induce(discrete(ev), family));
  named.emplace_back("fork", induce(builtin_order("fork:" + l[0] + "," + l[1] + "," + l[2]), family));
  named.emplace_back("wedge", induce(builtin_order("wedge:" + l[0] + "," + l[1] + "," + l[2]), family));
  named.emplace_back("total", induce(total(ev), family));
  const std::pair<std::string, std::string> chain{l[0], l[1]};
  named.emplace_back("total+point", induce(from_relation(ev, std::span(&chain, 1)), family));

  const InputFamily head = family.restrict_to(std::vector<std::string>{l[0]});
  const InputFamily tail = family.restrict_to(std::vector<std::string>{l[1], l[2]});
  const HistorySpace first = induce(discrete(head.events()), head);
  const std::vector<std::string> forward{l[1], l[2]}, backward{l[2], l[1]};
  Continuations next;
  for (std::size_t i = 0; i < head.input_count(0); ++i) {
    PartialFunction key(1);
    key.set(0, i);
    next.emplace(key, induce(total(tail.events(), i == 0 ? forward : backward), tail));
  }
  named.emplace_back("switch", embed(cond_sequential(first, next), family));

  const SymmetryGroup group(family);
  for (const auto& [name, space] : named) {
    const auto code = group.canonical(space.codes());
    auto it = std::lower_bound(graph.classes.begin(), graph.classes.end(), code);
    if (it != graph.classes.end() && *it == code) {
      out[name] = static_cast<std::size_t>(it - graph.classes.begin());
    }
  }
  return out;
}

}  // namespace causality
