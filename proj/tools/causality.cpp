#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>

#include "causality/acceptance.hpp"
#include "causality/io.hpp"

using namespace causality;

namespace {

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
  } else {
    write_text(path, text);
  }
}

std::string lowerset_text(const Preorder& order, EventMask set) {
  std::string s = "{";
  for (const auto& l : order.events().labels_of(set)) s += (s.size() > 1 ? "," : "") + l;
  return s + "}";
}

HistorySpace space_arg(const std::string& in, const std::string& order, std::size_t inputs) {
  if (!in.empty()) return load_space(in);
  if (order.empty()) throw CLI::ValidationError("--in or --order is required");
  const Preorder o = load_order(order);
  return induce(o, InputFamily::uniform(o.events(), inputs));
}

void print_spaces(const std::vector<HistorySpace>& spaces, bool as_json) {
  if (as_json) {
    json arr = json::array();
    for (const auto& s : spaces) arr.push_back(to_json(s));
    std::cout << arr.dump(2) << '\n';
    return;
  }
  for (const auto& s : spaces) {
    std::cout << "[";
    for (std::size_t i = 0; i < s.size(); ++i) {
      std::cout << (i ? "; " : "") << to_text(s.family(), s.histories()[i]);
    }
    std::cout << "]\n";
  }
}

const char* yes_no(bool b) { return b ? "true" : "false"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Causal orders, spaces of input histories and their classification"};
  app.require_subcommand(1);

  // orders ------------------------------------------------------------------
  auto* orders = app.add_subcommand("orders", "Build and inspect causal orders");
  orders->require_subcommand(1);

  std::size_t n_events = 3;
  bool count = false, as_json = false;
  std::string in, of, dot, out, order_arg, other_arg, op;

  auto* o_enum = orders->add_subcommand("enumerate", "All preorders on n events");
  o_enum->add_option("-n,--events", n_events, "Number of events")->required();
  o_enum->add_flag("--count", count, "Print only the count");
  o_enum->add_flag("--json", as_json, "Print JSON");

  auto* o_sub = orders->add_subcommand("suborders", "Preorders included in an order");
  o_sub->add_option("--of", of, "Order file or builtin name")->required();
  o_sub->add_flag("--count", count, "Print only the count");
  o_sub->add_flag("--json", as_json, "Print JSON");

  auto* o_hasse = orders->add_subcommand("hasse", "Hasse diagram of an order");
  o_hasse->add_option("--in", in, "Order file or builtin name")->required();
  o_hasse->add_option("--dot", dot, "Write DOT here (default stdout)");

  auto* o_low = orders->add_subcommand("lowersets", "Nonempty lowersets of an order");
  o_low->add_option("--in", in, "Order file or builtin name")->required();
  o_low->add_flag("--count", count, "Print only the count");

  auto* o_show = orders->add_subcommand("show", "Order as JSON, with pairwise relations");
  o_show->add_option("--in", in, "Order file or builtin name")->required();
  o_show->add_flag("--json", as_json, "JSON only");

  auto* o_comp = orders->add_subcommand("compose", "Join, meet or sequential composition");
  o_comp->add_option("--op", op, "join | meet | seq")->required()->check(CLI::IsMember({"join", "meet", "seq"}));
  o_comp->add_option("--a", order_arg, "First order")->required();
  o_comp->add_option("--b", other_arg, "Second order")->required();
  o_comp->add_option("--out", out, "Write JSON here (default stdout)");

  // spaces ------------------------------------------------------------------
  auto* spaces = app.add_subcommand("spaces", "Spaces of input histories");
  spaces->require_subcommand(1);
  std::size_t inputs = 2;

  auto* s_induce = spaces->add_subcommand("induce", "Space induced by an order");
  s_induce->add_option("--order", order_arg, "Order file or builtin name")->required();
  s_induce->add_option("--inputs", inputs, "Inputs per event");
  s_induce->add_flag("--count", count, "Print only the number of histories");
  s_induce->add_flag("--json", as_json, "Print JSON");
  s_induce->add_option("--out", out, "Write JSON here");

  auto* s_check = spaces->add_subcommand("check", "Completeness and tightness");
  s_check->add_option("--in", in, "Space JSON");
  s_check->add_option("--order", order_arg, "Order (induced space)");
  s_check->add_option("--inputs", inputs, "Inputs per event, with --order");
  s_check->add_flag("--json", as_json, "Print JSON");

  auto* s_comp = spaces->add_subcommand("completions", "Causal completions");
  s_comp->add_option("--in", in, "Space JSON");
  s_comp->add_option("--order", order_arg, "Order (induced space)");
  s_comp->add_option("--inputs", inputs, "Inputs per event, with --order");
  s_comp->add_flag("--count", count, "Print only the count");
  s_comp->add_flag("--json", as_json, "Print JSON");

  bool tips_colour = false, extended = false;
  auto* s_hasse = spaces->add_subcommand("hasse", "Hasse diagram of a space");
  s_hasse->add_option("--in", in, "Space JSON");
  s_hasse->add_option("--order", order_arg, "Order (induced space)");
  s_hasse->add_option("--inputs", inputs, "Inputs per event, with --order");
  s_hasse->add_option("--dot", dot, "Write DOT here (default stdout)");
  s_hasse->add_flag("--tips", tips_colour, "Colour histories by tip event");
  s_hasse->add_flag("--extended", extended, "Include extended histories in grey");

  auto* s_switch = spaces->add_subcommand("switch", "Causal switch spaces");
  s_switch->add_option("--events", n_events, "Number of events")->required();
  s_switch->add_option("--inputs", inputs, "Inputs per event");
  s_switch->add_flag("--count", count, "Print only the count");
  s_switch->add_flag("--json", as_json, "Print JSON");

  std::string in_b;
  auto* s_compose = spaces->add_subcommand("compose", "Parallel or sequential composition");
  s_compose->add_option("--op", op, "parallel | sequential | join | meet")
      ->required()
      ->check(CLI::IsMember({"parallel", "sequential", "join", "meet"}));
  s_compose->add_option("--a", in, "First space JSON")->required();
  s_compose->add_option("--b", in_b, "Second space JSON")->required();
  s_compose->add_option("--out", out, "Write JSON here (default stdout)");

  // classify ----------------------------------------------------------------
  auto* classify = app.add_subcommand("classify", "Enumerate and classify causally complete spaces");
  std::string engine = "dfs", resume;
  bool want_stats = false;
  std::size_t jobs = 1;
  std::uint64_t seed = 0;
  std::optional<double> max_seconds;
  std::optional<std::uint64_t> max_records;
  classify->add_option("--events", n_events, "Number of events")->required();
  classify->add_option("--inputs", inputs, "Inputs per event");
  classify->add_option("--engine", engine, "brute | dfs")->check(CLI::IsMember({"brute", "dfs"}));
  classify->add_flag("--stats", want_stats, "Print hierarchy statistics");
  classify->add_flag("--json", as_json, "Print statistics as JSON");
  classify->add_option("--out", out, "Write sorted canonical codes here");
  classify->add_option("--dot", dot, "Write the class hierarchy as DOT");
  classify->add_option("--resume", resume, "Checkpoint file (dfs)");
  classify->add_option("--jobs", jobs, "Worker threads (dfs)")->check(CLI::PositiveNumber);
  classify->add_option("--seed", seed, "Unused by the engines");
  classify->add_option("--max-seconds", max_seconds, "Stop the dfs after this long");
  classify->add_option("--max-records", max_records, "Stop the dfs after this many classes");

  // check -------------------------------------------------------------------
  auto* check = app.add_subcommand("check", "Run the acceptance suite");
  AcceptanceOptions acc;
  check->add_option("--only", acc.only, "Criterion ids");
  check->add_option("--work-dir", acc.work_dir, "Scratch directory");
  check->add_option("--seed", acc.seed, "Seed for sampled property checks");
  check->add_option("--resume-seconds", acc.resume_run_seconds, "Length of the kill/resume run");
  check->add_option("--kill-after", acc.kill_after_seconds, "When the first run is killed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*o_enum) {
      const auto all = enumerate_preorders(EventSet::letters(n_events));
      if (count) {
        std::cout << all.size() << '\n';
      } else if (as_json) {
        json arr = json::array();
        for (const auto& o : all) arr.push_back(to_json(o));
        std::cout << arr.dump() << '\n';
      } else {
        for (const auto& o : all) std::cout << to_json(o).dump() << '\n';
      }
    } else if (*o_sub) {
      const Preorder top = load_order(of);
      const auto all = enumerate_preorders(top.events(), top);
      if (count) {
        std::cout << all.size() << '\n';
      } else {
        json arr = json::array();
        for (const auto& o : all) arr.push_back(to_json(o));
        std::cout << (as_json ? arr.dump(2) : arr.dump()) << '\n';
      }
    } else if (*o_hasse) {
      emit(hasse_dot(load_order(in)), dot);
    } else if (*o_low) {
      const Preorder order = load_order(in);
      const LowersetLattice lat = lowersets(order);
      if (count) {
        std::cout << lat.nonempty_count() << '\n';
      } else {
        for (EventMask s : lat.sets) {
          if (s) std::cout << lowerset_text(order, s) << '\n';
        }
      }
    } else if (*o_show) {
      const Preorder order = load_order(in);
      std::cout << to_json(order).dump() << '\n';
      if (!as_json) {
        std::cout << "definite=" << yes_no(is_definite(order)) << '\n';
        for (std::size_t i = 0; i < order.size(); ++i) {
          for (std::size_t j = i + 1; j < order.size(); ++j) {
            std::cout << order.events().label(i) << ' ' << to_string(classify_relation(order, i, j)) << ' '
                      << order.events().label(j) << '\n';
          }
        }
      }
    } else if (*o_comp) {
      const Preorder a = load_order(order_arg), b = load_order(other_arg);
      const Preorder r = op == "join" ? join(a, b) : op == "meet" ? meet(a, b) : sequential_compose(a, b);
      emit(to_json(r).dump() + '\n', out);
    } else if (*s_induce) {
      const Preorder o = load_order(order_arg);
      const HistorySpace s = induce(o, InputFamily::uniform(o.events(), inputs));
      if (!out.empty()) write_text(out, to_json(s).dump(2) + '\n');
      if (count) {
        std::cout << s.size() << '\n';
      } else if (as_json) {
        std::cout << to_json(s).dump(2) << '\n';
      } else if (out.empty()) {
        print_spaces({s}, false);
      }
    } else if (*s_check) {
      const HistorySpace s = space_arg(in, order_arg, inputs);
      if (!free_choice(s)) {
        std::cerr << "space violates free choice; completeness is undefined for it\n";
        return 1;
      }
      const bool complete = is_causally_complete(s);
      if (complete != is_causally_complete_by_descent(s)) {
        std::cerr << "internal error: completeness tests disagree\n";
        return 1;
      }
      const bool tight = is_tight(s);
      if (as_json) {
        std::cout << json{{"free_choice", true},
                          {"complete", complete},
                          {"tight", tight},
                          {"histories", s.size()},
                          {"extended", extended_histories(s).size()}}
                         .dump()
                  << '\n';
      } else {
        std::cout << "complete=" << yes_no(complete) << " tight=" << yes_no(tight) << '\n';
      }
    } else if (*s_comp) {
      const auto comps = causal_completions(space_arg(in, order_arg, inputs));
      if (count) {
        std::cout << comps.size() << '\n';
      } else {
        print_spaces(comps, as_json);
      }
    } else if (*s_hasse) {
      emit(space_dot(space_arg(in, order_arg, inputs), tips_colour, extended), dot);
    } else if (*s_switch) {
      const InputFamily fam = InputFamily::uniform(n_events, inputs);
      if (count) {
        std::cout << count_switch_spaces(fam) << '\n';
      } else {
        print_spaces(switch_spaces(fam), as_json);
      }
    } else if (*s_compose) {
      const HistorySpace a = load_space(in), b = load_space(in_b);
      const HistorySpace r = op == "parallel"     ? parallel(a, b)
                             : op == "sequential" ? sequential(a, b)
                             : op == "join"       ? space_join(a, b)
                                                  : space_meet(a, b);
      emit(to_json(r).dump(2) + '\n', out);
    } else if (*classify) {
      const InputFamily fam = InputFamily::uniform(n_events, inputs);
      std::vector<CanonicalCode> classes;
      std::vector<HistorySpace> all;
      bool complete = true;
      if (engine == "brute") {
        if (!resume.empty() || max_seconds || max_records) {
          throw CLI::ValidationError("--resume and limits apply to the dfs engine");
        }
        all = enumerate_cc_bruteforce(fam);
        const SymmetryGroup group(fam);
        std::set<CanonicalCode> seen;
        for (const auto& s : all) seen.insert(group.canonical(s.codes()));
        classes.assign(seen.begin(), seen.end());
      } else {
        DfsOptions opts;
        opts.jobs = jobs;
        opts.max_seconds = max_seconds;
        opts.max_records = max_records;
        if (!resume.empty()) opts.checkpoint = resume;
        DfsResult r = enumerate_cc_dfs(fam, opts);
        classes = std::move(r.records);
        complete = r.complete;
      }
      const SymmetryGroup group(fam);
      std::size_t total = 0;
      for (const auto& c : classes) total += group.orbit_size(c);
      if (!out.empty()) write_text(out, codes_text(classes));
      std::cout << "spaces=" << total << " classes=" << classes.size();
      if (!complete) std::cout << " complete=false";
      std::cout << '\n';

      if (want_stats || as_json || !dot.empty()) {
        if (!complete) throw SizeGuardError("statistics need a complete enumeration");
        if (total > 50000) throw SizeGuardError("hierarchy too large for statistics");
        if (all.empty()) all = expand_classes(fam, classes);
        const HierarchyGraph g = build_hierarchy(all);
        const Stats st = stats(g);
        if (as_json) {
          std::cout << to_json(st).dump() << '\n';
        } else if (want_stats) {
          const json j = to_json(st);
          std::string line;
          for (const auto& [k, v] : j.items()) line += (line.empty() ? "" : " ") + k + '=' + v.dump();
          std::cout << line << '\n';
        }
        if (!dot.empty()) write_text(dot, hierarchy_dot(g, st));
      }
    } else if (*check) {
      const auto results = run_acceptance(acc, std::cout);
      const bool ok = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });
      return ok ? 0 : 1;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const SizeGuardError& e) {
    std::cerr << "size guard: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
