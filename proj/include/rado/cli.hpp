#pragma once

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rado/harness.hpp"
#include "rado/largeness.hpp"

namespace rado::cli {

namespace detail {

/// Semantic failure: exit 1.
struct Failed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad invocation that CLI11 cannot see: exit 2.
struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void emit(const std::string& path, const json& j, std::ostream& out) {
  const auto text = j.dump(2) + "\n";
  if (path.empty() || path == "-") out << text;
  else write_file(path, text);
}

struct Loaded {
  std::string text;
  json doc;
};

inline Loaded load(const std::string& path, const std::string& what) {
  Loaded l;
  l.text = read_file(path);
  l.doc = parse_json(l.text, what + " " + path);
  return l;
}

inline json trace_summary(const Trace& t) {
  json j = to_json(t);
  j["complete"] = t.completed();
  return j;
}

}  // namespace detail

/// Runs the tool; returns 0 on success, 1 on semantic failure, 2 on usage
/// or input errors.
inline int dispatch(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  CLI::App app{"Monochromatic path decompositions of edge-colored complete graphs"};
  app.require_subcommand(1);
  RunConfig cfg;
  app.add_option("--seed", cfg.seed, "random seed");
  app.add_option("--jobs", cfg.jobs, "worker threads (RADO_JOBS overrides)")->check(CLI::PositiveNumber);

  // gen
  auto* gen = app.add_subcommand("gen", "random coloring");
  int gen_n = 10, gen_r = 2, gen_thr = -1;
  std::string gen_out;
  gen->add_option("--n", gen_n)->check(CLI::Range(2, 1 << 15));
  gen->add_option("--r", gen_r)->check(CLI::Range(1, 255));
  gen->add_option("--stable-threshold", gen_thr, "emit a stable presentation with thresholds up to this value");
  gen->add_option("--out", gen_out);

  // decompose
  auto* dec = app.add_subcommand("decompose", "decompose a coloring file");
  std::string algo = "gg", dec_in, dec_out, dec_trace, oracle = "cofinite";
  dec->add_option("--algo", algo)->check(CLI::IsMember({"gg", "brute", "ultra", "stable", "generic"}));
  dec->add_option("--in", dec_in)->required();
  dec->add_option("--out", dec_out);
  dec->add_option("--trace", dec_trace);
  dec->add_option("--oracle", oracle)->check(CLI::IsMember({"cofinite", "cohesive"}));
  dec->add_option("--theta", cfg.theta);
  dec->add_option("--slack", cfg.slack);

  // verify
  auto* ver = app.add_subcommand("verify", "check a decomposition against a coloring");
  std::string ver_c, ver_d;
  ver->add_option("--coloring", ver_c)->required();
  ver->add_option("--decomp", ver_d)->required();

  // hunt
  auto* hunt = app.add_subcommand("hunt", "search for colorings without a decomposition");
  HuntConfig hc;
  std::string hunt_mode = "exhaustive", hunt_out;
  hunt->add_option("--r", hc.r)->check(CLI::Range(2, 255));
  hunt->add_option("--n", hc.n)->check(CLI::Range(2, 22));
  hunt->add_option("--mode", hunt_mode)->check(CLI::IsMember({"exhaustive", "random"}));
  hunt->add_option("--trials", hc.trials);
  hunt->add_option("--out", hunt_out);

  // simulate
  auto* sim = app.add_subcommand("simulate", "run a limit construction at finite scale");
  std::string sim_algo = "uniform", sim_in, sim_trace;
  sim->add_option("--algo", sim_algo)->check(CLI::IsMember({"always", "frozen", "uniform"}));
  sim->add_option("--in", sim_in)->required();
  sim->add_option("--trace", sim_trace);
  sim->add_option("--pair-length", cfg.pair_length)->check(CLI::PositiveNumber);
  sim->add_option("--depth", cfg.depth)->check(CLI::PositiveNumber);

  // adversary
  auto* adv = app.add_subcommand("adversary", "computable colorings without computable decompositions");
  adv->require_subcommand(1);
  auto* halt = adv->add_subcommand("halting", "encode a halting table");
  std::string machines, halt_out;
  bool do_decode = false;
  int halt_n = 0;
  halt->add_option("--machines", machines)->required();
  halt->add_option("--stages", cfg.stages)->check(CLI::PositiveNumber);
  halt->add_option("--out", halt_out);
  halt->add_option("--n", halt_n, "universe for the intended decomposition (default: smallest that decodes)");
  halt->add_flag("--decode", do_decode);
  auto* diag = adv->add_subcommand("diag", "diagonalize against candidate decomposers");
  std::string cands, report;
  diag->add_option("--candidates", cands)->required();
  diag->add_option("--stages", cfg.diag_stages)->check(CLI::PositiveNumber);
  diag->add_option("--report", report);

  // harness
  auto* har = app.add_subcommand("harness", "run acceptance suites");
  std::string suite = "all", har_out;
  har->add_option("--suite", suite);
  har->add_option("--out", har_out);
  har->add_option("--stages", cfg.stages, "halting stages");
  har->add_option("--diag-stages", cfg.diag_stages);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return 2;
  }
  if (const char* env = std::getenv("RADO_JOBS")) {
    try {
      cfg.jobs = std::stoi(env);
    } catch (const std::exception&) {
      err << "error: RADO_JOBS must be a positive integer\n";
      return 2;
    }
  }

  try {
    cfg.check();
    if (gen->parsed()) {
      Coloring c = gen_thr >= 0 ? gen_stable_random(gen_n, gen_r, cfg.seed, gen_thr) : gen_random(gen_n, gen_r, cfg.seed);
      json j = to_json(c);
      j["config"] = to_json(cfg);
      detail::emit(gen_out, j, out);
      return 0;
    }

    if (dec->parsed()) {
      auto in = detail::load(dec_in, "coloring");
      Coloring c = coloring_from_json(unwrap(in.doc));
      std::optional<DecompState> d;
      std::optional<Trace> trace;
      json extra = json::object();
      if (algo == "gg") {
        if (c.r() != 2) throw detail::Usage("gg needs a two coloring (file has r=" + std::to_string(c.r()) + ")");
        Trace t;
        d = gg_decompose(c, &t);
        trace = std::move(t);
      } else if (algo == "brute") {
        d = brute_force_decompose(c);
        if (!d) extra["none"] = true;
      } else if (algo == "stable" || algo == "ultra") {
        LargenessOracle L;
        if (algo == "stable" || oracle == "cofinite") {
          if (!c.has_presentation()) throw detail::Usage("the cofinite oracle needs a stable presentation");
          L = cofinite_oracle(c);
        } else {
          L = cohesive_oracle(cohesive_build(c, c.n()), cfg.slack);
        }
        extra["oracle"] = L.description;
        auto run = ultra_decompose(c, L, c.n());
        extra["covered_prefix"] = run.covered_prefix;
        d = run.state();
        trace = run.trace;
      } else {
        auto run = generic_decompose(c, cfg.theta);
        extra["first_unmet"] = run.first_unmet;
        d = run.trace.final_state();
        trace = run.trace;
      }
      if (trace && !dec_trace.empty())
        detail::emit(dec_trace, envelope(cfg, {{dec_in, in.text}}, detail::trace_summary(*trace)), out);
      if (!d) {
        err << "no decomposition exists\n";
        detail::emit(dec_out, envelope(cfg, {{dec_in, in.text}}, extra), out);
        return 1;
      }
      json res = to_json(*d);
      const bool complete = !trace || trace->completed();
      res["complete"] = complete;
      for (auto& [k, v] : extra.items()) res[k] = v;
      if (!complete) res["marker"] = trace->marker->detail;
      detail::emit(dec_out, envelope(cfg, {{dec_in, in.text}}, res), out);
      if (!complete) {
        err << "construction stopped: " << trace->marker->detail << "\n";
        return 1;
      }
      return 0;
    }

    if (ver->parsed()) {
      auto cf = detail::load(ver_c, "coloring");
      auto df = detail::load(ver_d, "decomposition");
      Coloring c = coloring_from_json(unwrap(cf.doc));
      DecompState d = decomposition_from_json(unwrap(df.doc));
      if (d.r() != c.r())
        throw ParseError("decomposition has " + std::to_string(d.r()) + " paths, coloring has r=" + std::to_string(c.r()));
      auto v = validate_decomposition(c, d);
      if (v.ok()) {
        out << "valid\n";
        return 0;
      }
      out << "invalid: " << v.describe() << "\n";
      return 1;
    }

    if (hunt->parsed()) {
      hc.mode = hunt_mode == "random" ? HuntMode::Random : HuntMode::Exhaustive;
      hc.seed = cfg.seed;
      hc.jobs = cfg.jobs;
      hc.enumeration_budget = cfg.enumeration;
      auto rep = hunt_counterexamples(hc);
      json ce = json::array();
      for (const auto& c : rep.counterexamples) ce.push_back(to_json(c));
      json res{{"r", rep.r}, {"n", rep.n}, {"mode", hunt_mode}, {"trials", rep.trials}, {"examined", rep.examined},
               {"incomplete", rep.incomplete}, {"note", rep.note}, {"counterexamples", ce}};
      detail::emit(hunt_out, envelope(cfg, {}, res), out);
      return 0;
    }

    if (sim->parsed()) {
      auto in = detail::load(sim_in, "coloring");
      Coloring c = coloring_from_json(unwrap(in.doc));
      if (c.r() != 2) throw detail::Usage("simulate needs a two coloring");
      const auto budget = cfg.search();
      Trace t;
      json res = json::object();
      if (sim_algo == "always") {
        t = always_switch_construction(c, budget);
      } else if (sim_algo == "frozen") {
        auto cv = detect_case(c, budget);
        std::optional<Color> frozen;
        std::optional<DecompState> w;
        if (cv.can_red.verdict == Verdict::No) frozen = kRed, w = cv.can_red.witness;
        else if (cv.can_blue.verdict == Verdict::No) frozen = kBlue, w = cv.can_blue.witness;
        if (!frozen || !w) throw detail::Failed("no witness pair found within budget; use --algo always");
        res["frozen"] = color_name(*frozen);
        res["witness"] = to_json(*w);
        t = cannot_switch_construction(c, *w, *frozen);
      } else {
        auto u = uniform_attempt(c, budget);
        res["outcome"] = outcome_name(u.outcome);
        if (u.finite) res["finite"] = color_name(*u.finite);
        res["detail"] = u.detail;
        t = u.trace;
      }
      res["trace"] = detail::trace_summary(t);
      res["valid"] = validate_decomposition(c, t.final_state()).ok();
      detail::emit(sim_trace, envelope(cfg, {{sim_in, in.text}}, res), out);
      return t.completed() && res["valid"].get<bool>() ? 0 : 1;
    }

    if (halt->parsed()) {
      auto in = detail::load(machines, "machines");
      auto oracle = machines_from_json(in.doc);
      auto b = halting_coloring_build(oracle, cfg.stages);
      const int N = halt_n > 0 ? halt_n : suites::halting_universe(b);
      json mk = json::array();
      for (const auto& m : b.markers.definitions)
        mk.push_back({{"e", m.e}, {"stage", m.stage}, {"k", m.k}, {"value", m.value}});
      json fl = json::array();
      for (const auto& f : b.flips) fl.push_back({{"e", f.e}, {"stage", f.stage}, {"lo", f.lo}, {"hi", f.hi}});
      json finals = json::array(), iv = json::array();
      for (int e = 0; e < oracle.size(); ++e) {
        auto v = b.markers.final_value(e);
        finals.push_back(v ? json(*v) : json(nullptr));
      }
      for (auto [k, h] : b.protected_intervals()) iv.push_back({k, h});
      json res{{"stages", b.stages}, {"N", N}, {"coloring", to_json(b.extended(N))}, {"markers", finals},
               {"marker_definitions", mk}, {"flips", fl}, {"protected_intervals", iv}};
      auto d = intended_decomposition(b, N);
      res["decomposition"] = to_json(d);
      int rc = 0;
      if (do_decode) {
        auto r = decode(d, b, N);
        json members = json::array();
        for (int e = 0; e < oracle.size(); ++e)
          if (r.member[e]) members.push_back(e);
        res["decoded"] = {{"markers", r.markers}, {"t0", r.t0}, {"t1", r.t1}, {"members", members}};
        for (int e = 0; e < oracle.size(); ++e)
          if (r.member[e] != oracle.halts_at[e].has_value() || r.markers[e] != finals[e]) rc = 1;
        out << "decoded members:";
        for (const auto& m : members) out << " " << m.get<int>();
        out << (rc ? "  (MISMATCH)" : "") << "\n";
      }
      detail::emit(halt_out, envelope(cfg, {{machines, in.text}}, res), out);
      return rc;
    }

    if (diag->parsed()) {
      auto in = detail::load(cands, "candidates");
      auto sets = candidate_sets_from_json(in.doc);
      json builds = json::array();
      int rc = 0;
      for (const auto& w : sets) {
        auto b = diagonal_build(w, cfg.diag_stages);
        auto mono = check_t_monotone(b);
        auto rep = verify_defeat(b, w, cfg.jobs);
        json ents = json::array();
        for (const auto& e : rep.entries) {
          ents.push_back({{"candidate", e.id}, {"in_build", e.in_build}, {"verdict", verdict_name(e.verdict)},
                          {"evidence", e.evidence}, {"limit_blue_length", e.limit_blue.size()},
                          {"limit_red_length", e.limit_red.size()}});
          out << e.id << ": " << verdict_name(e.verdict) << "\n";
          if (!e.defeated()) rc = 1;
        }
        json log = json::array();
        for (const auto& stage : b.log) {
          json row = json::array();
          for (const auto& l : stage)
            row.push_back({l.level, b.candidate_ids[l.candidate], l.z, l.t, l.lo, l.hi, l.k, l.ell});
          log.push_back(row);
        }
        if (mono) rc = 1;
        builds.push_back({{"candidates", b.candidate_ids}, {"t_monotone", !mono.has_value()},
                          {"monotone_detail", mono.value_or("")}, {"verdicts", ents},
                          {"log_columns", {"level", "candidate", "z", "t", "lo", "hi", "k", "ell"}}, {"log", log}});
      }
      detail::emit(report, envelope(cfg, {{cands, in.text}}, json{{"builds", builds}}), out);
      return rc;
    }

    if (har->parsed()) {
      std::vector<std::string> names;
      if (suite == "all") names = suite_names();
      else names.push_back(suite);
      json res = json::array();
      bool ok = true;
      for (const auto& n : names) {
        auto r = run_suite(n, cfg);
        out << (r.pass ? "PASS " : "FAIL ") << r.name << " (" << r.checked << " checked, " << r.violations
            << " violations)\n";
        ok = ok && r.pass;
        res.push_back(to_json(r));
      }
      if (!har_out.empty()) write_file(har_out, envelope(cfg, {}, res).dump(2) + "\n");
      return ok ? 0 : 1;
    }
  } catch (const detail::Usage& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const detail::Failed& e) {
    err << "failed: " << e.what() << "\n";
    return 1;
  } catch (const PreconditionError& e) {
    err << "refused: " << e.what() << "\n";
    return 1;
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << "\n";
    return 1;
  } catch (const OracleViolation& e) {
    err << "largeness oracle failed: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace rado::cli
