#pragma once

#include <chrono>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "rado/adversary.hpp"
#include "rado/io.hpp"
#include "rado/largeness.hpp"
#include "rado/limit_sim.hpp"
#include "rado/solver.hpp"

namespace rado {

struct SuiteResult {
  std::string name;
  bool pass = false;
  std::uint64_t checked = 0;
  std::uint64_t violations = 0;
  std::vector<std::string> notes;  // first violations, then remarks
  json stats = json::object();
  double seconds = 0;  // not serialized, so reruns stay byte-identical

  SuiteResult() = default;
  explicit SuiteResult(std::string n) : name(std::move(n)) {}

  void fail(std::string what) {
    ++violations;
    if (notes.size() < 8) notes.push_back(std::move(what));
  }
};

inline json to_json(const SuiteResult& r) {
  return json{{"suite", r.name},       {"pass", r.pass},   {"checked", r.checked},
              {"violations", r.violations}, {"notes", r.notes}, {"stats", r.stats}};
}

namespace suites {

inline SuiteResult exhaustive_gg(const RunConfig&, int max_n = 6) {
  SuiteResult r{"exhaustive-gg"};
  for (int n = 2; n <= max_n; ++n) {
    ColoringEnumerator en(n, 2);
    while (auto c = en.next()) {
      ++r.checked;
      auto v = validate_decomposition(*c, gg_decompose(*c));
      if (!v.ok()) r.fail("n=" + std::to_string(n) + ": " + v.describe());
    }
  }
  r.pass = r.violations == 0;
  return r;
}

inline SuiteResult random_gg(const RunConfig& cfg, int count = 10000, int n = 50) {
  SuiteResult r{"random-gg"};
  for (int i = 0; i < count; ++i) {
    auto c = gen_random(n, 2, trial_seed(cfg.seed, i));
    ++r.checked;
    auto v = validate_decomposition(c, gg_decompose(c));
    if (!v.ok()) r.fail("trial " + std::to_string(i) + ": " + v.describe());
  }
  r.pass = r.violations == 0;
  return r;
}

inline SuiteResult oracle_agreement(const RunConfig&) {
  SuiteResult r{"oracle-agreement"};
  std::uint64_t r2 = 0, r3 = 0, r3_none = 0;
  for (int n = 1; n <= 5; ++n) {
    ColoringEnumerator en(n, 2);
    while (auto c = en.next()) {
      ++r.checked, ++r2;
      auto d = brute_force_decompose(*c);
      if (!d) r.fail("r=2 n=" + std::to_string(n) + ": no decomposition found");
      else if (auto v = validate_decomposition(*c, *d); !v.ok()) r.fail("r=2: " + v.describe());
    }
  }
  for (int n = 1; n <= 4; ++n) {
    ColoringEnumerator en(n, 3);
    while (auto c = en.next()) {
      ++r.checked, ++r3;
      auto d = brute_force_decompose(*c);
      if (!d) {
        ++r3_none;
        continue;
      }
      if (auto v = validate_decomposition(*c, *d); !v.ok()) r.fail("r=3: " + v.describe());
    }
  }
  r.stats = {{"r2_colorings", r2}, {"r3_colorings", r3}, {"r3_without_decomposition", r3_none}};
  r.pass = r.violations == 0;
  return r;
}

/// Random legal one-step extensions from the empty state until none is
/// left; switches carry their strength flag.
inline Trace random_legal_trace(const Coloring& c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Trace t(DecompState::empty(2));
  while (true) {
    auto steps = legal_steps(c, t.final_state());
    if (steps.empty()) break;
    const auto& st = steps[rng() % steps.size()];
    t.push(st, apply_step(t.final_state(), st));
  }
  return t;
}

/// Strong flags must be truthful and strong switches permanent.
inline void check_strong_trace(const Coloring& c, const Trace& t, SuiteResult& r, const std::string& tag) {
  ++r.checked;
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const auto& st = t.steps[i];
    if (!st.is_switch() || !st.strong) continue;
    if (!is_strong_switch(c, t.states[i], *st.switched, st.added)) {
      r.fail(tag + ": step " + std::to_string(i) + " flagged strong but is not");
      return;
    }
  }
  if (auto bad = check_strong_permanence(t)) r.fail(tag + ": " + *bad);
}

inline SuiteResult lemma_strong(const RunConfig& cfg, int count = 1000, int n = 12) {
  SuiteResult r{"lemma-strong"};
  std::uint64_t strong = 0;
  for (int i = 0; i < count; ++i) {
    auto c = gen_random(n, 2, trial_seed(cfg.seed, i));
    auto t = random_legal_trace(c, trial_seed(cfg.seed ^ 0x5bd1e995, i));
    for (const auto& st : t.steps) strong += st.strong;
    check_strong_trace(c, t, r, "trace " + std::to_string(i));
  }
  r.stats = {{"strong_switches", strong}};
  r.pass = r.violations == 0;
  return r;
}

/// The lemma-strong checker on a synthetic trace with a non-strong switch
/// flagged strong that is later undone. Passes when the checker fails it.
inline SuiteResult lemma_strong_negative_control(const RunConfig&) {
  SuiteResult r{"lemma-strong-negative-control"};
  // 0-3 and 3-2 BLUE, every other pair RED: switching 0 onto RED with
  // follower 2 is not strong because BLUE reaches 2 through 3.
  std::vector<std::uint8_t> tri(pair_count(6), 1);
  tri[pair_index(0, 3)] = 0;
  tri[pair_index(2, 3)] = 0;
  auto c = Coloring::dense(6, 2, tri);
  Trace t(DecompState::two({0}, {1}));
  auto s1 = ExtensionStep::switch_to_red(0, 2, true);
  t.push(s1, apply_step(t.final_state(), s1));
  auto s2 = ExtensionStep::switch_to_blue(2, 3);
  t.push(s2, apply_step(t.final_state(), s2));
  SuiteResult inner{"lemma-strong"};
  check_strong_trace(c, t, inner, "synthetic");
  r.checked = 1;
  r.pass = inner.violations > 0;
  r.notes = inner.notes;
  if (!r.pass) r.notes.push_back("checker accepted an injected non-strong switch");
  return r;
}

inline SuiteResult order_preserve(const RunConfig& cfg, int count = 1000, int n = 12) {
  SuiteResult r{"order-preserve"};
  for (int i = 0; i < count; ++i) {
    auto c = gen_random(n, 2, trial_seed(cfg.seed, i));
    auto t = random_legal_trace(c, trial_seed(cfg.seed ^ 0x5bd1e995, i));
    ++r.checked;
    if (auto bad = check_order_preservation(t.initial(), t.final_state())) {
      r.fail("trace " + std::to_string(i) + ": " + *bad);
      continue;
    }
    for (std::size_t k = 1; k < t.states.size(); ++k)
      if (auto bad = check_order_preservation(t.states[k], t.final_state())) {
        r.fail("trace " + std::to_string(i) + " from state " + std::to_string(k) + ": " + *bad);
        break;
      }
  }
  r.pass = r.violations == 0;
  return r;
}

inline Coloring stable_sample(const RunConfig& cfg, int i, int n = 60) {
  const int colors = 2 + i % 4;
  return gen_stable_random(n, colors, trial_seed(cfg.seed + 1, i), 10);
}

inline SuiteResult largeness_axioms(const RunConfig& cfg, int count = 500) {
  SuiteResult r{"largeness-axioms"};
  std::uint64_t parts = 0, inter = 0;
  for (int i = 0; i < count; ++i) {
    auto c = stable_sample(cfg, i);
    ++r.checked;
    auto rep = check_axioms(c, cofinite_oracle(c), c.n(), all_vertices(c.n()));
    parts += rep.partitions;
    inter += rep.intersections;
    for (const auto& v : rep.violations) r.fail("coloring " + std::to_string(i) + ": " + v.axiom);
  }
  r.stats = {{"partitions", parts}, {"intersections", inter}};
  r.pass = r.violations == 0;
  return r;
}

inline SuiteResult stable_decompose_suite(const RunConfig& cfg, int count = 500) {
  SuiteResult r{"stable-decompose"};
  std::uint64_t completed = 0, truncated = 0;
  int min_cover = 1 << 30;
  for (int i = 0; i < count; ++i) {
    auto c = stable_sample(cfg, i);
    ++r.checked;
    auto run = stable_decompose(c);
    min_cover = std::min(min_cover, run.covered_prefix);
    if (run.trace.completed()) {
      ++completed;
      if (auto v = validate_decomposition(c, run.state()); !v.ok())
        r.fail("coloring " + std::to_string(i) + ": " + v.describe());
    } else {
      ++truncated;
      if (r.notes.size() < 8)
        r.notes.push_back("coloring " + std::to_string(i) + " truncated: " + run.trace.marker->detail);
    }
    if (run.covered_prefix * 2 < c.n())
      r.fail("coloring " + std::to_string(i) + ": covered prefix " + std::to_string(run.covered_prefix));
  }
  r.stats = {{"completed", completed}, {"truncated", truncated}, {"min_covered_prefix", min_cover}};
  r.pass = r.violations == 0;
  return r;
}

inline ToyHaltingOracle machines_with(std::vector<std::pair<int, int>> halts, int count) {
  ToyHaltingOracle o;
  o.halts_at.assign(count, std::nullopt);
  for (auto [e, h] : halts) o.halts_at[e] = h;
  return o;
}

inline ToyHaltingOracle acceptance_machines() {
  ToyHaltingOracle o;
  o.halts_at.assign(8, std::nullopt);
  const int times[] = {1, 3, 5, 11};
  for (int i = 0; i < 4; ++i) o.halts_at[2 * i] = times[i];
  return o;
}

/// Smallest N with room for the intended decomposition and one BLUE vertex
/// past the last marker.
inline int halting_universe(const HaltingBuild& b) {
  long long top = b.stages + 2;
  for (int e = 0; e < b.oracle.size(); ++e) top = std::max(top, b.markers.final_value(e).value_or(0) + 2);
  int n = static_cast<int>(top);
  while (true) {
    try {
      auto d = intended_decomposition(b, n);
      decode(d, b, n);
      return n;
    } catch (const PreconditionError&) {
      n += std::max(8, n / 8);
    }
  }
}

inline SuiteResult halting_roundtrip(const RunConfig& cfg, const ToyHaltingOracle& o) {
  SuiteResult r{"halting-roundtrip"};
  auto b = halting_coloring_build(o, cfg.stages);
  const int N = halting_universe(b);
  auto c = b.extended(N);
  ++r.checked;
  if (!validate_stable(c)) r.fail("built coloring is not stable");
  for (Vertex x = 0; x <= b.stages; ++x)
    for (Vertex y = x + 1; y <= b.stages; ++y)
      if (c.at(x, y) != b.coloring.at(x, y)) {
        r.fail("stream and presentation differ at {" + std::to_string(x) + "," + std::to_string(y) + "}");
        x = b.stages;
        break;
      }
  auto iv = b.protected_intervals();
  for (auto [k, h] : iv) {
    ++r.checked;
    for (long long x = k; x <= h; ++x)
      if (b.flip_stage_of(static_cast<Vertex>(x)) >= 0) {
        r.fail("protected interval [" + std::to_string(k) + "," + std::to_string(h) + "] has a RED default");
        break;
      }
  }
  int defined = 0;
  for (int e = 0; e < o.size(); ++e) defined += b.markers.final_value(e).has_value();
  if (static_cast<int>(iv.size()) != defined) r.fail("missing protected interval");
  auto d = intended_decomposition(b, N);
  auto res = decode(d, b, N);
  std::vector<int> members, truth;
  for (int e = 0; e < o.size(); ++e) {
    ++r.checked;
    if (res.markers[e] != b.markers.final_value(e).value_or(-1))
      r.fail("marker " + std::to_string(e) + " decoded as " + std::to_string(res.markers[e]));
    if (res.member[e]) members.push_back(e);
    if (o.halts_at[e]) truth.push_back(e);
  }
  if (members != truth) r.fail("decoded membership differs from the halting set");
  r.stats = {{"N", N}, {"markers", res.markers}, {"members", members}, {"flips", b.flips.size()}};
  r.pass = r.violations == 0;
  return r;
}

/// Every BLUE set of a decomposition of the prefix meets each interval.
inline void check_forcing(const Coloring& c, const std::vector<std::pair<long long, long long>>& iv,
                          SuiteResult& r, const std::string& tag) {
  ExactSolver es(c);
  auto sets = es.all_blue_sets();
  if (sets.empty()) r.fail(tag + ": prefix has no decomposition");
  for (auto S : sets) {
    ++r.checked;
    for (auto [k, h] : iv) {
      std::uint32_t mask = 0;
      for (long long x = k; x <= h; ++x) mask |= 1u << x;
      if (!(S & mask)) r.fail(tag + ": BLUE set " + std::to_string(S) + " misses [" + std::to_string(k) + "," +
                              std::to_string(h) + "]");
    }
  }
}

inline SuiteResult interval_forcing(const RunConfig& cfg, const ToyHaltingOracle& o) {
  SuiteResult r{"interval-forcing"};
  auto b = halting_coloring_build(o, cfg.stages);
  auto iv = b.protected_intervals();
  if (iv.size() < 2) {
    r.fail("fewer than two protected intervals");
    return r;
  }
  iv.resize(2);
  const int n = static_cast<int>(iv[1].second) + 1;
  auto c = b.extended(n);
  check_forcing(c, iv, r, "prefix [0," + std::to_string(n) + ")");
  int red = 0;
  for (Vertex x = 0; x < n; ++x) red += b.flip_stage_of(x) >= 0;
  r.stats = {{"prefix", n}, {"flipped_in_prefix", red}};
  if (red == 0) r.notes.push_back("prefix is all BLUE for these machines");
  // with machine 0 halting at 5, vertex 6 flips inside the prefix
  auto o2 = machines_with({{0, 5}}, 2);
  auto b2 = halting_coloring_build(o2, 20);
  check_forcing(b2.extended(20), {b2.protected_intervals().front()}, r, "flipped prefix [0,20)");
  r.pass = r.violations == 0;
  return r;
}

inline SuiteResult diag_defeat(const RunConfig& cfg) {
  SuiteResult r{"diag-defeat"};
  std::vector<std::vector<CandidateDecomposer>> builds = {{constant_blue_candidate()},
                                                          {gg_replay_candidate()},
                                                          {alternating_candidate()},
                                                          {constant_blue_candidate(), gg_replay_candidate()}};
  json per = json::array();
  for (const auto& w : builds) {
    auto b = diagonal_build(w, cfg.diag_stages);
    std::string tag;
    for (const auto& c : w) tag += (tag.empty() ? "" : "+") + c.id;
    if (auto bad = check_t_monotone(b)) r.fail(tag + ": " + *bad);
    auto rep = verify_defeat(b, w, cfg.jobs);
    for (const auto& e : rep.entries) {
      ++r.checked;
      if (!e.defeated()) r.fail(tag + ": " + e.id + " " + verdict_name(e.verdict) + " (" + e.evidence + ")");
      per.push_back({{"build", tag}, {"candidate", e.id}, {"verdict", verdict_name(e.verdict)},
                     {"evidence", e.evidence}});
    }
  }
  r.stats = {{"verdicts", per}};
  r.pass = r.violations == 0;
  return r;
}

inline SuiteResult uniform_dichotomy(const RunConfig& cfg, int max_n = 5) {
  SuiteResult r{"uniform-dichotomy"};
  std::uint64_t ok = 0, fb = 0;
  for (int n = 1; n <= max_n; ++n) {
    ColoringEnumerator en(n, 2);
    while (auto c = en.next()) {
      ++r.checked;
      auto res = uniform_attempt(*c, cfg.search());
      if (res.outcome == UniformOutcome::UniformOk) ++ok;
      else if (res.outcome == UniformOutcome::Fallback && res.finite) ++fb;
      else {
        r.fail("n=" + std::to_string(n) + ": " + outcome_name(res.outcome) + " " + res.detail);
        continue;
      }
      if (auto v = validate_decomposition(*c, res.state); !v.ok()) r.fail("n=" + std::to_string(n) + ": " + v.describe());
    }
  }
  r.stats = {{"uniform_ok", ok}, {"fallback", fb}};
  r.pass = r.violations == 0;
  return r;
}

inline SuiteResult hunt_r2_empty(const RunConfig& cfg, int max_n = 5) {
  SuiteResult r{"hunt-r2-empty"};
  for (int n = 2; n <= max_n; ++n) {
    HuntConfig h;
    h.r = 2;
    h.n = n;
    h.mode = HuntMode::Exhaustive;
    h.jobs = cfg.jobs;
    h.enumeration_budget = cfg.enumeration;
    auto rep = hunt_counterexamples(h);
    r.checked += rep.examined;
    if (rep.incomplete) r.fail("n=" + std::to_string(n) + ": " + rep.note);
    for (std::size_t i = 0; i < rep.counterexamples.size(); ++i) r.fail("n=" + std::to_string(n) + ": counterexample");
  }
  r.pass = r.violations == 0;
  return r;
}

}  // namespace suites

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "exhaustive-gg",    "oracle-agreement", "lemma-strong",      "order-preserve", "largeness-axioms",
      "stable-decompose", "halting-roundtrip", "diag-defeat",      "hunt-r2-empty",  "random-gg",
      "interval-forcing", "uniform-dichotomy", "lemma-strong-negative-control"};
  return names;
}

inline SuiteResult run_suite(const std::string& name, const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteResult r;
  if (name == "exhaustive-gg") r = suites::exhaustive_gg(cfg);
  else if (name == "random-gg") r = suites::random_gg(cfg);
  else if (name == "oracle-agreement") r = suites::oracle_agreement(cfg);
  else if (name == "lemma-strong") r = suites::lemma_strong(cfg);
  else if (name == "lemma-strong-negative-control") r = suites::lemma_strong_negative_control(cfg);
  else if (name == "order-preserve") r = suites::order_preserve(cfg);
  else if (name == "largeness-axioms") r = suites::largeness_axioms(cfg);
  else if (name == "stable-decompose") r = suites::stable_decompose_suite(cfg);
  else if (name == "halting-roundtrip") r = suites::halting_roundtrip(cfg, suites::acceptance_machines());
  else if (name == "interval-forcing") r = suites::interval_forcing(cfg, suites::acceptance_machines());
  else if (name == "diag-defeat") r = suites::diag_defeat(cfg);
  else if (name == "uniform-dichotomy") r = suites::uniform_dichotomy(cfg);
  else if (name == "hunt-r2-empty") r = suites::hunt_r2_empty(cfg);
  else throw std::invalid_argument("unknown suite " + name);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace rado
