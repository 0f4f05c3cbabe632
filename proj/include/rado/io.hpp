#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "rado/adversary.hpp"
#include "rado/coloring.hpp"
#include "rado/limit_sim.hpp"
#include "rado/paths.hpp"

namespace rado {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

struct RunConfig {
  std::uint64_t seed = 0;
  int pair_length = 6;
  int depth = 8;
  std::uint64_t nodes = 200000;
  std::uint64_t pairs = 20000;
  double enumeration = 1 << 24;
  int theta = 3;
  int slack = -1;  // -1: |C| / 4
  int jobs = 1;
  int stages = 200;
  int diag_stages = 2000;

  SearchBudget search() const {
    return SearchBudget{pair_length, depth, static_cast<std::size_t>(nodes), static_cast<std::size_t>(pairs)};
  }

  void check() const {
    if (pair_length <= 0 || depth <= 0 || nodes == 0 || pairs == 0 || enumeration <= 0)
      throw std::invalid_argument("budgets must be positive");
    if (jobs <= 0) throw std::invalid_argument("jobs must be positive");
    if (stages <= 0 || diag_stages <= 0) throw std::invalid_argument("stage bound must be positive");
  }
};

inline json to_json(const RunConfig& c) {
  return json{{"seed", c.seed},
              {"budgets", {{"pair_length", c.pair_length}, {"depth", c.depth}, {"nodes", c.nodes},
                           {"pairs", c.pairs}, {"enumeration", c.enumeration}}},
              {"theta", c.theta},
              {"slack", c.slack},
              {"jobs", c.jobs},
              {"stages", c.stages},
              {"diag_stages", c.diag_stages}};
}

/// 64-bit FNV-1a, as 16 hex digits.
inline std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[i] = digits[h & 15];
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

inline json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(what + ": " + e.what());
  }
}

namespace detail {

template <class T>
T field(const json& j, const char* key, const std::string& what) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(what + ": missing \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(what + ": bad \"" + key + "\": " + e.what());
  }
}

inline void check_version(const json& j, const std::string& what) {
  if (j.is_object() && j.contains("v") && j["v"] != kSchemaVersion)
    throw ParseError(what + ": unsupported schema version " + j["v"].dump());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Colorings: dense files carry the triangle; stable files carry the
// presentation instead.

inline json to_json(const Coloring& c) {
  json j{{"v", kSchemaVersion}, {"n", c.n()}, {"r", c.r()}, {"form", form_name(c.form())}};
  if (const auto* p = c.presentation()) {
    json lim = json::array(), thr = json::array(), exc = json::array();
    for (auto l : p->limits) lim.push_back(l.index);
    for (auto t : p->thresholds) thr.push_back(t);
    for (const auto& [k, col] : p->exceptions) exc.push_back({k.first, k.second, col.index});
    j["limits"] = lim;
    j["thresholds"] = thr;
    j["exceptions"] = exc;
    j["below_threshold"] = p->below_threshold ? json(p->below_threshold->index) : json(nullptr);
  } else {
    j["triangle"] = c.triangle();
  }
  return j;
}

inline Coloring coloring_from_json(const json& j) {
  const std::string what = "coloring";
  detail::check_version(j, what);
  const int n = detail::field<int>(j, "n", what);
  const int r = detail::field<int>(j, "r", what);
  try {
    if (j.contains("limits")) {
      StablePresentation p;
      for (int l : detail::field<std::vector<int>>(j, "limits", what)) p.limits.push_back(Color{l});
      p.thresholds = detail::field<std::vector<int>>(j, "thresholds", what);
      if (j.contains("exceptions"))
        for (const auto& e : j["exceptions"]) {
          if (!e.is_array() || e.size() != 3) throw ParseError(what + ": exception entries are [x, y, color]");
          p.exceptions[{e[0].get<int>(), e[1].get<int>()}] = Color{e[2].get<int>()};
        }
      if (j.contains("below_threshold") && !j["below_threshold"].is_null())
        p.below_threshold = Color{j["below_threshold"].get<int>()};
      return Coloring::stable(n, r, std::move(p));
    }
    auto t = detail::field<std::vector<int>>(j, "triangle", what);
    std::vector<std::uint8_t> tri;
    tri.reserve(t.size());
    for (int v : t) {
      if (v < 0 || v > 255) throw ParseError(what + ": triangle entry out of range");
      tri.push_back(static_cast<std::uint8_t>(v));
    }
    return Coloring::dense(n, r, std::move(tri));
  } catch (const std::invalid_argument& e) {
    throw ParseError(what + ": " + e.what());
  } catch (const std::domain_error& e) {
    throw ParseError(what + ": " + e.what());
  } catch (const json::exception& e) {
    throw ParseError(what + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Decompositions and traces

inline json to_json(const DecompState& s) {
  json paths = json::array();
  for (const auto& p : s.paths) paths.push_back(p.vertices);
  return json{{"v", kSchemaVersion}, {"r", s.r()}, {"paths", paths}};
}

inline DecompState decomposition_from_json(const json& j) {
  const std::string what = "decomposition";
  detail::check_version(j, what);
  const int r = detail::field<int>(j, "r", what);
  auto paths = detail::field<std::vector<std::vector<Vertex>>>(j, "paths", what);
  if (r < 1 || static_cast<int>(paths.size()) != r)
    throw ParseError(what + ": expected " + std::to_string(r) + " paths, got " + std::to_string(paths.size()));
  DecompState s = DecompState::empty(r);
  for (int z = 0; z < r; ++z) s.paths[z].vertices = std::move(paths[z]);
  return s;
}

inline const char* step_kind_name(StepKind k) {
  switch (k) {
    case StepKind::Append: return "append";
    case StepKind::SwitchToRed: return "switch_to_red";
    case StepKind::SwitchToBlue: return "switch_to_blue";
  }
  return "?";
}

inline json to_json(const ExtensionStep& s) {
  json step{{"kind", step_kind_name(s.kind)}, {"color", s.color.index}, {"added", s.added}};
  step["switched"] = s.switched ? json(*s.switched) : json(nullptr);
  return json{{"step", step}, {"strong", s.strong}};
}

inline ExtensionStep step_from_json(const json& j) {
  const std::string what = "trace step";
  const json& st = j.contains("step") ? j["step"] : j;
  const auto kind = detail::field<std::string>(st, "kind", what);
  const auto added = detail::field<Vertex>(st, "added", what);
  const bool strong = j.value("strong", false);
  if (kind == "append") {
    auto s = ExtensionStep::append(Color{detail::field<int>(st, "color", what)}, added);
    s.strong = strong;
    return s;
  }
  const auto sw = detail::field<Vertex>(st, "switched", what);
  if (kind == "switch_to_red") return ExtensionStep::switch_to_red(sw, added, strong);
  if (kind == "switch_to_blue") return ExtensionStep::switch_to_blue(sw, added, strong);
  throw ParseError(what + ": unknown kind " + kind);
}

inline json to_json(const Trace& t) {
  json steps = json::array();
  for (const auto& s : t.steps) steps.push_back(to_json(s));
  json j{{"v", kSchemaVersion}, {"initial", to_json(t.initial())}, {"steps", steps},
         {"final", to_json(t.final_state())}};
  if (t.marker) {
    j["marker"] = json{{"kind", marker_name(t.marker->kind)},
                       {"detail", t.marker->detail},
                       {"color", t.marker->color ? json(t.marker->color->index) : json(nullptr)},
                       {"exhaustive", t.marker->exhaustive},
                       {"stuck", to_json(t.marker->stuck)}};
  } else {
    j["marker"] = nullptr;
  }
  return j;
}

/// Rebuilds the trace by replaying its steps from the initial state.
inline Trace trace_from_json(const json& j) {
  detail::check_version(j, "trace");
  Trace t(j.contains("initial") ? decomposition_from_json(j["initial"]) : DecompState::empty(2));
  if (!j.contains("steps") || !j["steps"].is_array()) throw ParseError("trace: missing \"steps\"");
  for (const auto& s : j["steps"]) {
    auto step = step_from_json(s);
    try {
      t.push(step, apply_step(t.final_state(), step));
    } catch (const std::exception& e) {
      throw ParseError(std::string("trace: step cannot be replayed: ") + e.what());
    }
  }
  if (j.contains("marker") && j["marker"].is_object()) {
    const auto& m = j["marker"];
    const auto kind = m.value("kind", std::string("truncation"));
    MarkerKind k = kind == "case_failure" ? MarkerKind::CaseFailure
                   : kind == "anomaly"    ? MarkerKind::Anomaly
                                          : MarkerKind::Truncation;
    std::optional<Color> col;
    if (m.contains("color") && !m["color"].is_null()) col = Color{m["color"].get<int>()};
    t.mark(k, m.value("detail", std::string()), col, m.value("exhaustive", true));
  }
  return t;
}

// ---------------------------------------------------------------------------
// Adversary inputs

/// [{"e":0,"halts_at":5}, {"e":1,"halts_at":null}, ...]; indices must be
/// 0..M-1 in any order.
inline ToyHaltingOracle machines_from_json(const json& j) {
  if (!j.is_array()) throw ParseError("machines: expected an array");
  ToyHaltingOracle o;
  o.halts_at.assign(j.size(), std::nullopt);
  std::vector<char> seen(j.size(), 0);
  for (const auto& m : j) {
    const int e = detail::field<int>(m, "e", "machines");
    if (e < 0 || e >= static_cast<int>(j.size()) || seen[e]++)
      throw ParseError("machines: indices must be 0.." + std::to_string(j.size() - 1) + " without repeats");
    if (!m.contains("halts_at")) throw ParseError("machines: missing \"halts_at\"");
    if (!m["halts_at"].is_null()) {
      const int h = m["halts_at"].get<int>();
      if (h < 0) throw ParseError("machines: negative halting time");
      o.halts_at[e] = h;
    }
  }
  return o;
}

inline json to_json(const ToyHaltingOracle& o) {
  json j = json::array();
  for (int e = 0; e < o.size(); ++e)
    j.push_back({{"e", e}, {"halts_at", o.halts_at[e] ? json(*o.halts_at[e]) : json(nullptr)}});
  return j;
}

inline CandidateDecomposer candidate_from_json(const json& j) {
  const auto kind = detail::field<std::string>(j, "kind", "candidate");
  const auto id = j.value("id", kind);
  CandidateDecomposer c;
  if (kind == "constant-blue") c = constant_blue_candidate(id);
  else if (kind == "gg-replay") c = gg_replay_candidate(id);
  else if (kind == "alternating") c = alternating_candidate(id);
  else if (kind == "empty") c = empty_candidate(id);
  else if (kind == "fixed")
    c = fixed_candidate(id, j.value("blue", std::vector<Vertex>{}), j.value("red", std::vector<Vertex>{}));
  else
    throw ParseError("candidate: unknown kind " + kind);
  c.arrives_at = j.value("arrives_at", 0);
  if (c.arrives_at < 0) throw ParseError("candidate: negative arrival stage");
  return c;
}

/// Either an array of candidates (one build) or {"builds": [[...], ...]}.
inline std::vector<std::vector<CandidateDecomposer>> candidate_sets_from_json(const json& j) {
  std::vector<std::vector<CandidateDecomposer>> out;
  auto one = [&](const json& arr) {
    if (!arr.is_array() || arr.empty()) throw ParseError("candidates: each build needs a nonempty array");
    std::vector<CandidateDecomposer> w;
    for (const auto& c : arr) w.push_back(candidate_from_json(c));
    out.push_back(std::move(w));
  };
  if (j.is_array()) one(j);
  else if (j.is_object() && j.contains("builds") && j["builds"].is_array())
    for (const auto& b : j["builds"]) one(b);
  else
    throw ParseError("candidates: expected an array or {\"builds\": [...]}");
  return out;
}

/// Output envelope shared by every file the tools write.
inline json envelope(const RunConfig& cfg, const std::vector<std::pair<std::string, std::string>>& inputs,
                     json result) {
  json in = json::object();
  for (const auto& [name, text] : inputs) in[name] = fnv1a_hex(text);
  return json{{"v", kSchemaVersion}, {"config", to_json(cfg)}, {"inputs", in}, {"result", std::move(result)}};
}

/// Accepts either a bare object or an envelope around it.
inline const json& unwrap(const json& j) {
  if (j.is_object() && j.contains("result") && j.contains("config")) return j["result"];
  return j;
}

}  // namespace rado
