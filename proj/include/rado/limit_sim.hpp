#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rado/coloring.hpp"
#include "rado/paths.hpp"
#include "rado/types.hpp"

namespace rado {

struct SearchBudget {
  int pair_length = 6;        // total vertices on a candidate witness pair
  int depth = 8;              // steps in a strong extension
  std::size_t nodes = 200000; // states expanded per search
  std::size_t pairs = 20000;  // witness candidates examined per color
};

namespace detail {
inline std::vector<int> state_key(const DecompState& s) {
  std::vector<int> k;
  for (const auto& p : s.paths) {
    k.insert(k.end(), p.vertices.begin(), p.vertices.end());
    k.push_back(-1);
  }
  return k;
}

inline int free_count(const DecompState& s, int n) { return n - static_cast<int>(s.placed_count()); }
}  // namespace detail

struct SwitchSearch {
  std::optional<std::vector<ExtensionStep>> steps;
  bool exhaustive = true;  // a negative answer covers every strong extension
};

/// Shortest sequence of strong one-step extensions of s whose last step is
/// a strong switch to z. Breadth first, children in (kind, vertex) order,
/// so the result is the lexicographically least among the shortest.
inline SwitchSearch find_strong_switch_extension(const Coloring& c, const DecompState& s, Color z,
                                                 const SearchBudget& budget = {}) {
  const StepKind want = z == kRed ? StepKind::SwitchToRed : StepKind::SwitchToBlue;
  struct Node {
    DecompState state;
    int parent;
    ExtensionStep step;
    int depth;
  };
  std::vector<Node> nodes;
  std::set<std::vector<int>> seen;
  nodes.push_back({s, -1, {}, 0});
  seen.insert(detail::state_key(s));
  SwitchSearch out;
  for (std::size_t head = 0; head < nodes.size(); ++head) {
    if (head >= budget.nodes) {
      out.exhaustive = false;
      break;
    }
    const int depth = nodes[head].depth;
    auto steps = strong_steps(c, nodes[head].state);
    if (depth >= budget.depth) {
      if (!steps.empty()) out.exhaustive = false;
      continue;
    }
    for (const auto& st : steps) {
      if (st.kind == want) {
        std::vector<ExtensionStep> seq{st};
        for (int i = static_cast<int>(head); nodes[i].parent >= 0; i = nodes[i].parent)
          seq.push_back(nodes[i].step);
        std::reverse(seq.begin(), seq.end());
        out.steps = std::move(seq);
        out.exhaustive = true;
        return out;
      }
      auto next = apply_step(nodes[head].state, st);
      if (!seen.insert(detail::state_key(next)).second) continue;
      nodes.push_back({std::move(next), static_cast<int>(head), st, depth + 1});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Case detection

enum class Verdict { Yes, No, Unknown };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

/// Whether every pair admits a strong extension containing a strong switch
/// to `color`. A No carries a witness pair; `minimal` means every pair
/// earlier in the (length of the color's path, other length, lex) order
/// was decided, so the witness has minimal path length for that color.
struct ColorVerdict {
  Verdict verdict = Verdict::Unknown;
  std::optional<DecompState> witness;
  bool minimal = false;
  std::size_t examined = 0;
};

struct CaseVerdict {
  ColorVerdict can_red;
  ColorVerdict can_blue;
};

namespace detail {
/// Calls f(path) for every valid path of color z with exactly `len`
/// vertices avoiding `blocked`, in lexicographic order. Stops when f
/// returns false.
inline bool for_each_path(const Coloring& c, Color z, int len, std::vector<char>& blocked,
                          std::vector<Vertex>& cur, const std::function<bool(const std::vector<Vertex>&)>& f) {
  if (static_cast<int>(cur.size()) == len) return f(cur);
  for (Vertex v = 0; v < c.n(); ++v) {
    if (blocked[v]) continue;
    if (!cur.empty() && c.at(cur.back(), v) != z) continue;
    blocked[v] = 1;
    cur.push_back(v);
    const bool go_on = for_each_path(c, z, len, blocked, cur, f);
    cur.pop_back();
    blocked[v] = 0;
    if (!go_on) return false;
  }
  return true;
}
}  // namespace detail

/// Enumerates disjoint pairs leaving at least one free vertex, ordered by
/// (|P_color|, |P_other|, lex), searches each for a strong switch to
/// `color`, and calls on_witness(pair, minimal) for every pair certified to
/// have none. Scanning stops when on_witness returns false.
inline ColorVerdict scan_witnesses(const Coloring& c, Color color, const SearchBudget& budget,
                                   const std::function<bool(const DecompState&, bool)>& on_witness) {
  if (c.r() != 2) throw std::domain_error("case detection needs a two coloring");
  const int n = c.n();
  ColorVerdict out;
  bool undecided_before = false;
  bool truncated = false;
  bool stopped = false;
  const Color other = opposite(color);
  const int max_total = std::min(budget.pair_length, n - 1);
  for (int a = 0; a <= max_total && !stopped; ++a)
    for (int b = 0; a + b <= max_total && !stopped; ++b) {
      std::vector<char> blocked(n, 0);
      std::vector<Vertex> pa, pb;
      detail::for_each_path(c, color, a, blocked, pa, [&](const std::vector<Vertex>& zpath) {
        return detail::for_each_path(c, other, b, blocked, pb, [&](const std::vector<Vertex>& opath) {
          if (out.examined >= budget.pairs) {
            truncated = true;
            return false;
          }
          DecompState s = color == kRed ? DecompState::two(opath, zpath) : DecompState::two(zpath, opath);
          ++out.examined;
          auto r = find_strong_switch_extension(c, s, color, budget);
          if (r.steps) return true;
          if (!r.exhaustive) {
            undecided_before = true;
            return true;
          }
          if (!out.witness) {
            out.verdict = Verdict::No;
            out.witness = s;
            out.minimal = !undecided_before;
          }
          if (!on_witness(s, !undecided_before)) stopped = true;
          return !stopped;
        });
      });
      if (truncated) break;
    }
  if (!out.witness) {
    const bool complete = !truncated && !undecided_before && budget.pair_length >= n - 1;
    out.verdict = complete ? Verdict::Yes : Verdict::Unknown;
  }
  return out;
}

inline ColorVerdict detect_color(const Coloring& c, Color color, const SearchBudget& budget = {}) {
  return scan_witnesses(c, color, budget, [](const DecompState&, bool) { return false; });
}

inline CaseVerdict detect_case(const Coloring& c, const SearchBudget& budget = {}) {
  return CaseVerdict{detect_color(c, kRed, budget), detect_color(c, kBlue, budget)};
}

// ---------------------------------------------------------------------------
// Constructions

namespace detail {
inline void push_steps(const Coloring& c, Trace& t, const std::vector<ExtensionStep>& steps) {
  for (auto st : steps) {
    if (st.is_switch()) st.strong = is_strong_switch(c, t.final_state(), *st.switched, st.added);
    t.push(st, apply_step(t.final_state(), st));
  }
}

inline std::optional<Vertex> least_free(const DecompState& s, int n) {
  auto placed = s.placed_mask(n);
  for (Vertex v = 0; v < n; ++v)
    if (!placed[v]) return v;
  return std::nullopt;
}
}  // namespace detail

/// Rounds of: place the least free x (BLUE extension, RED extension, else
/// the insertion switch), then a strong extension ending in a strong RED
/// switch, then one ending in a strong BLUE switch. A missing switch while
/// free vertices remain ends the trace with a case-failure marker.
inline Trace always_switch_construction(const Coloring& c, const SearchBudget& budget = {}) {
  if (c.r() != 2) throw std::domain_error("always_switch_construction needs a two coloring");
  const int n = c.n();
  Trace t(DecompState::empty(2));
  while (auto x = detail::least_free(t.final_state(), n)) {
    const auto& s = t.final_state();
    if (auto e = find_color_extension_to(c, s, kBlue, *x)) {
      extend(s, kBlue, *e, &t);
    } else if (auto f = find_color_extension_to(c, s, kRed, *x)) {
      extend(s, kRed, *f, &t);
    } else {
      auto [next, step] = insert_vertex(c, s, *x);
      if (!step.is_switch()) {
        t.mark(MarkerKind::Anomaly, "insertion of " + std::to_string(*x) + " did not switch");
        return t;
      }
      step.strong = is_strong_switch(c, s, *step.switched, step.added);
      if (!step.strong) {
        t.mark(MarkerKind::Anomaly, "insertion switch for " + std::to_string(*x) + " is not strong");
        return t;
      }
      t.push(step, next);
    }
    for (Color z : {kRed, kBlue}) {
      if (detail::free_count(t.final_state(), n) == 0) break;
      auto r = find_strong_switch_extension(c, t.final_state(), z, budget);
      if (!r.steps) {
        t.mark(MarkerKind::CaseFailure, "no strong " + color_name(z) + " switch", z, r.exhaustive);
        return t;
      }
      detail::push_steps(c, t, *r.steps);
    }
  }
  return t;
}

/// Greedy placement without switches from a witness: each least free x is
/// reached by an extension of the color opposite to `frozen`, else by one
/// of the frozen color.
inline Trace cannot_switch_construction(const Coloring& c, const DecompState& witness, Color frozen) {
  if (c.r() != 2) throw std::domain_error("cannot_switch_construction needs a two coloring");
  auto v = validate_partial(c, witness);
  if (!v.ok()) throw PreconditionError("witness is not a pair of disjoint paths: " + v.describe());
  const Color first = opposite(frozen);
  Trace t(witness);
  while (auto x = detail::least_free(t.final_state(), c.n())) {
    bool placed = false;
    for (Color z : {first, frozen}) {
      if (auto e = find_color_extension_to(c, t.final_state(), z, *x)) {
        extend(t.final_state(), z, *e, &t);
        placed = true;
        break;
      }
    }
    if (!placed) {
      t.mark(MarkerKind::Anomaly, "no extension to " + std::to_string(*x), frozen);
      return t;
    }
  }
  return t;
}

/// Extends only path `grow`, each time to the least free vertex. Stops at
/// the first vertex without such an extension and returns it.
inline std::optional<Vertex> greedy_single_color(const Coloring& c, Trace& t, Color grow) {
  while (auto x = detail::least_free(t.final_state(), c.n())) {
    auto e = find_color_extension_to(c, t.final_state(), grow, *x);
    if (!e) return x;
    extend(t.final_state(), grow, *e, &t);
  }
  return std::nullopt;
}

enum class UniformOutcome { UniformOk, Fallback, Diagnostic };

inline const char* outcome_name(UniformOutcome o) {
  switch (o) {
    case UniformOutcome::UniformOk: return "uniform-ok";
    case UniformOutcome::Fallback: return "fallback";
    case UniformOutcome::Diagnostic: return "diagnostic";
  }
  return "?";
}

struct UniformResult {
  UniformOutcome outcome = UniformOutcome::Diagnostic;
  DecompState state;
  Trace trace;
  std::optional<Color> frozen;       // color that cannot always strongly switch
  std::optional<Color> finite;       // the path kept finite by the fallback
  int fallback_case = 0;             // 1 or 2
  std::optional<DecompState> witness;
  bool witness_minimal = false;
  std::optional<DecompState> case2_start;  // (P_b1, P_r0) when case 2 ran
  std::optional<Vertex> case2_blocker;     // n_0
  int witnesses_tried = 0;
  std::string detail;
};

namespace detail {
/// Case 1 then case 2 from one witness; true on full coverage.
inline bool run_cases(const Coloring& c, const DecompState& witness, Color z, UniformResult& res) {
  const Color other = opposite(z);
  Trace t(witness);
  auto blocker = greedy_single_color(c, t, other);
  if (!blocker) {
    res.fallback_case = 1;
    res.finite = z;
    res.state = t.final_state();
    res.trace = std::move(t);
    return true;
  }
  res.case2_start = t.final_state();
  res.case2_blocker = blocker;
  Trace t2(t.final_state());
  auto blocker2 = greedy_single_color(c, t2, z);
  res.state = t2.final_state();
  res.trace = std::move(t2);
  if (!blocker2) {
    res.fallback_case = 2;
    res.finite = other;
    return true;
  }
  res.detail = "case 2 stuck at " + std::to_string(*blocker2);
  return false;
}
}  // namespace detail

/// Runs the always-switch construction; when it stops for lack of a strong
/// switch of color z, takes a witness for z of minimal z-path length and
/// covers the rest greedily with the opposite color (case 1), or, if that
/// gets stuck at n_0, with z from the stuck state (case 2). Witnesses of
/// the minimal length are tried in enumeration order until one completes.
inline UniformResult uniform_attempt(const Coloring& c, const SearchBudget& budget = {}) {
  UniformResult res;
  res.trace = always_switch_construction(c, budget);
  if (res.trace.completed()) {
    res.outcome = UniformOutcome::UniformOk;
    res.state = res.trace.final_state();
    return res;
  }
  const auto marker = *res.trace.marker;
  if (marker.kind != MarkerKind::CaseFailure || !marker.color) {
    res.detail = std::string("always-switch construction stopped: ") + marker.detail;
    res.state = marker.stuck;
    return res;
  }
  const Color z = *marker.color;
  res.frozen = z;
  std::size_t min_len = 0;
  bool done = false;
  auto verdict = scan_witnesses(c, z, budget, [&](const DecompState& w, bool minimal) {
    if (res.witnesses_tried == 0) min_len = w.path(z).size();
    if (w.path(z).size() > min_len) return false;
    ++res.witnesses_tried;
    UniformResult attempt;
    if (detail::run_cases(c, w, z, attempt)) {
      res.fallback_case = attempt.fallback_case;
      res.finite = attempt.finite;
      res.state = std::move(attempt.state);
      res.trace = std::move(attempt.trace);
      res.case2_start = attempt.case2_start;
      res.case2_blocker = attempt.case2_blocker;
      res.witness = w;
      res.witness_minimal = minimal;
      done = true;
      return false;
    }
    if (!res.witness) {
      res.witness = w;
      res.witness_minimal = minimal;
      res.detail = attempt.detail;
      res.state = attempt.state;
    }
    return true;
  });
  if (done) {
    res.outcome = UniformOutcome::Fallback;
    return res;
  }
  if (verdict.verdict != Verdict::No && marker.exhaustive) {
    // the stuck state is certified but may not be minimal
    ++res.witnesses_tried;
    res.witness = marker.stuck;
    UniformResult attempt;
    if (detail::run_cases(c, marker.stuck, z, attempt)) {
      res.outcome = UniformOutcome::Fallback;
      res.fallback_case = attempt.fallback_case;
      res.finite = attempt.finite;
      res.state = std::move(attempt.state);
      res.trace = std::move(attempt.trace);
      res.case2_start = attempt.case2_start;
      res.case2_blocker = attempt.case2_blocker;
      return res;
    }
    res.detail = attempt.detail;
  }
  if (!res.witness) res.detail = "no certified witness for " + color_name(z);
  return res;
}

// ---------------------------------------------------------------------------
// Limits

struct ColorLimit {
  std::vector<Vertex> stabilized;
  std::vector<int> certified_at;  // first state index from which the prefix through i is constant
  int undefined_from = 0;
  int strong_prefix = 0;          // positions frozen by a strong switch into this path
};

struct LimitPaths {
  std::vector<ColorLimit> colors;
};

/// Per color, the final path positions with the first state from which the
/// prefix through each position stays unchanged, plus the prefix length
/// guaranteed by strong switches.
inline LimitPaths limit_paths(const Trace& t) {
  LimitPaths out;
  const auto& last = t.final_state();
  for (int z = 0; z < last.r(); ++z) {
    ColorLimit lim;
    const auto& fin = last.paths[z].vertices;
    lim.stabilized = fin;
    lim.undefined_from = static_cast<int>(fin.size());
    // agree[k] = length of common prefix of state k's path with the final.
    std::vector<int> agree(t.states.size());
    for (std::size_t k = 0; k < t.states.size(); ++k) {
      const auto& p = t.states[k].paths[z].vertices;
      int a = 0;
      while (a < static_cast<int>(p.size()) && a < static_cast<int>(fin.size()) && p[a] == fin[a]) ++a;
      agree[k] = a;
    }
    lim.certified_at.resize(fin.size());
    for (int i = 0; i < static_cast<int>(fin.size()); ++i) {
      int k = static_cast<int>(t.states.size()) - 1;
      while (k > 0 && agree[k - 1] > i) --k;
      lim.certified_at[i] = k;
    }
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
      const auto& st = t.steps[i];
      if (!st.is_switch() || !st.strong || st.color != Color{z}) continue;
      const auto& p = t.states[i + 1].paths[z].vertices;
      auto it = std::find(p.begin(), p.end(), *st.switched);
      lim.strong_prefix = std::max(lim.strong_prefix, static_cast<int>(it - p.begin()) + 1);
    }
    out.colors.push_back(std::move(lim));
  }
  return out;
}

}  // namespace rado
