#pragma once

#include <algorithm>
#include <deque>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rado/coloring.hpp"
#include "rado/types.hpp"

namespace rado {

/// An ordered list of distinct vertices. Empty and singleton lists are
/// paths of every color.
struct Path {
  Color color;
  std::vector<Vertex> vertices;

  bool empty() const { return vertices.empty(); }
  std::size_t size() const { return vertices.size(); }
  Vertex back() const { return vertices.back(); }

  friend bool operator==(const Path&, const Path&) = default;
};

/// One path per color, path j has color j.
struct DecompState {
  std::vector<Path> paths;

  static DecompState empty(int r) {
    DecompState s;
    for (int j = 0; j < r; ++j) s.paths.push_back(Path{Color{j}, {}});
    return s;
  }

  static DecompState two(std::vector<Vertex> blue, std::vector<Vertex> red) {
    DecompState s;
    s.paths.push_back(Path{kBlue, std::move(blue)});
    s.paths.push_back(Path{kRed, std::move(red)});
    return s;
  }

  int r() const { return static_cast<int>(paths.size()); }
  const Path& path(Color c) const { return paths.at(c.index); }
  Path& path(Color c) { return paths.at(c.index); }
  const Path& blue() const { return path(kBlue); }
  const Path& red() const { return path(kRed); }

  std::optional<Vertex> end(Color c) const {
    const auto& p = path(c);
    if (p.empty()) return std::nullopt;
    return p.back();
  }

  bool contains(Vertex v) const {
    for (const auto& p : paths)
      if (std::find(p.vertices.begin(), p.vertices.end(), v) != p.vertices.end()) return true;
    return false;
  }

  /// Color of the path holding v.
  std::optional<Color> where(Vertex v) const {
    for (const auto& p : paths)
      if (std::find(p.vertices.begin(), p.vertices.end(), v) != p.vertices.end()) return p.color;
    return std::nullopt;
  }

  std::size_t placed_count() const {
    std::size_t k = 0;
    for (const auto& p : paths) k += p.size();
    return k;
  }

  /// Membership mask over [0, n).
  std::vector<char> placed_mask(int n) const {
    std::vector<char> m(n, 0);
    for (const auto& p : paths)
      for (auto v : p.vertices)
        if (v >= 0 && v < n) m[v] = 1;
    return m;
  }

  friend bool operator==(const DecompState&, const DecompState&) = default;
};

inline std::string to_string(const DecompState& s) {
  std::ostringstream os;
  os << "(";
  for (std::size_t j = 0; j < s.paths.size(); ++j) {
    if (j) os << ",";
    os << "[";
    for (std::size_t i = 0; i < s.paths[j].vertices.size(); ++i)
      os << (i ? "," : "") << s.paths[j].vertices[i];
    os << "]";
  }
  os << ")";
  return os.str();
}

enum class StepKind { Append, SwitchToRed, SwitchToBlue };

/// One atomic move. Append puts `added` at the end of path `color`. A switch
/// moves `switched` (the end of one path) to the end of the other path and
/// then appends `added` after it.
struct ExtensionStep {
  StepKind kind = StepKind::Append;
  Color color;
  Vertex added = -1;
  std::optional<Vertex> switched;
  bool strong = false;

  static ExtensionStep append(Color c, Vertex v) { return {StepKind::Append, c, v, std::nullopt, false}; }
  static ExtensionStep append_blue(Vertex v) { return append(kBlue, v); }
  static ExtensionStep append_red(Vertex v) { return append(kRed, v); }
  static ExtensionStep switch_to_red(Vertex switched, Vertex follower, bool strong = false) {
    return {StepKind::SwitchToRed, kRed, follower, switched, strong};
  }
  static ExtensionStep switch_to_blue(Vertex switched, Vertex follower, bool strong = false) {
    return {StepKind::SwitchToBlue, kBlue, follower, switched, strong};
  }

  bool is_switch() const { return kind != StepKind::Append; }

  /// Color of the path that receives `added`.
  Color target() const { return color; }

  friend bool operator==(const ExtensionStep&, const ExtensionStep&) = default;
};

inline std::string to_string(const ExtensionStep& s) {
  std::ostringstream os;
  switch (s.kind) {
    case StepKind::Append: os << "Append" << color_name(s.color) << "(" << s.added << ")"; break;
    case StepKind::SwitchToRed: os << "SwitchToRed(" << *s.switched << "," << s.added << ")"; break;
    case StepKind::SwitchToBlue: os << "SwitchToBlue(" << *s.switched << "," << s.added << ")"; break;
  }
  if (s.strong) os << "*";
  return os.str();
}

enum class MarkerKind { Truncation, CaseFailure, Anomaly };

inline const char* marker_name(MarkerKind k) {
  switch (k) {
    case MarkerKind::Truncation: return "truncation";
    case MarkerKind::CaseFailure: return "case_failure";
    case MarkerKind::Anomaly: return "anomaly";
  }
  return "?";
}

/// Why a construction stopped before covering its universe.
struct TraceMarker {
  MarkerKind kind = MarkerKind::Truncation;
  std::string detail;
  std::optional<Color> color;
  bool exhaustive = true;  // false when a search budget cut the decision
  DecompState stuck;
};

/// states[0] is the initial state; steps[i] leads from states[i] to
/// states[i + 1].
struct Trace {
  std::vector<DecompState> states;
  std::vector<ExtensionStep> steps;
  std::optional<TraceMarker> marker;

  explicit Trace(DecompState initial = DecompState::empty(2)) { states.push_back(std::move(initial)); }

  const DecompState& initial() const { return states.front(); }
  const DecompState& final_state() const { return states.back(); }
  bool completed() const { return !marker.has_value(); }

  void push(const ExtensionStep& step, DecompState next) {
    steps.push_back(step);
    states.push_back(std::move(next));
  }

  void mark(MarkerKind kind, std::string detail, std::optional<Color> color = std::nullopt,
            bool exhaustive = true) {
    marker = TraceMarker{kind, std::move(detail), color, exhaustive, final_state()};
  }
};

// ---------------------------------------------------------------------------
// Validation

enum class Failure { None, BadEdge, Overlap, Missing, OutOfUniverse, WrongPathCount };

struct Validation {
  Failure failure = Failure::None;
  int path = -1;
  int position = -1;
  Vertex vertex = -1;

  bool ok() const { return failure == Failure::None; }
  explicit operator bool() const { return ok(); }

  std::string describe() const {
    std::ostringstream os;
    switch (failure) {
      case Failure::None: os << "valid"; break;
      case Failure::BadEdge: os << "bad-edge(" << path << "," << position << ")"; break;
      case Failure::Overlap: os << "overlap(" << vertex << ")"; break;
      case Failure::Missing: os << "missing(" << vertex << ")"; break;
      case Failure::OutOfUniverse: os << "out-of-universe(" << vertex << ")"; break;
      case Failure::WrongPathCount: os << "wrong-path-count"; break;
    }
    return os.str();
  }
};

/// True iff the vertices are distinct, inside the coloring's universe, and
/// every consecutive pair has the path's color.
inline bool validate_path(const Coloring& c, const Path& p) {
  std::vector<Vertex> seen = p.vertices;
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) return false;
  for (auto v : p.vertices)
    if (v < 0 || v >= c.n()) return false;
  for (std::size_t i = 1; i < p.vertices.size(); ++i)
    if (c.at(p.vertices[i - 1], p.vertices[i]) != p.color) return false;
  return true;
}

/// Paths individually valid and pairwise disjoint; coverage is not checked.
inline Validation validate_partial(const Coloring& c, const DecompState& s) {
  Validation v;
  if (s.r() != c.r()) {
    v.failure = Failure::WrongPathCount;
    return v;
  }
  std::vector<char> seen(c.n(), 0);
  for (int j = 0; j < s.r(); ++j) {
    const auto& p = s.paths[j];
    if (p.color != Color{j}) {
      v.failure = Failure::WrongPathCount;
      v.path = j;
      return v;
    }
    for (std::size_t i = 0; i < p.vertices.size(); ++i) {
      auto x = p.vertices[i];
      if (x < 0 || x >= c.n()) {
        v.failure = Failure::OutOfUniverse;
        v.vertex = x;
        return v;
      }
      if (seen[x]) {
        v.failure = Failure::Overlap;
        v.vertex = x;
        return v;
      }
      seen[x] = 1;
      if (i > 0 && c.at(p.vertices[i - 1], x) != p.color) {
        v.failure = Failure::BadEdge;
        v.path = j;
        v.position = static_cast<int>(i);
        return v;
      }
    }
  }
  return v;
}

/// Every path valid, paths disjoint, union is exactly [0, n).
inline Validation validate_decomposition(const Coloring& c, const DecompState& s, int n) {
  if (n > c.n()) throw std::out_of_range("universe larger than coloring");
  auto v = validate_partial(c, s);
  if (!v.ok()) return v;
  std::vector<char> seen(n, 0);
  for (const auto& p : s.paths)
    for (auto x : p.vertices) {
      if (x >= n) {
        v.failure = Failure::OutOfUniverse;
        v.vertex = x;
        return v;
      }
      seen[x] = 1;
    }
  for (Vertex x = 0; x < n; ++x)
    if (!seen[x]) {
      v.failure = Failure::Missing;
      v.vertex = x;
      return v;
    }
  return v;
}

inline Validation validate_decomposition(const Coloring& c, const DecompState& s) {
  return validate_decomposition(c, s, c.n());
}

// ---------------------------------------------------------------------------
// One-step extensions

/// Applies a step structurally; colors are not consulted. Appending to an
/// empty path is allowed.
inline DecompState apply_step(const DecompState& s, const ExtensionStep& step) {
  if (s.r() != 2 && step.is_switch())
    throw PreconditionError("switch steps need a two coloring");
  if (step.added < 0 || s.contains(step.added))
    throw PreconditionError("step adds vertex " + std::to_string(step.added) +
                            " which is already placed");
  DecompState out = s;
  switch (step.kind) {
    case StepKind::Append: {
      if (step.color.index < 0 || step.color.index >= s.r())
        throw PreconditionError("append to nonexistent color");
      out.path(step.color).vertices.push_back(step.added);
      break;
    }
    case StepKind::SwitchToRed:
    case StepKind::SwitchToBlue: {
      const Color from = step.kind == StepKind::SwitchToRed ? kBlue : kRed;
      const Color to = opposite(from);
      if (!step.switched || s.path(from).empty() || s.path(from).back() != *step.switched)
        throw PreconditionError("switched vertex is not the end of the " + color_name(from) + " path");
      if (*step.switched == step.added) throw PreconditionError("follower equals switched vertex");
      out.path(from).vertices.pop_back();
      out.path(to).vertices.push_back(*step.switched);
      out.path(to).vertices.push_back(step.added);
      break;
    }
  }
  return out;
}

/// Whether the step is applicable to s and its result respects the colors.
inline bool is_legal_step(const Coloring& c, const DecompState& s, const ExtensionStep& step) {
  if (step.added < 0 || step.added >= c.n() || s.contains(step.added)) return false;
  switch (step.kind) {
    case StepKind::Append: {
      if (step.color.index < 0 || step.color.index >= s.r()) return false;
      auto e = s.end(step.color);
      return !e || c.at(*e, step.added) == step.color;
    }
    case StepKind::SwitchToRed:
    case StepKind::SwitchToBlue: {
      if (s.r() != 2) return false;
      const Color from = step.kind == StepKind::SwitchToRed ? kBlue : kRed;
      const Color to = opposite(from);
      auto x = s.end(from);
      if (!x || !step.switched || *x != *step.switched) return false;
      auto e = s.end(to);
      if (e && c.at(*e, *x) != to) return false;
      return c.at(*x, step.added) == to;
    }
  }
  return false;
}

/// Insertion rule. `at` gives the color of a pair of distinct
/// vertices. Rule order: append RED if the RED end sees n in RED, append
/// BLUE if the BLUE end sees n in BLUE, otherwise open the empty path with
/// {n} (BLUE when both are empty), otherwise switch according to c{x_r, x_b}.
template <class At>
ExtensionStep insertion_step(const At& at, const DecompState& s, Vertex n) {
  const auto xr = s.end(kRed);
  const auto xb = s.end(kBlue);
  if (xr && at(*xr, n) == kRed) return ExtensionStep::append_red(n);
  if (xb && at(*xb, n) == kBlue) return ExtensionStep::append_blue(n);
  if (!xb) return ExtensionStep::append_blue(n);
  if (!xr) return ExtensionStep::append_red(n);
  if (at(*xr, *xb) == kRed) return ExtensionStep::switch_to_red(*xb, n);
  return ExtensionStep::switch_to_blue(*xr, n);
}

/// Insertion of an unplaced vertex into a two coloring state.
inline std::pair<DecompState, ExtensionStep> insert_vertex(const Coloring& c, const DecompState& s,
                                                           Vertex n) {
  if (c.r() != 2 || s.r() != 2) throw std::domain_error("insert_vertex needs a two coloring");
  if (n < 0 || n >= c.n()) throw std::out_of_range("vertex outside universe");
  if (s.contains(n)) throw PreconditionError("vertex " + std::to_string(n) + " already placed");
  const auto step = insertion_step([&](Vertex a, Vertex b) { return c.at(a, b); }, s, n);
  return {apply_step(s, step), step};
}

/// Vertices of [0, n) on no path of s.
inline std::vector<char> free_mask(const DecompState& s, int n) {
  auto m = s.placed_mask(n);
  for (auto& b : m) b = !b;
  return m;
}

/// Shortest simple path of color z from the end of path z to x through
/// free vertices (least-vertex tie-break); returns the vertices appended
/// after the current end, ending with x. An empty path z yields {x}.
inline std::optional<std::vector<Vertex>> find_color_extension_to(const Coloring& c,
                                                                  const DecompState& s, Color z,
                                                                  Vertex x,
                                                                  const std::vector<char>& free) {
  if (x < 0 || x >= c.n() || !free[x]) throw PreconditionError("target vertex is not free");
  auto e = s.end(z);
  if (!e) return std::vector<Vertex>{x};
  const int n = c.n();
  std::vector<Vertex> parent(n, -2);
  std::deque<Vertex> queue{*e};
  parent[*e] = -1;
  while (!queue.empty()) {
    Vertex u = queue.front();
    queue.pop_front();
    for (Vertex v = 0; v < n; ++v) {
      if (!free[v] || parent[v] != -2 || c.at(u, v) != z) continue;
      parent[v] = u;
      if (v == x) {
        std::vector<Vertex> out;
        for (Vertex w = x; w != *e; w = parent[w]) out.push_back(w);
        std::reverse(out.begin(), out.end());
        return out;
      }
      queue.push_back(v);
    }
  }
  return std::nullopt;
}

inline std::optional<std::vector<Vertex>> find_color_extension_to(const Coloring& c,
                                                                  const DecompState& s, Color z,
                                                                  Vertex x,
                                                                  const VertexSet& free) {
  std::vector<char> m(c.n(), 0);
  for (auto v : free.members)
    if (v >= 0 && v < c.n()) {
      if (s.contains(v)) throw PreconditionError("free set meets a placed vertex");
      m[v] = 1;
    }
  return find_color_extension_to(c, s, z, x, m);
}

inline std::optional<std::vector<Vertex>> find_color_extension_to(const Coloring& c,
                                                                  const DecompState& s, Color z,
                                                                  Vertex x) {
  return find_color_extension_to(c, s, z, x, free_mask(s, c.n()));
}

/// Appends the vertices of an extension to path z.
inline DecompState extend(const DecompState& s, Color z, const std::vector<Vertex>& appended,
                          Trace* trace = nullptr) {
  DecompState cur = s;
  for (auto v : appended) {
    auto step = ExtensionStep::append(z, v);
    cur = apply_step(cur, step);
    if (trace) trace->push(step, cur);
  }
  return cur;
}

/// A switch of `switched` followed by `follower` is strong iff the
/// opposite-colored path has no extension to the follower in s. Edge colors
/// of the switch itself are not consulted.
inline bool is_strong_switch(const Coloring& c, const DecompState& s, Vertex switched,
                             Vertex follower) {
  if (s.r() != 2) throw PreconditionError("strong switches need a two coloring");
  Color from;
  if (s.end(kBlue) == switched)
    from = kBlue;
  else if (s.end(kRed) == switched)
    from = kRed;
  else
    throw PreconditionError("vertex " + std::to_string(switched) + " is not a path end");
  if (follower < 0 || follower >= c.n() || follower == switched || s.contains(follower))
    throw PreconditionError("follower must be a free vertex");
  return !find_color_extension_to(c, s, from, follower).has_value();
}

/// Every legal one-step extension of s, switches flagged by strength, in
/// the order (kind, vertex) with kinds AppendBlue, AppendRed, SwitchToRed,
/// SwitchToBlue.
inline std::vector<ExtensionStep> legal_steps(const Coloring& c, const DecompState& s) {
  std::vector<ExtensionStep> out;
  const int n = c.n();
  for (int j = 0; j < s.r(); ++j)
    for (Vertex v = 0; v < n; ++v) {
      auto st = ExtensionStep::append(Color{j}, v);
      if (is_legal_step(c, s, st)) out.push_back(st);
    }
  if (s.r() != 2) return out;
  for (auto kind : {StepKind::SwitchToRed, StepKind::SwitchToBlue}) {
    const Color from = kind == StepKind::SwitchToRed ? kBlue : kRed;
    auto x = s.end(from);
    if (!x) continue;
    for (Vertex v = 0; v < n; ++v) {
      ExtensionStep st{kind, opposite(from), v, *x, false};
      if (!is_legal_step(c, s, st)) continue;
      st.strong = is_strong_switch(c, s, *x, v);
      out.push_back(st);
    }
  }
  return out;
}

inline std::vector<ExtensionStep> strong_steps(const Coloring& c, const DecompState& s) {
  auto all = legal_steps(c, s);
  std::erase_if(all, [](const ExtensionStep& st) { return st.is_switch() && !st.strong; });
  return all;
}

// ---------------------------------------------------------------------------
// Trace properties

namespace detail {
inline int position_of(const Path& p, Vertex v) {
  auto it = std::find(p.vertices.begin(), p.vertices.end(), v);
  return it == p.vertices.end() ? -1 : static_cast<int>(it - p.vertices.begin());
}

/// n before m on RED, m before n on BLUE, or n on RED and m on BLUE.
inline bool ordered(const DecompState& s, Vertex n, Vertex m) {
  const int nr = position_of(s.red(), n), mr = position_of(s.red(), m);
  const int nb = position_of(s.blue(), n), mb = position_of(s.blue(), m);
  if (nr >= 0 && mr >= 0 && nr < mr) return true;
  if (nb >= 0 && mb >= 0 && mb < nb) return true;
  return nr >= 0 && mb >= 0;
}
}  // namespace detail

/// The three-way before-relation holding in `initial` is preserved in
/// `final`. Returns a description of the first violation.
inline std::optional<std::string> check_order_preservation(const DecompState& initial,
                                                           const DecompState& final) {
  std::vector<Vertex> placed;
  for (const auto& p : initial.paths) placed.insert(placed.end(), p.vertices.begin(), p.vertices.end());
  for (auto n : placed)
    for (auto m : placed) {
      if (n == m || !detail::ordered(initial, n, m)) continue;
      if (!detail::ordered(final, n, m))
        return "order of (" + std::to_string(n) + "," + std::to_string(m) + ") lost: " +
               to_string(initial) + " -> " + to_string(final);
    }
  return std::nullopt;
}

/// Once a vertex is placed it stays placed.
inline std::optional<std::string> check_placement_monotone(const Trace& t) {
  for (std::size_t i = 1; i < t.states.size(); ++i)
    for (const auto& p : t.states[i - 1].paths)
      for (auto v : p.vertices)
        if (!t.states[i].contains(v)) return "vertex " + std::to_string(v) + " dropped at state " + std::to_string(i);
  return std::nullopt;
}

/// A strongly switched vertex never switches back, and the receiving path's
/// prefix up to it is frozen in every later state.
inline std::optional<std::string> check_strong_permanence(const Trace& t) {
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const auto& st = t.steps[i];
    if (!st.is_switch() || !st.strong) continue;
    const Vertex v = *st.switched;
    const Color to = st.kind == StepKind::SwitchToRed ? kRed : kBlue;
    const auto& after = t.states[i + 1].path(to).vertices;
    const int pos = detail::position_of(t.states[i + 1].path(to), v);
    std::vector<Vertex> prefix(after.begin(), after.begin() + pos + 1);
    for (std::size_t j = i + 1; j < t.steps.size(); ++j) {
      const auto& later = t.steps[j];
      if (later.is_switch() && *later.switched == v)
        return "vertex " + std::to_string(v) + " switched back at step " + std::to_string(j);
    }
    for (std::size_t j = i + 2; j < t.states.size(); ++j) {
      const auto& p = t.states[j].path(to).vertices;
      if (p.size() < prefix.size() || !std::equal(prefix.begin(), prefix.end(), p.begin()))
        return color_name(to) + " prefix through " + std::to_string(v) + " changed at state " +
               std::to_string(j);
    }
  }
  return std::nullopt;
}

/// Each step of the trace is a one-step extension producing the next state.
inline std::optional<std::string> check_trace_steps(const Trace& t) {
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    DecompState expect;
    try {
      expect = apply_step(t.states[i], t.steps[i]);
    } catch (const PreconditionError& e) {
      return "step " + std::to_string(i) + " inapplicable: " + e.what();
    }
    if (!(expect == t.states[i + 1])) return "state " + std::to_string(i + 1) + " does not follow from its step";
  }
  return std::nullopt;
}

}  // namespace rado
