#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rado/coloring.hpp"
#include "rado/paths.hpp"

namespace rado {

enum class OracleKind { Cofinite, Cohesive, ExactFinite, Custom };

inline const char* oracle_kind_name(OracleKind k) {
  switch (k) {
    case OracleKind::Cofinite: return "cofinite";
    case OracleKind::Cohesive: return "cohesive";
    case OracleKind::ExactFinite: return "exact-finite";
    case OracleKind::Custom: return "custom";
  }
  return "?";
}

/// A predicate on vertex sets standing in for membership in a non-principal
/// ultrafilter. `scale` is the size below which a set without a tail must
/// never be large.
struct LargenessOracle {
  OracleKind kind = OracleKind::Custom;
  std::function<bool(const VertexSet&)> pred;
  int scale = 1;
  std::string description;

  bool is_large(const VertexSet& x) const { return pred(x); }
};

/// Raised when a tested partition does not have exactly one large part.
class OracleViolation : public std::runtime_error {
 public:
  OracleViolation(Vertex m, std::vector<int> large_parts)
      : std::runtime_error(message(m, large_parts)), m_(m), large_(std::move(large_parts)) {}

  /// Partitioned vertex, or -1 for the partition {A_i}.
  Vertex vertex() const { return m_; }
  const std::vector<int>& large_parts() const { return large_; }

 private:
  static std::string message(Vertex m, const std::vector<int>& parts) {
    std::string s = "oracle violation on partition ";
    s += m < 0 ? std::string("{A_i}") : "{N(" + std::to_string(m) + ",i)}";
    s += ": " + std::to_string(parts.size()) + " large parts";
    for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? "," : " [") + std::to_string(parts[i]);
    if (!parts.empty()) s += "]";
    return s;
  }

  Vertex m_;
  std::vector<int> large_;
};

/// Large iff the set contains the tail of the stable extension. A neighbor
/// set N(m, i) over the whole universe carries the tail exactly when i is the
/// limit color of m.
inline LargenessOracle cofinite_oracle(const Coloring& c) {
  const auto* p = c.presentation();
  if (!p) throw std::domain_error("cofinite oracle needs a stable presentation");
  if (!validate_stable(c)) throw std::domain_error("presentation is not stable on its universe");
  for (auto t : p->thresholds)
    if (t >= c.n() && c.n() > 0) throw std::domain_error("stability threshold not below the universe size");
  LargenessOracle o;
  o.kind = OracleKind::Cofinite;
  o.pred = [](const VertexSet& x) { return x.tail; };
  o.scale = c.n() + 1;
  o.description = "cofinite";
  return o;
}

inline LargenessOracle custom_oracle(std::function<bool(const VertexSet&)> pred, std::string name, int scale = 1) {
  LargenessOracle o;
  o.kind = OracleKind::Custom;
  o.pred = std::move(pred);
  o.scale = scale;
  o.description = std::move(name);
  return o;
}

// ---------------------------------------------------------------------------
// Cohesive set

struct CohesiveStage {
  Vertex m = 0;
  Color i;
  Vertex extracted = 0;
  bool inside = true;  // R continued inside N(m, i)
  std::size_t residual = 0;
};

struct CohesiveState {
  std::vector<Vertex> C;
  std::vector<Vertex> R;
  std::vector<CohesiveStage> processed;
};

/// Stage s handles the pair (m, i) with s = m * r + i. The larger side
/// stands in for the infinite one; ties go to N(m, i).
inline CohesiveState cohesive_build(const Coloring& c, int universe) {
  if (universe > c.n() || universe < 0) throw std::out_of_range("universe larger than coloring");
  CohesiveState st;
  st.R = range_set(universe).members;
  const int r = c.r();
  for (std::int64_t s = 0; s < static_cast<std::int64_t>(universe) * r && !st.R.empty(); ++s) {
    const Vertex m = static_cast<Vertex>(s / r);
    const Color i{static_cast<int>(s % r)};
    const Vertex cs = st.R.front();
    st.C.push_back(cs);
    std::vector<Vertex> in, out;
    for (auto v : st.R) {
      if (v == cs) continue;
      (v != m && c.at(m, v) == i ? in : out).push_back(v);
    }
    const bool inside = in.size() >= out.size();
    st.R = inside ? std::move(in) : std::move(out);
    st.processed.push_back({m, i, cs, inside, st.R.size()});
  }
  return st;
}

/// Large iff at most `slack` elements of C fall outside; negative slack
/// selects |C| / 4.
inline LargenessOracle cohesive_oracle(const CohesiveState& st, int slack = -1) {
  if (slack < 0) slack = static_cast<int>(st.C.size() / 4);
  auto C = st.C;
  std::sort(C.begin(), C.end());
  LargenessOracle o;
  o.kind = OracleKind::Cohesive;
  o.pred = [C, slack](const VertexSet& x) {
    int outside = 0;
    for (auto v : C)
      if (!x.contains(v) && ++outside > slack) return false;
    return true;
  };
  o.scale = std::max(1, static_cast<int>(C.size()) - slack);
  o.description = "cohesive(|C|=" + std::to_string(C.size()) + ",slack=" + std::to_string(slack) + ")";
  return o;
}

/// Strict majority of a reference set.
inline LargenessOracle exact_finite_oracle(std::vector<Vertex> ref) {
  std::sort(ref.begin(), ref.end());
  ref.erase(std::unique(ref.begin(), ref.end()), ref.end());
  LargenessOracle o;
  o.kind = OracleKind::ExactFinite;
  const std::size_t need = ref.size() / 2 + 1;
  o.pred = [ref, need](const VertexSet& x) {
    std::size_t k = 0;
    for (auto v : ref) k += x.contains(v);
    return k >= need;
  };
  o.scale = static_cast<int>(need);
  o.description = "exact-finite(|ref|=" + std::to_string(ref.size()) + ")";
  return o;
}

/// The odd-sized upper part of [n] used when no reference set is given.
inline std::vector<Vertex> default_reference(int n) {
  int len = n - n / 2;
  if (len % 2 == 0) --len;
  std::vector<Vertex> ref;
  for (Vertex v = n - len; v < n; ++v) ref.push_back(v);
  return ref;
}

// ---------------------------------------------------------------------------
// Axioms

/// Indices i with N(m, i) large.
inline std::vector<int> large_neighbor_colors(const Coloring& c, const LargenessOracle& L, Vertex m, int universe) {
  std::vector<int> out;
  for (int i = 0; i < c.r(); ++i)
    if (L.is_large(neighbors_of_color(c, m, Color{i}, universe).set)) out.push_back(i);
  return out;
}

/// The unique large color of m; throws OracleViolation otherwise.
inline Color oracle_color(const Coloring& c, const LargenessOracle& L, Vertex m, int universe) {
  auto large = large_neighbor_colors(c, L, m, universe);
  if (large.size() != 1) throw OracleViolation(m, std::move(large));
  return Color{large.front()};
}

struct AxiomViolation {
  std::string axiom;  // "exactly-one", "finite", "intersection"
  Vertex m = -1;
  Vertex other = -1;
  std::vector<int> large_parts;
};

struct AxiomReport {
  std::size_t partitions = 0;
  std::size_t small_sets = 0;
  std::size_t intersections = 0;
  std::vector<AxiomViolation> violations;

  bool ok() const { return violations.empty(); }
};

/// Tests the axioms on the neighbor partitions of `vertices`: exactly one
/// large part, no tail-free set below the oracle's scale is large (empty set,
/// singletons), and pairwise intersections of the certified large neighbor
/// sets are large.
inline AxiomReport check_axioms(const Coloring& c, const LargenessOracle& L, int universe,
                                const std::vector<Vertex>& vertices, bool intersections = true) {
  AxiomReport rep;
  std::vector<VertexSet> large_sets;
  std::vector<Vertex> owners;
  for (auto m : vertices) {
    ++rep.partitions;
    auto large = large_neighbor_colors(c, L, m, universe);
    if (large.size() != 1) {
      rep.violations.push_back({"exactly-one", m, -1, large});
      continue;
    }
    large_sets.push_back(neighbors_of_color(c, m, Color{large.front()}, universe).set);
    owners.push_back(m);
  }
  std::vector<VertexSet> small{VertexSet{}};
  if (L.scale > 1)
    for (Vertex v = 0; v < universe; ++v) small.push_back(VertexSet{{v}, false});
  for (const auto& s : small) {
    ++rep.small_sets;
    if (static_cast<int>(s.size()) < L.scale && L.is_large(s))
      rep.violations.push_back({"finite", s.members.empty() ? -1 : s.members.front(), -1, {}});
  }
  if (intersections)
    for (std::size_t a = 0; a < large_sets.size(); ++a)
      for (std::size_t b = a + 1; b < large_sets.size(); ++b) {
        ++rep.intersections;
        if (!L.is_large(intersect(large_sets[a], large_sets[b])))
          rep.violations.push_back({"intersection", owners[a], owners[b], {}});
      }
  return rep;
}

inline std::vector<Vertex> all_vertices(int n) { return range_set(n).members; }

// ---------------------------------------------------------------------------
// Constructions

struct UltraRun {
  Trace trace{DecompState::empty(2)};
  /// Oracle color of each vertex placed as a stage vertex; connectors have none.
  std::vector<std::optional<Color>> stage_color;
  /// Stage vertices appended without a connector.
  std::vector<Vertex> direct;
  /// Every vertex below this is placed.
  int covered_prefix = 0;

  const DecompState& state() const { return trace.final_state(); }
};

inline int covered_prefix_of(const DecompState& s, int n) {
  auto placed = s.placed_mask(n);
  int k = 0;
  while (k < n && placed[k]) ++k;
  return k;
}

/// Stage s: if s is unplaced, it goes on the path of its unique large color
/// k, preceded by the least unplaced connector in N(e, k) ∩ N(s, k) when the
/// path already has an end e. Without a connector, s is appended directly
/// when {e, s} has color k; otherwise the trace ends with a truncation
/// marker.
inline UltraRun ultra_decompose(const Coloring& c, const LargenessOracle& L, int universe) {
  if (universe > c.n() || universe < 0) throw std::out_of_range("universe larger than coloring");
  UltraRun run;
  run.trace = Trace(DecompState::empty(c.r()));
  run.stage_color.assign(universe, std::nullopt);
  std::vector<char> placed(universe, 0);
  for (Vertex s = 0; s < universe; ++s) {
    if (placed[s]) continue;
    const Color k = oracle_color(c, L, s, universe);
    const auto& cur = run.trace.final_state();
    if (auto e = cur.end(k)) {
      std::optional<Vertex> conn;
      for (Vertex v = 0; v < universe && !conn; ++v)
        if (!placed[v] && v != s && c.at(*e, v) == k && c.at(s, v) == k) conn = v;
      if (!conn && c.at(*e, s) == k) {
        run.direct.push_back(s);
      } else if (!conn) {
        run.trace.mark(MarkerKind::Truncation,
                       "no connector for vertex " + std::to_string(s) + " on the " + color_name(k) + " path", k);
        break;
      } else {
        auto st = ExtensionStep::append(k, *conn);
        run.trace.push(st, apply_step(cur, st));
        placed[*conn] = 1;
      }
    }
    auto st = ExtensionStep::append(k, s);
    run.trace.push(st, apply_step(run.trace.final_state(), st));
    placed[s] = 1;
    run.stage_color[s] = k;
  }
  run.covered_prefix = covered_prefix_of(run.trace.final_state(), universe);
  return run;
}

/// The ultrafilter construction with largeness meaning cofinite.
inline UltraRun stable_decompose(const Coloring& c) { return ultra_decompose(c, cofinite_oracle(c), c.n()); }

struct HomogeneousResult {
  std::vector<Vertex> set;
  Color color;
  bool complete = false;
};

/// Fixes the large A_j and thins it greedily.
inline HomogeneousResult homogeneous_set(const Coloring& c, const LargenessOracle& L, int universe, int target) {
  if (universe > c.n() || universe < 0) throw std::out_of_range("universe larger than coloring");
  std::vector<VertexSet> A(c.r());
  for (Vertex m = 0; m < universe; ++m) {
    auto large = large_neighbor_colors(c, L, m, universe);
    if (large.size() == 1) A[large.front()].members.push_back(m);
  }
  std::vector<int> large;
  for (int i = 0; i < c.r(); ++i)
    if (L.is_large(A[i])) large.push_back(i);
  if (large.size() != 1) throw OracleViolation(-1, std::move(large));
  HomogeneousResult res;
  res.color = Color{large.front()};
  const auto& Aj = A[res.color.index].members;
  for (auto v : Aj) {
    if (static_cast<int>(res.set.size()) >= target) break;
    bool ok = true;
    for (auto h : res.set) ok = ok && c.at(h, v) == res.color;
    if (ok) res.set.push_back(v);
  }
  res.complete = static_cast<int>(res.set.size()) >= target;
  return res;
}

struct GenericRun {
  Trace trace{DecompState::empty(2)};
  /// Reservoir after each extension, with the index of the trace state it
  /// belongs to.
  std::vector<std::vector<Vertex>> reservoirs;
  std::vector<std::size_t> reservoir_state;
  /// Dense-set indices met, in order.
  std::vector<int> met;
  /// First index not met, or n when all were.
  int first_unmet = 0;
};

/// Condition sequence from (∅, …, ∅, [n]). For each unplaced i the color j
/// with the most neighbors in the reservoir X is chosen and X shrinks to
/// X ∩ N(i, j) minus the vertices used. |X| < theta stands in for X being
/// finite and stops the run.
inline GenericRun generic_decompose(const Coloring& c, int theta) {
  const int n = c.n(), r = c.r();
  if (theta < r + 1) throw PreconditionError("theta must be at least r + 1");
  GenericRun run;
  run.trace = Trace(DecompState::empty(r));
  std::vector<Vertex> X = range_set(n).members;
  run.first_unmet = n;
  for (Vertex i = 0; i < n; ++i) {
    const auto& cur = run.trace.final_state();
    if (cur.contains(i)) {
      run.met.push_back(i);
      continue;
    }
    int best = 0;
    std::size_t best_size = 0;
    for (int j = 0; j < r; ++j) {
      std::size_t k = 0;
      for (auto v : X) k += v != i && c.at(i, v) == Color{j};
      if (k > best_size) {
        best = j;
        best_size = k;
      }
    }
    const Color j{best};
    std::vector<Vertex> next;
    for (auto v : X)
      if (v != i && c.at(i, v) == j) next.push_back(v);
    std::optional<Vertex> conn;
    if (auto e = cur.end(j)) {
      for (auto v : X)
        if (v != i && !cur.contains(v) && c.at(*e, v) == j && c.at(i, v) == j) {
          conn = v;
          break;
        }
      if (!conn) {
        run.first_unmet = i;
        run.trace.mark(MarkerKind::Truncation, "no connector in the reservoir for " + std::to_string(i), j);
        break;
      }
    }
    std::erase(next, i);
    if (conn) std::erase(next, *conn);
    if (static_cast<int>(next.size()) < theta) {
      run.first_unmet = i;
      run.trace.mark(MarkerKind::Truncation,
                     "reservoir below theta at " + std::to_string(i) + " (" + std::to_string(next.size()) + ")", j);
      break;
    }
    if (conn) {
      auto st = ExtensionStep::append(j, *conn);
      run.trace.push(st, apply_step(cur, st));
    }
    auto st = ExtensionStep::append(j, i);
    run.trace.push(st, apply_step(run.trace.final_state(), st));
    X = std::move(next);
    run.reservoirs.push_back(X);
    run.reservoir_state.push_back(run.trace.states.size() - 1);
    run.met.push_back(i);
  }
  return run;
}

}  // namespace rado
