#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <functional>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "rado/coloring.hpp"
#include "rado/paths.hpp"

namespace rado {

// ---------------------------------------------------------------------------
// Halting-set coloring

/// Machine e halts on input e at stage halts_at[e] (never when empty).
struct ToyHaltingOracle {
  std::vector<std::optional<int>> halts_at;

  int size() const { return static_cast<int>(halts_at.size()); }
  bool halted_by(int e, long long stage) const {
    return e < size() && halts_at[e] && *halts_at[e] <= stage;
  }
  std::optional<int> max_halting_time() const {
    std::optional<int> m;
    for (const auto& h : halts_at)
      if (h && (!m || *h > *m)) m = *h;
    return m;
  }

  /// Runs a step-bounded interpreter for each machine; `run(e, budget)`
  /// returns the halting step if it is at most `budget`.
  static ToyHaltingOracle from_interpreter(int machines, int budget,
                                           const std::function<std::optional<int>(int, int)>& run) {
    ToyHaltingOracle o;
    for (int e = 0; e < machines; ++e) o.halts_at.push_back(run(e, budget));
    return o;
  }
};

struct MarkerDefinition {
  int e = 0;
  int stage = 0;
  long long k = 0;
  long long value = 0;
};

struct FlipEvent {
  int e = 0;
  int stage = 0;
  long long lo = 0;  // m_{e,s}
  long long hi = 0;  // s + 1, inclusive
};

/// m_{e,s} per stage; rows[s][e] is -1 when undefined. Stages past the last
/// row repeat it.
struct MarkerTable {
  std::vector<std::vector<long long>> rows;
  std::vector<MarkerDefinition> definitions;

  int machines() const { return rows.empty() ? 0 : static_cast<int>(rows.front().size()); }
  int last_stage() const { return static_cast<int>(rows.size()) - 1; }

  std::optional<long long> at(int e, long long stage) const {
    if (e < 0 || e >= machines()) throw std::out_of_range("marker index outside the machine list");
    const auto& row = rows[static_cast<std::size_t>(std::min<long long>(stage, last_stage()))];
    if (row[e] < 0) return std::nullopt;
    return row[e];
  }
  std::optional<long long> final_value(int e) const { return at(e, last_stage()); }
};

struct HaltingBuild {
  ToyHaltingOracle oracle;
  int stages = 0;
  Coloring coloring;  // streamed, stages + 1 vertices
  MarkerTable markers;
  std::vector<FlipEvent> flips;
  /// Stage at which each vertex's default turned RED, -1 if never. Covers
  /// every vertex a flip reached.
  std::vector<int> flip_stage;

  int flip_stage_of(Vertex x) const {
    return x < static_cast<Vertex>(flip_stage.size()) ? flip_stage[x] : -1;
  }
  int last_flip_stage() const {
    int m = -1;
    for (auto f : flip_stage) m = std::max(m, f);
    return m;
  }

  /// The limit coloring on [0, n): {x, y} with x < y is RED iff x's default
  /// turned RED at a stage <= y.
  Coloring extended(int n) const {
    StablePresentation p;
    p.limits.resize(n);
    p.thresholds.resize(n);
    for (Vertex x = 0; x < n; ++x) {
      const int f = flip_stage_of(x);
      p.limits[x] = f >= 0 ? kRed : kBlue;
      p.thresholds[x] = f >= 0 ? f : 0;
    }
    p.below_threshold = kBlue;
    return Coloring::stable(n, 2, std::move(p));
  }

  /// [k, 2k+1] for each defined final marker 2k + 2, in machine order.
  std::vector<std::pair<long long, long long>> protected_intervals() const {
    std::vector<std::pair<long long, long long>> out;
    for (int e = 0; e < markers.machines(); ++e)
      if (auto m = markers.final_value(e)) {
        const long long k = (*m - 2) / 2;
        out.emplace_back(k, 2 * k + 1);
      }
    return out;
  }
};

inline int halting_min_stages(const ToyHaltingOracle& o) {
  return 2 * o.size() + o.max_halting_time().value_or(0) + 2;
}

/// Stage s = 1..stages colors {x, s} for x < s with the default of x, after
/// updating markers and defaults. Stage s is the streamed stage s - 1, which
/// colors {t, (s - 1) + 1}. Markers exist for the listed machines only;
/// simultaneous halts are handled in increasing e.
inline HaltingBuild halting_coloring_build(const ToyHaltingOracle& oracle, int stages) {
  if (stages < halting_min_stages(oracle))
    throw PreconditionError("halting construction needs at least " + std::to_string(halting_min_stages(oracle)) +
                            " stages, got " + std::to_string(stages));
  const int M = oracle.size();
  HaltingBuild b;
  b.oracle = oracle;
  b.stages = stages;
  b.markers.rows.assign(1, std::vector<long long>(M, -1));
  std::vector<long long> cur(M, -1);
  std::vector<int> flip(static_cast<std::size_t>(stages) + 2, -1);
  long long used = 0;
  StreamBuilder sb(2);
  std::vector<Color> row;
  for (int s = 1; s <= stages; ++s) {
    used = std::max<long long>(used, s);
    for (int e = 0; e < M; ++e)
      if (cur[e] < 0) {
        const long long k = used + 1;
        cur[e] = 2 * k + 2;
        used = cur[e];
        b.markers.definitions.push_back({e, s, k, cur[e]});
        break;
      }
    for (int e = 0; e < std::min(M, s); ++e) {
      if (!oracle.halts_at[e] || *oracle.halts_at[e] != s || cur[e] < 0) continue;
      const long long lo = cur[e], hi = s + 1;
      for (long long x = lo; x <= hi; ++x)
        if (flip[x] < 0) flip[x] = s;
      b.flips.push_back({e, s, lo, hi});
      used = std::max(used, hi);
      for (int i = e + 1; i < M; ++i) cur[i] = -1;
    }
    b.markers.rows.push_back(cur);
    row.assign(s, kBlue);
    for (Vertex x = 0; x < s; ++x)
      if (flip[x] >= 0 && flip[x] <= s) row[x] = kRed;
    sb.add_stage(row);
  }
  b.coloring = sb.finish();
  b.flip_stage = std::move(flip);
  return b;
}

/// The decomposition implied by the defaults: never-flipped vertices on
/// BLUE in increasing order; flipped vertices on RED, joined through
/// never-flipped connectors above the last flip.
inline DecompState intended_decomposition(const HaltingBuild& b, int n) {
  std::vector<Vertex> flipped;
  for (Vertex x = 0; x < n; ++x)
    if (b.flip_stage_of(x) >= 0) flipped.push_back(x);
  DecompState d = DecompState::two({}, {});
  std::vector<char> connector(n, 0);
  if (!flipped.empty()) {
    const Vertex floor = std::max<Vertex>(b.last_flip_stage(), flipped.back());
    const int need = static_cast<int>(flipped.size()) - 1;
    std::vector<Vertex> conns;
    for (Vertex w = floor + 1; w < n && static_cast<int>(conns.size()) < need; ++w)
      if (b.flip_stage_of(w) < 0) conns.push_back(w);
    if (static_cast<int>(conns.size()) < need)
      throw PreconditionError("intended decomposition needs N >= " + std::to_string(floor + 1 + need) +
                              ", got " + std::to_string(n));
    for (std::size_t i = 0; i < flipped.size(); ++i) {
      d.paths[1].vertices.push_back(flipped[i]);
      if (i < conns.size()) {
        d.paths[1].vertices.push_back(conns[i]);
        connector[conns[i]] = 1;
      }
    }
  }
  for (Vertex x = 0; x < n; ++x)
    if (b.flip_stage_of(x) < 0 && !connector[x]) d.paths[0].vertices.push_back(x);
  auto v = validate_decomposition(b.extended(n), d);
  if (!v.ok()) throw std::logic_error("intended decomposition failed validation: " + v.describe());
  return d;
}

struct DecodeResult {
  std::vector<long long> markers;
  std::vector<bool> member;
  std::vector<long long> t0, t1;
};

/// Recovers markers and membership for machines 0..upto-1 from a
/// decomposition of the built coloring on [0, n).
inline DecodeResult decode(const DecompState& d, const HaltingBuild& b, int n, int upto = -1) {
  const int M = b.oracle.size();
  if (upto < 0 || upto > M) upto = M;
  if (auto v = validate_decomposition(b.extended(n), d); !v.ok())
    throw PreconditionError("decomposition is not valid for the built coloring: " + v.describe());
  std::vector<char> on_red(n, 0);
  for (auto x : d.red().vertices) on_red[x] = 1;
  std::vector<int> blue_pos(n, -1);
  for (std::size_t i = 0; i < d.blue().size(); ++i) blue_pos[d.blue().vertices[i]] = static_cast<int>(i);
  DecodeResult out;
  auto m = b.markers.at(0, 1);
  for (int e = 0; e < upto; ++e) {
    if (!m) throw std::logic_error("marker " + std::to_string(e) + " undefined at its decoding stage");
    const long long me = *m;
    if (me >= n) throw PreconditionError("decomposition too short: marker " + std::to_string(me) + " needs N > " +
                                         std::to_string(me + 1));
    long long t0 = -1;
    for (int s = 0; s <= b.markers.last_stage() && t0 < 0; ++s)
      if (b.markers.at(e, s) == me) t0 = s;
    int ell = 0;
    for (Vertex x = 0; x <= me; ++x)
      if (!on_red[x]) ell = std::max(ell, blue_pos[x] + 1);
    if (ell >= static_cast<int>(d.blue().size()))
      throw PreconditionError("BLUE path exhausted after marker " + std::to_string(me) + "; use a larger N");
    const long long t1 = d.blue().vertices[ell];
    out.markers.push_back(me);
    out.t0.push_back(t0);
    out.t1.push_back(t1);
    out.member.push_back(b.oracle.halted_by(e, t1));
    if (e + 1 < M) m = b.markers.at(e + 1, std::max(t0, t1) + 1);
  }
  return out;
}

inline std::vector<long long> decode_markers(const DecompState& d, const HaltingBuild& b, int n) {
  return decode(d, b, n).markers;
}

inline bool decode_membership(const DecompState& d, const HaltingBuild& b, int n, int e) {
  if (e < 0 || e >= b.oracle.size()) throw std::out_of_range("machine index outside the oracle");
  return decode(d, b, n, e + 1).member[e];
}

// ---------------------------------------------------------------------------
// Diagonalization against limit-approximation decomposers

/// Stage-s approximations: P_{z,s}(x) is path[z][x] for x < size, undefined
/// beyond. Values must not exceed s.
struct CandidateApprox {
  std::vector<Vertex> blue, red;
  const std::vector<Vertex>& path(int z) const { return z == 0 ? blue : red; }
};

/// Pairs among [0, s] are available at stage s.
using StageColor = std::function<Color(Vertex, Vertex)>;
using ApproxFn = std::function<CandidateApprox(int, const StageColor&)>;

/// `make` returns a fresh approximation function; functions may keep state
/// across stages and are called for s = 0, 1, 2, ... in order.
struct CandidateDecomposer {
  std::string id;
  std::string kind;
  int arrives_at = 0;
  std::function<ApproxFn()> make;
};

inline CandidateDecomposer constant_blue_candidate(std::string id = "constant-blue") {
  return {std::move(id), "constant-blue", 0, [] {
            return ApproxFn([](int s, const StageColor&) {
              CandidateApprox a;
              for (Vertex x = 0; x <= s; ++x) a.blue.push_back(x);
              return a;
            });
          }};
}

inline CandidateDecomposer alternating_candidate(std::string id = "alternating") {
  return {std::move(id), "alternating", 0, [] {
            return ApproxFn([](int s, const StageColor&) {
              CandidateApprox a;
              for (Vertex x = 0; x <= s; ++x) (x % 2 ? a.red : a.blue).push_back(x);
              return a;
            });
          }};
}

inline CandidateDecomposer empty_candidate(std::string id = "empty") {
  return {std::move(id), "empty", 0, [] { return ApproxFn([](int, const StageColor&) { return CandidateApprox{}; }); }};
}

/// Runs the insertion construction on the stage-s prefix [0, s].
inline CandidateDecomposer gg_replay_candidate(std::string id = "gg-replay") {
  return {std::move(id), "gg-replay", 0, [] {
            auto state = std::make_shared<DecompState>(DecompState::empty(2));
            return ApproxFn([state](int s, const StageColor& at) {
              if (!state->contains(s)) *state = apply_step(*state, insertion_step(at, *state, s));
              return CandidateApprox{state->blue().vertices, state->red().vertices};
            });
          }};
}

/// Reports fixed paths, each entry once the stage reaches it.
inline CandidateDecomposer fixed_candidate(std::string id, std::vector<Vertex> blue, std::vector<Vertex> red) {
  return {std::move(id), "fixed", 0, [blue, red] {
            return ApproxFn([blue, red](int s, const StageColor&) {
              CandidateApprox a;
              for (auto v : blue) {
                if (v > s) break;
                a.blue.push_back(v);
              }
              for (auto v : red) {
                if (v > s) break;
                a.red.push_back(v);
              }
              return a;
            });
          }};
}

namespace detail {

/// since[x]: first stage of the current run of equal values at position x.
struct StabilityTracker {
  std::vector<Vertex> prev;
  std::vector<int> since;
  int max_len = 0;

  void update(const std::vector<Vertex>& cur, int s) {
    const int len = static_cast<int>(cur.size());
    if (len > max_len) {
      prev.resize(len, -1);
      since.resize(len, 0);
      max_len = len;
    }
    for (int x = 0; x < max_len; ++x) {
      const Vertex v = x < len ? cur[x] : -1;
      if (v != prev[x]) {
        prev[x] = v;
        since[x] = s;
      }
    }
  }
  int since_at(int x) const { return x < max_len ? since[x] : 0; }
  int max_since_below(int len) const {
    int m = 0;
    for (int x = 0; x < std::min(len, max_len); ++x) m = std::max(m, since[x]);
    return m;
  }
};

}  // namespace detail

/// Strategy S_{z,i} at priority level j during one stage.
struct LevelChoice {
  int level = 0;
  int candidate = 0;
  int z = 0;  // 0 blue, 1 red
  long long t = 0;  // t_j(s)
  long long lo = -1;  // s_{j-1}
  long long hi = 0;  // s_j
  int k = 0;
  int ell = 0;
};

struct DiagonalBuild {
  int stages = 0;
  Coloring coloring;
  std::vector<std::vector<LevelChoice>> log;  // per stage
  std::vector<std::string> candidate_ids;
};

/// Strategies are keyed 2i + z, which is also the tie order.
inline DiagonalBuild diagonal_build(const std::vector<CandidateDecomposer>& cands, int stages) {
  if (cands.empty()) throw PreconditionError("diagonal construction needs at least one candidate");
  if (stages < 1) throw PreconditionError("diagonal construction needs at least one stage");
  const int N = static_cast<int>(cands.size());
  std::vector<ApproxFn> fns;
  for (const auto& c : cands) fns.push_back(c.make());
  std::vector<std::array<detail::StabilityTracker, 2>> track(N);
  std::vector<CandidateApprox> cur(N);
  StreamBuilder sb(2);
  StageColor at = [&sb](Vertex a, Vertex b) { return sb.at(a, b); };
  DiagonalBuild out;
  out.stages = stages;
  for (const auto& c : cands) out.candidate_ids.push_back(c.id);
  std::vector<std::vector<int>> rank_keys;  // per stage, strategy key at each level

  for (int s = 0; s < stages; ++s) {
    for (int i = 0; i < N; ++i) {
      cur[i] = fns[i](s, at);
      for (int z = 0; z < 2; ++z) {
        for (auto v : cur[i].path(z))
          if (v < 0 || v > s) throw PreconditionError("candidate " + cands[i].id + " reported a value above the stage");
        track[i][z].update(cur[i].path(z), s);
      }
    }
    std::vector<char> active(2 * N, 0), chosen(2 * N, 0);
    for (int i = 0; i < N; ++i)
      if (cands[i].arrives_at <= s) active[2 * i] = active[2 * i + 1] = 1;

    std::vector<LevelChoice> levels;
    std::vector<int> keys;
    std::vector<Color> row(s + 1, kBlue);
    long long lo = -1;
    // level 0
    {
      int best = -1;
      long long bt = 0;
      for (int key = 0; key < 2 * N; ++key) {
        if (!active[key]) continue;
        const int i = key / 2, z = key % 2;
        const long long t = std::max(track[i][z].since_at(0), cands[i].arrives_at);
        if (best < 0 || t < bt) {
          best = key;
          bt = t;
        }
      }
      if (best >= 0) {
        keys.push_back(best);
        long long s0 = s;
        for (long long q = bt; q < s; ++q)
          if (rank_keys[q].size() > 0 && rank_keys[q][0] == best) {
            s0 = q;
            break;
          }
        chosen[best] = 1;
        levels.push_back({0, best / 2, best % 2, bt, -1, s0, 0, 0});
        for (long long t = 0; t <= s0; ++t) row[t] = Color{1 - best % 2};
        lo = s0;
      }
    }
    // lower levels
    while (!levels.empty()) {
      const int j = static_cast<int>(levels.size());
      int best = -1;
      long long bt = 0;
      int bk = 0, bl = 0;
      for (int key = 0; key < 2 * N; ++key) {
        if (!active[key] || chosen[key]) continue;
        const int i = key / 2, z = key % 2;
        const auto& P = cur[i].path(z);
        const auto& Q = cur[i].path(1 - z);
        // least k with P(k) > lo and [0, lo] inside P|k ∪ Q|ell for some ell
        std::vector<int> qpos(static_cast<std::size_t>(lo + 1), -1);
        for (std::size_t x = 0; x < Q.size(); ++x)
          if (Q[x] <= lo) qpos[Q[x]] = static_cast<int>(x);
        std::vector<char> inP(static_cast<std::size_t>(lo + 1), 0);
        int found_k = -1, found_l = 0;
        for (int k = 0; k < static_cast<int>(P.size()) && k <= s; ++k) {
          if (P[k] > lo) {
            int ell = 0;
            bool ok = true;
            for (long long x = 0; x <= lo && ok; ++x) {
              if (inP[x]) continue;
              if (qpos[x] < 0) ok = false;
              else ell = std::max(ell, qpos[x] + 1);
            }
            if (ok && ell <= s) {
              found_k = k;
              found_l = ell;
              break;
            }
          } else {
            inP[P[k]] = 1;
          }
        }
        if (found_k < 0) continue;
        long long t = P[found_k];
        t = std::max<long long>(t, track[i][1 - z].max_since_below(found_l));
        t = std::max<long long>(t, track[i][z].max_since_below(found_k + 1));
        t = std::max<long long>(t, cands[i].arrives_at);
        if (best < 0 || t < bt) {
          best = key;
          bt = t;
          bk = found_k;
          bl = found_l;
        }
      }
      if (best < 0) break;
      keys.push_back(best);
      long long sj = s;
      for (long long q = bt; q < s; ++q)
        if (static_cast<int>(rank_keys[q].size()) > j && rank_keys[q][j] == best) {
          sj = q;
          break;
        }
      chosen[best] = 1;
      levels.push_back({j, best / 2, best % 2, bt, lo, sj, bk, bl});
      for (long long t = lo + 1; t <= sj && t <= s; ++t) row[t] = Color{1 - best % 2};
      lo = std::max(lo, sj);
    }
    rank_keys.push_back(keys);
    sb.add_stage(row);
    out.log.push_back(std::move(levels));
  }
  out.coloring = sb.finish();
  return out;
}

/// For each level j: t_j(s) never decreases while defined, and after a
/// stage s where it is undefined every later value exceeds s.
inline std::optional<std::string> check_t_monotone(const DiagonalBuild& b) {
  std::size_t depth = 0;
  for (const auto& l : b.log) depth = std::max(depth, l.size());
  for (std::size_t j = 0; j < depth; ++j) {
    long long last = -1;
    long long undefined_at = -1;
    for (std::size_t s = 0; s < b.log.size(); ++s) {
      if (j >= b.log[s].size()) {
        undefined_at = static_cast<long long>(s);
        continue;
      }
      const long long t = b.log[s][j].t;
      if (t < last)
        return "t_" + std::to_string(j) + " decreased at stage " + std::to_string(s) + " (" + std::to_string(last) +
               " -> " + std::to_string(t) + ")";
      if (undefined_at >= 0 && t <= undefined_at)
        return "t_" + std::to_string(j) + " at stage " + std::to_string(s) + " is " + std::to_string(t) +
               ", not above undefined stage " + std::to_string(undefined_at);
      last = t;
    }
  }
  return std::nullopt;
}

enum class DefeatVerdict { BlueFinite, RedFinite, CoverageGap, BadEdge, Overlap, NotDefeated, Undecided };

inline const char* verdict_name(DefeatVerdict v) {
  switch (v) {
    case DefeatVerdict::BlueFinite: return "blue-finite";
    case DefeatVerdict::RedFinite: return "red-finite";
    case DefeatVerdict::CoverageGap: return "coverage-gap";
    case DefeatVerdict::BadEdge: return "bad-edge";
    case DefeatVerdict::Overlap: return "overlap";
    case DefeatVerdict::NotDefeated: return "not-defeated";
    case DefeatVerdict::Undecided: return "undecided-at-bound";
  }
  return "?";
}

/// A trap (lo, hi] held by strategy (z, i) at a fixed level over the window.
struct Trap {
  int level = 0;
  long long lo = -1, hi = 0;
  int k = 0;
  int since = 0;  // first stage of the window with this trap
};

struct CandidateVerdict {
  std::string id;
  bool in_build = false;
  DefeatVerdict verdict = DefeatVerdict::Undecided;
  std::string evidence;
  std::vector<Vertex> limit_blue, limit_red;
  bool finite_at_bound[2] = {false, false};
  std::optional<Trap> trap[2];
  std::optional<Vertex> gap;
  std::optional<std::pair<int, int>> bad_edge;  // (color, position)
  std::optional<Vertex> overlap;

  bool defeated() const { return verdict != DefeatVerdict::Undecided && verdict != DefeatVerdict::NotDefeated; }
};

struct DefeatReport {
  int bound = 0;
  std::vector<CandidateVerdict> entries;
};

namespace detail {

struct LimitAtBound {
  std::vector<Vertex> path[2];
  CandidateApprox last;
  bool finite[2] = {false, false};
};

/// Replays a candidate over stages [0, bound) of the coloring. A position
/// belongs to the limit when it is defined at the last stage and constant
/// over the last quarter; the path is finite at the bound when nothing past
/// its limit prefix was defined during the last quarter.
inline LimitAtBound limit_at_bound(const CandidateDecomposer& cand, const Coloring& c, int bound) {
  auto fn = cand.make();
  StageColor at = [&c](Vertex a, Vertex b) { return c.at(a, b); };
  std::array<StabilityTracker, 2> tr;
  const int q = bound - bound / 4;
  CandidateApprox last;
  std::array<std::vector<int>, 2> last_defined;  // last stage each position was defined
  for (int s = 0; s < bound; ++s) {
    last = fn(s, at);
    for (int z = 0; z < 2; ++z) {
      tr[z].update(last.path(z), s);
      auto& ld = last_defined[z];
      if (ld.size() < last.path(z).size()) ld.resize(last.path(z).size(), -1);
      for (std::size_t x = 0; x < last.path(z).size(); ++x) ld[x] = s;
    }
  }
  LimitAtBound out;
  for (int z = 0; z < 2; ++z) {
    const auto& P = last.path(z);
    std::size_t len = 0;
    while (len < P.size() && tr[z].since_at(static_cast<int>(len)) <= q) ++len;
    out.path[z].assign(P.begin(), P.begin() + static_cast<std::ptrdiff_t>(len));
    bool fin = true;
    for (std::size_t x = len; x < last_defined[z].size(); ++x)
      if (last_defined[z][x] >= q) fin = false;
    out.finite[z] = fin;
  }
  out.last = std::move(last);
  return out;
}

}  // namespace detail

/// Classifies each candidate by its limit at the bound against the built
/// coloring. Candidates not named in the build get no trap evidence.
inline DefeatReport verify_defeat(const DiagonalBuild& build, const std::vector<CandidateDecomposer>& cands,
                                  int jobs = 0) {
  const Coloring& c = build.coloring;
  const int bound = build.stages;
  const int q = bound - bound / 4;
  DefeatReport rep;
  rep.bound = bound;
  rep.entries.resize(cands.size());

  auto classify = [&](std::size_t idx) {
    const auto& cand = cands[idx];
    CandidateVerdict v;
    v.id = cand.id;
    int bi = -1;
    for (std::size_t i = 0; i < build.candidate_ids.size(); ++i)
      if (build.candidate_ids[i] == cand.id) bi = static_cast<int>(i);
    v.in_build = bi >= 0;
    auto lim = detail::limit_at_bound(cand, c, bound);
    v.limit_blue = lim.path[0];
    v.limit_red = lim.path[1];
    v.finite_at_bound[0] = lim.finite[0];
    v.finite_at_bound[1] = lim.finite[1];

    std::vector<int> seen(c.n(), 0);
    for (int z = 0; z < 2; ++z) {
      const auto& P = lim.path[z];
      for (std::size_t x = 0; x < P.size(); ++x) {
        if (seen[P[x]]++ && !v.overlap) v.overlap = P[x];
        if (x > 0 && c.at(P[x - 1], P[x]) != Color{z} && !v.bad_edge)
          v.bad_edge = std::make_pair(z, static_cast<int>(x));
      }
    }
    // traps held unchanged over the last quarter
    if (bi >= 0)
      for (int z = 0; z < 2; ++z) {
        std::optional<Trap> tp;
        bool stable = true;
        for (int s = q; s < bound && stable; ++s) {
          const LevelChoice* lc = nullptr;
          for (const auto& l : build.log[s])
            if (l.candidate == bi && l.z == z) lc = &l;
          if (!lc) {
            stable = false;
            break;
          }
          if (!tp)
            tp = Trap{lc->level, lc->lo, lc->hi, lc->k, s};
          else if (tp->level != lc->level || tp->lo != lc->lo || tp->hi != lc->hi || tp->k != lc->k)
            stable = false;
        }
        if (!stable || !tp) continue;
        // the coloring separates (lo, hi] from everything colored later
        bool colored = true;
        for (long long x = tp->lo + 1; x <= tp->hi && colored; ++x)
          for (Vertex y = tp->since + 1; y < c.n() && colored; ++y)
            if (y > tp->hi && c.at(static_cast<Vertex>(x), y) != Color{1 - z}) colored = false;
        if (colored) v.trap[z] = tp;
      }
    long long s_top = -1;
    for (int z = 0; z < 2; ++z)
      if (v.trap[z]) s_top = std::max(s_top, v.trap[z]->hi);
    for (Vertex x = 0; x <= s_top && x < c.n(); ++x)
      if (!seen[x]) {
        v.gap = x;
        break;
      }
    const bool fin[2] = {v.trap[0].has_value() || lim.finite[0], v.trap[1].has_value() || lim.finite[1]};
    bool settled = true;
    for (Vertex x = 0; x <= q && settled; ++x) settled = seen[x] > 0;
    DecompState d = DecompState::two(lim.last.blue, lim.last.red);
    std::ostringstream ev;
    if (settled && validate_decomposition(c, d, bound).ok()) {
      v.verdict = DefeatVerdict::NotDefeated;
      ev << "final approximation decomposes [0," << bound << ") and the limit covers [0," << q << "]";
      if (!v.in_build) ev << "; candidate was not among those the coloring was built against";
    } else if (fin[0] && fin[1]) {
      const bool blue_first = v.trap[0] && (!v.trap[1] || v.trap[0]->level <= v.trap[1]->level);
      const int z = blue_first || !v.trap[1] ? 0 : 1;
      v.verdict = z == 0 ? DefeatVerdict::BlueFinite : DefeatVerdict::RedFinite;
      for (int w : {z, 1 - z}) {
        ev << (w == 0 ? "blue" : "red") << ": ";
        if (v.trap[w])
          ev << "trapped at level " << v.trap[w]->level << " in (" << v.trap[w]->lo << "," << v.trap[w]->hi
             << "] from stage " << v.trap[w]->since << ", k=" << v.trap[w]->k;
        else
          ev << "finite at bound, length " << lim.path[w].size();
        ev << "; ";
      }
    } else if (v.gap) {
      v.verdict = DefeatVerdict::CoverageGap;
      ev << "vertex " << *v.gap << " on neither limit path";
    } else if (v.bad_edge) {
      v.verdict = DefeatVerdict::BadEdge;
      ev << (v.bad_edge->first == 0 ? "blue" : "red") << " edge at position " << v.bad_edge->second;
    } else if (v.overlap) {
      v.verdict = DefeatVerdict::Overlap;
      ev << "vertex " << *v.overlap << " placed twice";
    } else {
      v.verdict = DefeatVerdict::Undecided;
      ev << "no certificate at bound " << bound;
    }
    // a trapped path that is a disjoint monochromatic path stays inside its trap
    for (int z = 0; z < 2; ++z) {
      if (!v.trap[z]) continue;
      const auto& P = lim.path[z];
      bool mono = validate_path(c, Path{Color{z}, P});
      for (auto x : P) mono = mono && seen[x] == 1;
      if (!mono) continue;
      for (std::size_t x = v.trap[z]->k + 1; x < P.size(); ++x)
        if (P[x] <= v.trap[z]->lo || P[x] > v.trap[z]->hi) {
          v.verdict = DefeatVerdict::Undecided;
          ev << "; trap escaped at position " << x;
          break;
        }
    }
    v.evidence = ev.str();
    rep.entries[idx] = std::move(v);
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(cands.size(), jobs > 0 ? jobs : hw);
  if (workers <= 1) {
    for (std::size_t i = 0; i < cands.size(); ++i) classify(i);
  } else {
    std::vector<std::future<void>> fs;
    std::atomic<std::size_t> next{0};
    for (std::size_t w = 0; w < workers; ++w)
      fs.push_back(std::async(std::launch::async, [&] {
        for (std::size_t i; (i = next++) < cands.size();) classify(i);
      }));
    for (auto& f : fs) f.get();
  }
  return rep;
}

}  // namespace rado
