#include <gtest/gtest.h>

#include <random>

#include "rado/adversary.hpp"
#include "rado/solver.hpp"

using namespace rado;

namespace {

ToyHaltingOracle machines(int m, std::vector<std::pair<int, int>> halts) {
  ToyHaltingOracle o;
  o.halts_at.assign(m, std::nullopt);
  for (auto [e, h] : halts) o.halts_at[e] = h;
  return o;
}

// Direct stagewise simulation on a dense matrix, written from the
// construction rules without the library's bookkeeping.
struct Sim {
  std::vector<std::vector<int>> col;  // col[x][y], x < y
  std::vector<std::vector<long long>> marker;  // per stage
};

Sim simulate(const ToyHaltingOracle& o, int S) {
  const int M = o.size();
  Sim out;
  out.col.assign(S + 1, std::vector<int>(S + 1, -1));
  std::vector<int> def(4 * S + 64, 0);
  std::vector<long long> m(M, -1);
  long long big = 0;
  out.marker.push_back(m);
  for (int s = 1; s <= S; ++s) {
    if (s > big) big = s;
    for (int e = 0; e < M; ++e)
      if (m[e] == -1) {
        m[e] = 2 * (big + 1) + 2;
        big = m[e];
        break;
      }
    for (int e = 0; e < M && e < s; ++e)
      if (o.halts_at[e] == s && m[e] != -1) {
        for (long long x = m[e]; x <= s + 1; ++x) def[x] = 1;
        if (s + 1 > big) big = s + 1;
        for (int i = e + 1; i < M; ++i) m[i] = -1;
      }
    out.marker.push_back(m);
    for (int x = 0; x < s; ++x) out.col[x][s] = def[x];
  }
  return out;
}

int max_marker(const HaltingBuild& b) {
  long long mx = 0;
  for (int e = 0; e < b.oracle.size(); ++e) mx = std::max(mx, b.markers.final_value(e).value_or(0));
  return static_cast<int>(mx);
}

}  // namespace

TEST(Halting, FirstMarkersWithoutHalts) {
  auto b = halting_coloring_build(machines(3, {}), 10);
  // stage 1: k = 2, m = 6; stage 2: k = 7, m = 16; stage 3: k = 17, m = 36
  EXPECT_EQ(b.markers.at(0, 1), 6);
  EXPECT_EQ(b.markers.at(1, 1), std::nullopt);
  EXPECT_EQ(b.markers.at(1, 2), 16);
  EXPECT_EQ(b.markers.at(2, 3), 36);
  EXPECT_TRUE(b.flips.empty());
}

TEST(Halting, MatchesDirectSimulation) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const int M = 1 + static_cast<int>(rng() % 6);
    ToyHaltingOracle o;
    for (int e = 0; e < M; ++e)
      o.halts_at.push_back(rng() % 2 ? std::optional<int>(1 + static_cast<int>(rng() % 15)) : std::nullopt);
    const int S = halting_min_stages(o) + static_cast<int>(rng() % 20);
    auto b = halting_coloring_build(o, S);
    auto sim = simulate(o, S);
    for (int x = 0; x <= S; ++x)
      for (int y = x + 1; y <= S; ++y) ASSERT_EQ(b.coloring.at(x, y).index, sim.col[x][y]) << x << "," << y;
    for (int s = 0; s <= S; ++s)
      for (int e = 0; e < M; ++e) ASSERT_EQ(b.markers.at(e, s).value_or(-1), sim.marker[s][e]);
  }
}

TEST(Halting, ExtensionAgreesWithStream) {
  auto b = halting_coloring_build(machines(4, {{0, 5}, {1, 7}, {3, 9}}), 40);
  auto ext = b.extended(41);
  for (int x = 0; x <= 40; ++x)
    for (int y = x + 1; y <= 40; ++y) ASSERT_EQ(ext.at(x, y), b.coloring.at(x, y));
  EXPECT_EQ(b.flip_stage_of(6), 5);
}

TEST(Halting, ProtectedIntervalsStayBlue) {
  auto b = halting_coloring_build(machines(5, {{0, 5}, {2, 9}, {4, 14}}), 40);
  const int N = max_marker(b) + 40;
  auto c = b.extended(N);
  auto iv = b.protected_intervals();
  ASSERT_EQ(iv.size(), 5u);
  for (auto [k, h] : iv)
    for (long long x = k; x <= h; ++x)
      for (Vertex y = static_cast<Vertex>(x) + 1; y < N; ++y)
        ASSERT_EQ(c.at(static_cast<Vertex>(x), y), kBlue) << x << "," << y;
}

TEST(Halting, RoundTripRecoversMembership) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    const int M = 2 + static_cast<int>(rng() % 5);
    ToyHaltingOracle o;
    for (int e = 0; e < M; ++e)
      o.halts_at.push_back(rng() % 2 ? std::optional<int>(1 + static_cast<int>(rng() % 12)) : std::nullopt);
    auto b = halting_coloring_build(o, halting_min_stages(o) + 3);
    const int N = max_marker(b) + 32;
    auto d = intended_decomposition(b, N);
    auto r = decode(d, b, N);
    for (int e = 0; e < M; ++e) {
      EXPECT_EQ(r.markers[e], *b.markers.final_value(e));
      EXPECT_EQ(r.member[e], o.halts_at[e].has_value()) << "trial " << trial << " e " << e;
    }
  }
}

TEST(Halting, DecodeWorksOnOtherDecompositions) {
  // all BLUE run but with a RED singleton: decoding must not rely on the
  // intended shape
  auto b = halting_coloring_build(machines(3, {{1, 4}}), 20);
  const int N = max_marker(b) + 10;
  auto d = intended_decomposition(b, N);
  ASSERT_TRUE(d.red().vertices.empty());
  auto& bl = d.paths[0].vertices;
  const Vertex moved = bl[3];
  bl.erase(bl.begin() + 3);
  d.paths[1].vertices.push_back(moved);
  auto r = decode(d, b, N);
  EXPECT_FALSE(r.member[0]);
  EXPECT_TRUE(r.member[1]);
  EXPECT_FALSE(r.member[2]);
  EXPECT_TRUE(decode_membership(d, b, N, 1));
}

TEST(Halting, NoActionWhenHaltingTimeIsSmall) {
  // h_0 = 0 and h_1 = 1 are never acted on; membership still decodes
  auto b = halting_coloring_build(machines(2, {{0, 0}, {1, 1}}), 10);
  EXPECT_TRUE(b.flips.empty());
  const int N = max_marker(b) + 8;
  auto r = decode(intended_decomposition(b, N), b, N);
  EXPECT_TRUE(r.member[0]);
  EXPECT_TRUE(r.member[1]);
}

TEST(Halting, Refusals) {
  auto o = machines(3, {{0, 6}});
  EXPECT_THROW(halting_coloring_build(o, halting_min_stages(o) - 1), PreconditionError);
  auto b = halting_coloring_build(o, halting_min_stages(o));
  ASSERT_EQ(b.flip_stage_of(7), 6);
  EXPECT_THROW(intended_decomposition(b, 8), PreconditionError);
  const int N = max_marker(b) + 10;
  auto d = intended_decomposition(b, N);
  auto broken = d;
  std::swap(broken.paths[0].vertices, broken.paths[1].vertices);
  EXPECT_THROW(decode(broken, b, N), PreconditionError);
  EXPECT_THROW(decode_membership(d, b, N, 3), std::out_of_range);
}

TEST(Halting, IntervalForcingWithAFlip) {
  // machine 0 halts at 5 and flips vertex 6; every decomposition of the
  // prefix [0, 20) has a BLUE path meeting [2, 5]
  auto b = halting_coloring_build(machines(2, {{0, 5}}), 20);
  ASSERT_EQ(b.flip_stage_of(6), 5);
  auto c = b.extended(20);
  ExactSolver es(c);
  auto sets = es.all_blue_sets();
  ASSERT_FALSE(sets.empty());
  for (auto S : sets) EXPECT_NE(S & 0b111100u, 0u) << S;
  // and some decomposition does put 6 on RED
  bool red6 = false;
  for (auto S : sets) red6 |= !(S >> 6 & 1);
  EXPECT_TRUE(red6);
}

TEST(Halting, InterpreterHook) {
  auto o = ToyHaltingOracle::from_interpreter(4, 10, [](int e, int budget) -> std::optional<int> {
    const int steps = 3 * e + 1;  // machine e runs 3e + 1 steps
    if (steps <= budget) return steps;
    return std::nullopt;
  });
  EXPECT_EQ(o.halts_at[0], 1);
  EXPECT_EQ(o.halts_at[3], 10);
  EXPECT_TRUE(o.halted_by(2, 7));
  EXPECT_FALSE(o.halted_by(2, 6));
}

// ---------------------------------------------------------------------------

TEST(Diagonal, ReferenceCandidatesAreDefeated) {
  const std::vector<CandidateDecomposer> refs = {constant_blue_candidate(), gg_replay_candidate(),
                                                 alternating_candidate()};
  std::vector<std::vector<CandidateDecomposer>> sets = {{refs[0]}, {refs[1]}, {refs[2]}, {refs[0], refs[1]}};
  for (const auto& w : sets) {
    auto b = diagonal_build(w, 400);
    EXPECT_EQ(check_t_monotone(b), std::nullopt);
    auto rep = verify_defeat(b, w);
    for (const auto& e : rep.entries) EXPECT_TRUE(e.defeated()) << e.id << ": " << e.evidence;
  }
}

TEST(Diagonal, LogMatchesColoring) {
  auto b = diagonal_build({constant_blue_candidate(), alternating_candidate(), empty_candidate()}, 200);
  for (int s = 0; s < b.stages; ++s) {
    long long covered = -1;
    for (const auto& l : b.log[s]) {
      EXPECT_EQ(l.lo, covered);
      for (long long t = l.lo + 1; t <= l.hi; ++t)
        ASSERT_EQ(b.coloring.at(static_cast<Vertex>(t), s + 1).index, 1 - l.z) << s << " " << t;
      covered = std::max(covered, l.hi);
    }
    for (long long t = covered + 1; t <= s; ++t) ASSERT_EQ(b.coloring.at(static_cast<Vertex>(t), s + 1), kBlue);
  }
}

TEST(Diagonal, FixedValidDecompositionOfTheColoringIsNotDefeated) {
  // A candidate outside the build that reports a valid decomposition of the
  // built coloring gets a not-defeated verdict.
  auto b = diagonal_build({constant_blue_candidate()}, 60);
  auto d = gg_decompose(b.coloring);
  auto fixed = fixed_candidate("fixed", d.blue().vertices, d.red().vertices);
  auto rep = verify_defeat(b, {fixed});
  EXPECT_FALSE(rep.entries[0].in_build);
  EXPECT_EQ(rep.entries[0].verdict, DefeatVerdict::NotDefeated) << rep.entries[0].evidence;
}

TEST(Diagonal, ParallelMatchesSerial) {
  std::vector<CandidateDecomposer> w = {constant_blue_candidate(), gg_replay_candidate(), alternating_candidate(),
                                        empty_candidate()};
  auto b = diagonal_build(w, 300);
  auto a = verify_defeat(b, w, 1);
  auto p = verify_defeat(b, w, 4);
  ASSERT_EQ(a.entries.size(), p.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    EXPECT_EQ(a.entries[i].verdict, p.entries[i].verdict);
    EXPECT_EQ(a.entries[i].evidence, p.entries[i].evidence);
  }
}

TEST(Diagonal, Refusals) {
  EXPECT_THROW(diagonal_build({}, 10), PreconditionError);
  EXPECT_THROW(diagonal_build({constant_blue_candidate()}, 0), PreconditionError);
  CandidateDecomposer cheat{"cheat", "custom", 0, [] {
                              return ApproxFn([](int s, const StageColor&) {
                                return CandidateApprox{{static_cast<Vertex>(s + 1)}, {}};
                              });
                            }};
  EXPECT_THROW(diagonal_build({cheat}, 5), PreconditionError);
}

TEST(Diagonal, LateArrivalClampsStability) {
  auto late = constant_blue_candidate("late");
  late.arrives_at = 50;
  auto b = diagonal_build({late}, 120);
  for (int s = 0; s < 50; ++s) EXPECT_TRUE(b.log[s].empty());
  for (int s = 50; s < 120; ++s) {
    ASSERT_FALSE(b.log[s].empty());
    EXPECT_GE(b.log[s][0].t, 50);
  }
  EXPECT_EQ(check_t_monotone(b), std::nullopt);
}

TEST(Diagonal, MonotoneCheckCatchesDecrease) {
  DiagonalBuild b;
  b.stages = 2;
  b.log = {{LevelChoice{0, 0, 0, 5, -1, 5, 0, 0}}, {LevelChoice{0, 0, 0, 3, -1, 3, 0, 0}}};
  EXPECT_TRUE(check_t_monotone(b).has_value());
  b.log = {{LevelChoice{0, 0, 0, 0, -1, 0, 0, 0}}, {}, {LevelChoice{0, 0, 0, 1, -1, 1, 0, 0}}};
  EXPECT_TRUE(check_t_monotone(b).has_value());
}
