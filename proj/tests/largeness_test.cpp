#include <gtest/gtest.h>

#include <functional>

#include "rado/largeness.hpp"

using namespace rado;

namespace {

Coloring stable_constant(int n, Color limit) {
  StablePresentation p;
  p.limits.assign(n, limit);
  p.thresholds.assign(n, 0);
  return Coloring::stable(n, 2, std::move(p));
}

// Independent 4-clique search.
bool has_homogeneous(const Coloring& c, int k) {
  std::vector<Vertex> cur;
  std::function<bool(Vertex, int)> go = [&](Vertex from, int col) -> bool {
    if (static_cast<int>(cur.size()) == k) return true;
    for (Vertex v = from; v < c.n(); ++v) {
      bool ok = true;
      for (auto h : cur) ok = ok && c.at(h, v).index == col;
      if (!ok) continue;
      cur.push_back(v);
      if (go(v + 1, col)) return true;
      cur.pop_back();
    }
    return false;
  };
  for (int col = 0; col < c.r(); ++col)
    if (go(0, col)) return true;
  return false;
}

bool homogeneous(const Coloring& c, const std::vector<Vertex>& h, Color col) {
  for (std::size_t a = 0; a < h.size(); ++a)
    for (std::size_t b = a + 1; b < h.size(); ++b)
      if (c.at(h[a], h[b]) != col) return false;
  return true;
}

}  // namespace

TEST(Cofinite, LimitNeighborhoodIsTheLargeOne) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const int n = 40;
    auto c = gen_stable_random(n, 3, seed, 10);
    auto L = cofinite_oracle(c);
    for (Vertex m = 0; m + 1 < n; ++m) {
      // thresholds are below n, so the last pair shows the limit color
      const Color lim = c.at(m, n - 1);
      for (int j = 0; j < 3; ++j)
        EXPECT_EQ(L.is_large(neighbors_of_color(c, m, Color{j}).set), Color{j} == lim);
    }
    EXPECT_FALSE(L.is_large(VertexSet{}));
    EXPECT_FALSE(L.is_large(range_set(n)));  // finite, no tail
  }
}

TEST(Cofinite, Refusals) {
  EXPECT_THROW(cofinite_oracle(gen_random(6, 2, 0)), std::domain_error);
  StablePresentation p;
  p.limits.assign(5, kBlue);
  p.thresholds = {0, 0, 5, 0, 0};
  EXPECT_THROW(cofinite_oracle(Coloring::stable(5, 2, p)), std::domain_error);
}

TEST(Cofinite, AxiomsHold) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int r = 1 + static_cast<int>(seed % 5);
    auto c = gen_stable_random(60, r, seed, 10);
    auto rep = check_axioms(c, cofinite_oracle(c), 60, all_vertices(60));
    EXPECT_TRUE(rep.ok()) << seed;
    EXPECT_EQ(rep.partitions, 60u);
    EXPECT_EQ(rep.intersections, 60u * 59 / 2);
  }
}

TEST(Axioms, CheckerCatchesViolations) {
  auto c = gen_random(8, 2, 1);
  auto contains0 = custom_oracle([](const VertexSet& x) { return x.contains(0); }, "contains 0", 2);
  auto rep = check_axioms(c, contains0, 8, {0});
  ASSERT_EQ(rep.violations.size(), 2u);
  EXPECT_EQ(rep.violations[0].axiom, "exactly-one");
  EXPECT_EQ(rep.violations[1].axiom, "finite");  // {0} is large
  auto everything = custom_oracle([](const VertexSet&) { return true; }, "everything");
  auto rep2 = check_axioms(c, everything, 8, {3});
  EXPECT_FALSE(rep2.ok());
}

TEST(Cohesive, AllBlueTakesEveryVertex) {
  auto c = Coloring::constant(10, 2, kBlue);
  auto st = cohesive_build(c, 10);
  EXPECT_EQ(st.C, all_vertices(10));
  EXPECT_TRUE(st.R.empty());
  auto L = cohesive_oracle(st);
  for (Vertex m = 0; m < 10; ++m) {
    // C \ N(m, BLUE) = {m}
    EXPECT_TRUE(L.is_large(neighbors_of_color(c, m, kBlue).set));
    EXPECT_FALSE(L.is_large(neighbors_of_color(c, m, kRed).set));
  }
  EXPECT_TRUE(check_axioms(c, L, 10, all_vertices(10)).ok());
}

// After stage (m, i), every later element of C lies on the recorded side.
TEST(Cohesive, TailsLieOnOneSide) {
  for (int r = 2; r <= 3; ++r)
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      auto c = gen_random(20, r, seed);
      auto st = cohesive_build(c, 20);
      ASSERT_EQ(st.C.size(), st.processed.size());
      for (std::size_t s = 0; s < st.processed.size(); ++s) {
        const auto& p = st.processed[s];
        ASSERT_EQ(p.extracted, st.C[s]);
        for (std::size_t t = s + 1; t < st.C.size(); ++t) {
          const Vertex v = st.C[t];
          ASSERT_NE(v, p.m);
          ASSERT_EQ(c.at(p.m, v) == p.i, p.inside) << seed << " stage " << s;
        }
        for (auto v : st.R) ASSERT_EQ(c.at(p.m, v) == p.i, p.inside);
      }
      for (auto v : st.R) ASSERT_EQ(std::find(st.C.begin(), st.C.end(), v), st.C.end());
      ASSERT_TRUE(std::is_sorted(st.C.begin(), st.C.end()));
    }
}

TEST(Cohesive, TwelveVerticesGiveAtLeastFour) {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    auto st = cohesive_build(gen_random(12, 2, seed), 12);
    ASSERT_GE(st.C.size(), 4u) << seed;
    ASSERT_GE(st.processed.size(), 4u);
  }
}

// With slack covering the elements extracted up to a processed stage, the
// partition at that stage has exactly one large part.
TEST(Cohesive, ProcessedPartitionsHaveOneLargePart) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto c = gen_random(16, 2, seed);
    auto st = cohesive_build(c, 16);
    for (std::size_t s = 0; s < st.processed.size(); ++s) {
      if (st.C.size() - s - 1 <= s + 1) break;  // tail no longer than the slack
      auto L = cohesive_oracle(st, static_cast<int>(s + 1));
      auto large = large_neighbor_colors(c, L, st.processed[s].m, 16);
      ASSERT_EQ(large.size(), 1u) << seed << " stage " << s;
    }
  }
}

TEST(Ultra, AllBlueStable) {
  auto c = stable_constant(10, kBlue);
  auto run = ultra_decompose(c, cofinite_oracle(c), 10);
  ASSERT_TRUE(run.trace.completed());
  EXPECT_EQ(run.state(), DecompState::two({0, 2, 1, 4, 3, 6, 5, 8, 7, 9}, {}));
  EXPECT_EQ(run.direct, (std::vector<Vertex>{9}));
  EXPECT_TRUE(validate_decomposition(c, run.state()).ok());
  for (Vertex s : {0, 1, 3, 5, 7, 9}) EXPECT_EQ(run.stage_color[s], kBlue);
  for (Vertex v : {2, 4, 6, 8}) EXPECT_FALSE(run.stage_color[v]);
}

TEST(Ultra, AllRedStable) {
  auto c = stable_constant(9, kRed);
  auto run = stable_decompose(c);
  ASSERT_TRUE(run.trace.completed());
  EXPECT_TRUE(run.state().blue().empty());
  EXPECT_EQ(run.state().red().size(), 9u);
  EXPECT_TRUE(validate_decomposition(c, run.state()).ok());
}

TEST(Ultra, ViolationReportsPartition) {
  auto c = gen_random(6, 2, 3);
  auto contains0 = custom_oracle([](const VertexSet& x) { return x.contains(0); }, "contains 0");
  try {
    ultra_decompose(c, contains0, 6);
    FAIL() << "expected a violation";
  } catch (const OracleViolation& e) {
    EXPECT_EQ(e.vertex(), 0);
    EXPECT_TRUE(e.large_parts().empty());
  }
}

TEST(Ultra, CohesiveOracleOnAllBlue) {
  auto c = Coloring::constant(12, 2, kBlue);
  auto run = ultra_decompose(c, cohesive_oracle(cohesive_build(c, 12)), 12);
  ASSERT_TRUE(run.trace.completed());
  EXPECT_TRUE(validate_decomposition(c, run.state()).ok());
}

// Placed stage vertices sit on their oracle color's path; states are valid
// throughout and nothing is ever removed.
TEST(Stable, RandomPresentations) {
  int completed = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const int r = 2 + static_cast<int>(seed % 4);
    auto c = gen_stable_random(60, r, seed, 10);
    auto run = stable_decompose(c);
    ASSERT_FALSE(check_placement_monotone(run.trace));
    ASSERT_TRUE(validate_partial(c, run.state()).ok());
    ASSERT_GE(run.covered_prefix, 30);
    for (Vertex s = 0; s < 60; ++s)
      if (run.stage_color[s]) {
        ASSERT_EQ(run.state().where(s), run.stage_color[s]);
      }
    if (run.trace.completed()) {
      ++completed;
      ASSERT_TRUE(validate_decomposition(c, run.state()).ok());
      ASSERT_EQ(run.covered_prefix, 60);
    }
  }
  RecordProperty("completed", completed);
  EXPECT_GT(completed, 0);
}

TEST(Stable, SmallBlue) {
  auto run = stable_decompose(stable_constant(8, kBlue));
  EXPECT_EQ(run.state().blue().size(), 8u);
  EXPECT_TRUE(run.state().red().empty());
}

TEST(Homogeneous, AllBlue) {
  auto c = Coloring::constant(12, 2, kBlue);
  auto h = homogeneous_set(c, exact_finite_oracle(default_reference(12)), 12, 4);
  ASSERT_TRUE(h.complete);
  EXPECT_EQ(h.set, (std::vector<Vertex>{0, 1, 2, 3}));
  EXPECT_EQ(h.color, kBlue);
}

TEST(Homogeneous, RandomThirty) {
  int complete = 0, partial = 0, violations = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto c = gen_random(30, 2, seed);
    ASSERT_TRUE(has_homogeneous(c, 4));  // R(4,4) = 18
    try {
      auto h = homogeneous_set(c, exact_finite_oracle(default_reference(30)), 30, 4);
      ASSERT_TRUE(homogeneous(c, h.set, h.color));
      ASSERT_TRUE(std::is_sorted(h.set.begin(), h.set.end()));
      (h.complete ? complete : partial)++;
    } catch (const OracleViolation& e) {
      ASSERT_EQ(e.vertex(), -1);
      ASSERT_NE(e.large_parts().size(), 1u);
      ++violations;
    }
  }
  RecordProperty("complete", complete);
  RecordProperty("partial", partial);
  RecordProperty("violations", violations);
  EXPECT_GT(complete, 0);
}

TEST(Generic, AllBlue) {
  auto c = Coloring::constant(10, 2, kBlue);
  auto run = generic_decompose(c, 3);
  EXPECT_TRUE(validate_partial(c, run.trace.final_state()).ok());
  EXPECT_TRUE(run.trace.final_state().red().empty());
  ASSERT_FALSE(run.trace.completed());
  for (Vertex i = 0; i < run.first_unmet; ++i) EXPECT_TRUE(run.trace.final_state().contains(i));
  EXPECT_GE(run.first_unmet, 5);
}

TEST(Generic, SingleColor) {
  auto c = Coloring::constant(12, 1, Color{0});
  auto run = generic_decompose(c, 2);
  EXPECT_EQ(run.trace.final_state().r(), 1);
  EXPECT_TRUE(validate_partial(c, run.trace.final_state()).ok());
  for (Vertex i = 0; i < run.first_unmet; ++i) EXPECT_TRUE(run.trace.final_state().contains(i));
  EXPECT_THROW(generic_decompose(c, 1), PreconditionError);
}

// Conditions: paths valid and disjoint, the reservoir holds no placed vertex
// and lies inside N(e_j, j) for every path end; placements are permanent.
TEST(Generic, ConditionsAlongTheRun) {
  for (int r = 2; r <= 3; ++r)
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      auto c = gen_random(40, r, seed);
      auto run = generic_decompose(c, r + 1);
      ASSERT_FALSE(check_placement_monotone(run.trace));
      for (std::size_t k = 0; k < run.reservoirs.size(); ++k) {
        const auto& s = run.trace.states[run.reservoir_state[k]];
        ASSERT_TRUE(validate_partial(c, s).ok());
        for (auto v : run.reservoirs[k]) {
          ASSERT_FALSE(s.contains(v));
          for (int j = 0; j < r; ++j) {
            if (auto e = s.end(Color{j})) {
              ASSERT_EQ(c.at(*e, v), Color{j});
            }
          }
        }
        if (k > 0) {
          ASSERT_TRUE(std::includes(run.reservoirs[k - 1].begin(), run.reservoirs[k - 1].end(),
                                    run.reservoirs[k].begin(), run.reservoirs[k].end()));
        }
      }
      for (Vertex i = 0; i < run.first_unmet; ++i) ASSERT_TRUE(run.trace.final_state().contains(i));
      ASSERT_EQ(static_cast<int>(run.met.size()), run.first_unmet);
    }
}
