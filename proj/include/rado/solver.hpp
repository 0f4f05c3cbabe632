#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "rado/coloring.hpp"
#include "rado/paths.hpp"
#include "rado/types.hpp"

namespace rado {

/// Inserts 0, 1, ..., n-1 in order with insert_vertex.
inline DecompState gg_decompose(const Coloring& c, Trace* trace = nullptr) {
  if (c.r() != 2) throw std::domain_error("gg_decompose needs a two coloring");
  DecompState s = DecompState::empty(2);
  if (trace) *trace = Trace(s);
  for (Vertex v = 0; v < c.n(); ++v) {
    auto [next, step] = insert_vertex(c, s, v);
    s = std::move(next);
    if (trace) trace->push(step, s);
  }
  return s;
}

struct SolverBudget {
  int max_n = 22;
  double max_work = 5e8;
};

/// Exact decomposition search by dynamic programming over vertex subsets.
/// ends[z][S] is the set of vertices v such that S has a Hamiltonian path
/// of color z ending at v; a decomposition exists iff [n] splits into sets
/// S_0, ..., S_{r-1} with S_z empty or ends[z][S_z] nonzero.
class ExactSolver {
 public:
  explicit ExactSolver(const Coloring& c, SolverBudget budget = {}) : c_(c), n_(c.n()), r_(c.r()) {
    const double est = estimate_work(n_, r_);
    if (n_ > budget.max_n || est > budget.max_work)
      throw BudgetExceeded("exact search over n=" + std::to_string(n_) + ", r=" +
                               std::to_string(r_) + " exceeds budget",
                           est);
    full_ = n_ == 32 ? ~0u : ((1u << n_) - 1);
    adj_.assign(r_, std::vector<std::uint32_t>(n_, 0));
    for (Vertex x = 0; x < n_; ++x)
      for (Vertex y = 0; y < n_; ++y)
        if (x != y) adj_[c.at(x, y).index][x] |= 1u << y;
    ends_.assign(r_, std::vector<std::uint32_t>(std::size_t{1} << n_, 0));
    for (int z = 0; z < r_; ++z) fill_ends(z);
  }

  static double estimate_work(int n, int r) {
    double w = r * std::ldexp(1.0, n) * n;
    if (r > 2) w += (r - 2) * std::pow(3.0, n);
    return w;
  }

  bool coverable(int z, std::uint32_t set) const { return set == 0 || ends_[z][set] != 0; }

  std::optional<DecompState> solve() const {
    if (r_ == 1) {
      if (!coverable(0, full_)) return std::nullopt;
      DecompState s = DecompState::empty(1);
      s.paths[0] = path_of(0, full_);
      return s;
    }
    // can[k][S]: S splits into coverable sets of colors 0..k.
    std::vector<std::vector<char>> can(r_ - 1);
    const std::size_t size = std::size_t{1} << n_;
    can[0].assign(size, 0);
    for (std::size_t s = 0; s < size; ++s) can[0][s] = coverable(0, static_cast<std::uint32_t>(s));
    for (int k = 1; k < r_ - 1; ++k) {
      can[k].assign(size, 0);
      for (std::size_t s = 0; s < size; ++s) {
        const auto S = static_cast<std::uint32_t>(s);
        for (std::uint32_t t = S;; t = (t - 1) & S) {
          if (coverable(k, t) && can[k - 1][S & ~t]) {
            can[k][s] = 1;
            break;
          }
          if (t == 0) break;
        }
      }
    }
    // Last color: pick T for color r-1, then unwind.
    std::vector<std::uint32_t> parts(r_, 0);
    std::uint32_t rest = full_;
    for (int k = r_ - 1; k >= 1; --k) {
      bool found = false;
      for (std::uint32_t t = rest;; t = (t - 1) & rest) {
        if (coverable(k, t) && can[k - 1][rest & ~t]) {
          parts[k] = t;
          rest &= ~t;
          found = true;
          break;
        }
        if (t == 0) break;
      }
      if (!found) return std::nullopt;
    }
    parts[0] = rest;
    DecompState s = DecompState::empty(r_);
    for (int z = 0; z < r_; ++z) s.paths[z] = path_of(z, parts[z]);
    return s;
  }

  /// For two colorings: every BLUE vertex set of some decomposition.
  std::vector<std::uint32_t> all_blue_sets() const {
    if (r_ != 2) throw std::domain_error("all_blue_sets needs a two coloring");
    std::vector<std::uint32_t> out;
    for (std::uint64_t s = 0; s <= full_; ++s) {
      const auto S = static_cast<std::uint32_t>(s);
      if (coverable(0, S) && coverable(1, full_ & ~S)) out.push_back(S);
    }
    return out;
  }

  /// A color-z Hamiltonian path of the set, starting at its least possible
  /// endpoint and greedily taking least successors.
  Path path_of(int z, std::uint32_t set) const {
    Path p{Color{z}, {}};
    if (set == 0) return p;
    std::uint32_t cand = ends_[z][set];
    if (!cand) throw PreconditionError("set is not coverable by one path");
    Vertex v = std::countr_zero(cand);
    std::uint32_t rest = set;
    while (true) {
      p.vertices.push_back(v);
      rest &= ~(1u << v);
      if (!rest) break;
      const std::uint32_t next = ends_[z][rest] & adj_[z][v];
      v = std::countr_zero(next);
    }
    return p;
  }

 private:
  void fill_ends(int z) {
    auto& e = ends_[z];
    const auto& adj = adj_[z];
    const std::size_t size = std::size_t{1} << n_;
    for (std::size_t s = 1; s < size; ++s) {
      const auto S = static_cast<std::uint32_t>(s);
      if ((S & (S - 1)) == 0) {
        e[s] = S;
        continue;
      }
      std::uint32_t out = 0;
      for (std::uint32_t rem = S; rem; rem &= rem - 1) {
        const int v = std::countr_zero(rem);
        const std::uint32_t without = S & ~(1u << v);
        if (e[without] & adj[v]) out |= 1u << v;
      }
      e[s] = out;
    }
  }

  Coloring c_;
  int n_, r_;
  std::uint32_t full_ = 0;
  std::vector<std::vector<std::uint32_t>> adj_;
  std::vector<std::vector<std::uint32_t>> ends_;
};

/// A decomposition of [n] into r monochromatic paths if one exists;
/// exhaustive, so nullopt means none exists.
inline std::optional<DecompState> brute_force_decompose(const Coloring& c, SolverBudget budget = {}) {
  if (c.n() == 0) return DecompState::empty(c.r());
  return ExactSolver(c, budget).solve();
}

// ---------------------------------------------------------------------------
// Counterexample hunt

enum class HuntMode { Exhaustive, Random };

struct HuntConfig {
  int r = 3;
  int n = 5;
  HuntMode mode = HuntMode::Exhaustive;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 0;
  int jobs = 1;
  double enumeration_budget = 1 << 24;
  SolverBudget solver;
};

struct HuntReport {
  int n = 0;
  int r = 0;
  HuntMode mode = HuntMode::Exhaustive;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  std::uint64_t examined = 0;
  bool incomplete = false;
  std::string note;
  std::vector<Coloring> counterexamples;
};

/// Seed of the t-th random trial; independent of how trials are split.
inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t t) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (t + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline HuntReport hunt_counterexamples(const HuntConfig& cfg) {
  if (cfg.r < 2) throw std::domain_error("hunt needs r >= 2");
  if (cfg.n < 2) throw std::domain_error("hunt needs n >= 2");
  HuntReport rep;
  rep.n = cfg.n;
  rep.r = cfg.r;
  rep.mode = cfg.mode;
  rep.seed = cfg.seed;

  std::uint64_t total;
  if (cfg.mode == HuntMode::Exhaustive) {
    const double count = ColoringEnumerator::count(cfg.n, cfg.r);
    if (count > cfg.enumeration_budget) {
      total = static_cast<std::uint64_t>(cfg.enumeration_budget);
      rep.incomplete = true;
      rep.note = "enumeration truncated at budget; full count " + std::to_string(count);
    } else {
      total = static_cast<std::uint64_t>(count);
    }
  } else {
    total = cfg.trials;
  }
  rep.trials = total;

  const int jobs = std::max(1, cfg.jobs);
  std::vector<std::vector<std::pair<std::uint64_t, Coloring>>> hits(jobs);
  std::atomic<std::uint64_t> examined{0};
  std::atomic<bool> budget_hit{false};

  auto make = [&](std::uint64_t i) {
    return cfg.mode == HuntMode::Exhaustive ? ColoringEnumerator::at_rank(cfg.n, cfg.r, i)
                                            : gen_random(cfg.n, cfg.r, trial_seed(cfg.seed, i));
  };
  auto worker = [&](int j) {
    const std::uint64_t lo = total * j / jobs, hi = total * (j + 1) / jobs;
    for (std::uint64_t i = lo; i < hi; ++i) {
      Coloring c = make(i);
      try {
        if (!brute_force_decompose(c, cfg.solver)) hits[j].emplace_back(i, std::move(c));
      } catch (const BudgetExceeded&) {
        budget_hit = true;
        return;
      }
      ++examined;
    }
  };
  if (jobs == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker, j);
    for (auto& t : pool) t.join();
  }
  rep.examined = examined;
  if (budget_hit) {
    rep.incomplete = true;
    rep.note = "solver budget exceeded";
  }
  // Merge in index order and re-verify each hit with a fresh solver run.
  std::vector<std::pair<std::uint64_t, Coloring>> merged;
  for (auto& h : hits)
    for (auto& e : h) merged.push_back(std::move(e));
  std::sort(merged.begin(), merged.end(), [](auto& a, auto& b) { return a.first < b.first; });
  for (auto& [i, c] : merged)
    if (!brute_force_decompose(make(i), cfg.solver)) rep.counterexamples.push_back(std::move(c));
  return rep;
}

}  // namespace rado
