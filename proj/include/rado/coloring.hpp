#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "rado/types.hpp"

namespace rado {

enum class ColoringForm { DenseFinite, Streamed, StablePresented };

inline const char* form_name(ColoringForm f) {
  switch (f) {
    case ColoringForm::DenseFinite: return "dense";
    case ColoringForm::Streamed: return "streamed";
    case ColoringForm::StablePresented: return "stable";
  }
  return "?";
}

/// Position of the pair {x, y} in the flattened upper triangle, pair order
/// (0,1),(0,2),(1,2),(0,3),... The index of a pair does not depend on n, so
/// a prefix of the word is the coloring of a prefix of the vertices.
constexpr std::int64_t pair_index(Vertex x, Vertex y) {
  if (x > y) std::swap(x, y);
  return static_cast<std::int64_t>(y) * (y - 1) / 2 + x;
}

constexpr std::int64_t pair_count(int n) {
  return static_cast<std::int64_t>(n) * (n - 1) / 2;
}

/// Per-vertex limit color and threshold. The pair {x, y} with x < y has
/// color limits[x] once y >= thresholds[x]; below the threshold the color
/// comes from `exceptions`, falling back to `below_threshold` when set.
struct StablePresentation {
  std::vector<Color> limits;
  std::vector<int> thresholds;
  std::map<std::pair<Vertex, Vertex>, Color> exceptions;
  std::optional<Color> below_threshold;
};

/// A symmetric r-coloring of the pairs of [n]. Immutable once built.
class Coloring {
 public:
  Coloring() = default;

  static Coloring dense(int n, int r, std::vector<std::uint8_t> triangle,
                        ColoringForm form = ColoringForm::DenseFinite) {
    check_shape(n, r);
    if (static_cast<std::int64_t>(triangle.size()) != pair_count(n))
      throw std::invalid_argument("triangle has " +
                                  std::to_string(triangle.size()) +
                                  " entries, expected " +
                                  std::to_string(pair_count(n)));
    for (auto v : triangle)
      if (v >= r) throw std::invalid_argument("triangle entry out of color range");
    Coloring c;
    c.n_ = n;
    c.r_ = r;
    c.form_ = form;
    c.triangle_ = std::make_shared<const std::vector<std::uint8_t>>(std::move(triangle));
    return c;
  }

  static Coloring constant(int n, int r, Color color) {
    check_shape(n, r);
    return dense(n, r,
                 std::vector<std::uint8_t>(pair_count(n),
                                           static_cast<std::uint8_t>(color.index)));
  }

  /// The presentation may be used lazily; nothing is materialized, so n can
  /// be large.
  static Coloring stable(int n, int r, StablePresentation p,
                         ColoringForm form = ColoringForm::StablePresented) {
    check_shape(n, r);
    if (static_cast<int>(p.limits.size()) != n || static_cast<int>(p.thresholds.size()) != n)
      throw std::invalid_argument("stable presentation needs one limit and threshold per vertex");
    for (auto l : p.limits)
      if (l.index < 0 || l.index >= r) throw std::invalid_argument("limit color out of range");
    for (const auto& [key, col] : p.exceptions) {
      if (key.first >= key.second || col.index < 0 || col.index >= r)
        throw std::invalid_argument("bad exception entry");
    }
    Coloring c;
    c.n_ = n;
    c.r_ = r;
    c.form_ = form;
    c.stable_ = std::make_shared<const StablePresentation>(std::move(p));
    return c;
  }

  int n() const { return n_; }
  int r() const { return r_; }
  ColoringForm form() const { return form_; }
  bool has_presentation() const { return stable_ != nullptr; }
  const StablePresentation* presentation() const { return stable_.get(); }

  /// Checked accessor.
  Color color_of(Vertex x, Vertex y) const {
    if (x == y) throw std::domain_error("no color on a self pair");
    if (x < 0 || y < 0 || x >= n_ || y >= n_)
      throw std::out_of_range("pair {" + std::to_string(x) + "," + std::to_string(y) +
                              "} outside universe of size " + std::to_string(n_));
    return at(x, y);
  }

  /// Unchecked: x != y, both in [0, n).
  Color at(Vertex x, Vertex y) const {
    if (triangle_) return Color{(*triangle_)[pair_index(x, y)]};
    if (x > y) std::swap(x, y);
    const auto& p = *stable_;
    if (y >= p.thresholds[x]) return p.limits[x];
    if (auto it = p.exceptions.find({x, y}); it != p.exceptions.end()) return it->second;
    if (p.below_threshold) return *p.below_threshold;
    return p.limits[x];
  }

  std::vector<std::uint8_t> triangle() const {
    if (triangle_) return *triangle_;
    std::vector<std::uint8_t> out(pair_count(n_));
    for (Vertex y = 1; y < n_; ++y)
      for (Vertex x = 0; x < y; ++x) out[pair_index(x, y)] = static_cast<std::uint8_t>(at(x, y).index);
    return out;
  }

  /// Restriction to the first m vertices.
  Coloring prefix(int m) const {
    if (m > n_) throw std::out_of_range("prefix larger than universe");
    if (triangle_) {
      std::vector<std::uint8_t> t(triangle_->begin(), triangle_->begin() + pair_count(m));
      return dense(m, r_, std::move(t), form_);
    }
    StablePresentation p;
    p.limits.assign(stable_->limits.begin(), stable_->limits.begin() + m);
    p.thresholds.assign(stable_->thresholds.begin(), stable_->thresholds.begin() + m);
    for (const auto& [k, v] : stable_->exceptions)
      if (k.second < m) p.exceptions.emplace(k, v);
    p.below_threshold = stable_->below_threshold;
    return stable(m, r_, std::move(p), form_);
  }

 private:
  static void check_shape(int n, int r) {
    if (n < 0) throw std::domain_error("negative universe size");
    if (r < 1 || r > 255) throw std::domain_error("color count must be in [1, 255]");
  }

  int n_ = 0;
  int r_ = 1;
  ColoringForm form_ = ColoringForm::DenseFinite;
  std::shared_ptr<const std::vector<std::uint8_t>> triangle_;
  std::shared_ptr<const StablePresentation> stable_;
};

inline Color color_of(const Coloring& c, Vertex x, Vertex y) { return c.color_of(x, y); }

/// Members are sorted. `tail` marks that the set also contains every vertex
/// at or beyond the universe bound in the canonical extension of a stable
/// presentation (pairs {x, y} with y past the universe take the limit
/// color of x). Finite-only sets have tail == false.
struct VertexSet {
  std::vector<Vertex> members;
  bool tail = false;

  bool contains(Vertex v) const {
    return std::binary_search(members.begin(), members.end(), v);
  }
  std::size_t size() const { return members.size(); }

  friend bool operator==(const VertexSet&, const VertexSet&) = default;
};

inline VertexSet intersect(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  std::set_intersection(a.members.begin(), a.members.end(), b.members.begin(),
                        b.members.end(), std::back_inserter(out.members));
  out.tail = a.tail && b.tail;
  return out;
}

inline VertexSet range_set(int n) {
  VertexSet s;
  s.members.resize(n);
  for (int i = 0; i < n; ++i) s.members[i] = i;
  return s;
}

struct NeighborSet {
  Vertex m = 0;
  Color color;
  VertexSet set;
};

/// N(m, i) restricted to [0, universe). The tail flag is only meaningful
/// when the universe is the coloring's whole universe.
inline NeighborSet neighbors_of_color(const Coloring& c, Vertex m, Color i, int universe) {
  if (m < 0 || m >= universe) throw std::out_of_range("vertex outside universe");
  if (universe > c.n()) throw std::out_of_range("universe larger than coloring");
  NeighborSet out{m, i, {}};
  for (Vertex v = 0; v < universe; ++v)
    if (v != m && c.at(m, v) == i) out.set.members.push_back(v);
  if (c.has_presentation() && universe == c.n()) out.set.tail = c.presentation()->limits[m] == i;
  return out;
}

inline NeighborSet neighbors_of_color(const Coloring& c, Vertex m, Color i) {
  return neighbors_of_color(c, m, i, c.n());
}

/// Uniform random dense coloring; deterministic in the seed.
inline Coloring gen_random(int n, int r, std::uint64_t seed) {
  if (n < 2) throw std::domain_error("gen_random needs n >= 2");
  if (r < 1) throw std::domain_error("gen_random needs r >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dist(0, r - 1);
  std::vector<std::uint8_t> t(pair_count(n));
  for (auto& v : t) v = static_cast<std::uint8_t>(dist(rng));
  return Coloring::dense(n, r, std::move(t));
}

/// Random stable coloring with explicit exceptions below each threshold.
inline Coloring gen_stable_random(int n, int r, std::uint64_t seed, int max_threshold) {
  if (max_threshold > n || max_threshold < 0)
    throw std::domain_error("max_threshold must lie in [0, n]");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> color(0, r - 1);
  std::uniform_int_distribution<int> thr(0, max_threshold);
  StablePresentation p;
  p.limits.resize(n);
  p.thresholds.resize(n);
  for (Vertex x = 0; x < n; ++x) {
    p.limits[x] = Color{color(rng)};
    p.thresholds[x] = thr(rng);
    for (Vertex y = x + 1; y < p.thresholds[x]; ++y) p.exceptions[{x, y}] = Color{color(rng)};
  }
  return Coloring::stable(n, r, std::move(p));
}

inline bool validate_symmetric(const Coloring& c) {
  for (Vertex y = 1; y < c.n(); ++y)
    for (Vertex x = 0; x < y; ++x) {
      auto a = c.at(x, y), b = c.at(y, x);
      if (a != b || a.index < 0 || a.index >= c.r()) return false;
    }
  return true;
}

/// Every row is constant from its threshold on and equals the limit there.
inline bool validate_stable(const Coloring& c) {
  const auto* p = c.presentation();
  if (!p) return false;
  for (Vertex x = 0; x < c.n(); ++x) {
    for (Vertex y = std::max(x + 1, p->thresholds[x]); y < c.n(); ++y)
      if (c.at(x, y) != p->limits[x]) return false;
  }
  return true;
}

/// Builds a coloring stage by stage: stage s assigns the pairs {t, s+1} for
/// t <= s. Pairs never change once assigned.
class StreamBuilder {
 public:
  explicit StreamBuilder(int r) : r_(r) {}

  int stages() const { return stages_; }

  /// Colors for {0, s+1}, ..., {s, s+1} where s is the current stage.
  void add_stage(std::span<const Color> row) {
    if (static_cast<int>(row.size()) != stages_ + 1)
      throw PreconditionError("stage row has wrong length");
    for (auto c : row) {
      if (c.index < 0 || c.index >= r_) throw std::invalid_argument("color out of range");
      triangle_.push_back(static_cast<std::uint8_t>(c.index));
    }
    ++stages_;
  }

  /// Color of an already assigned pair.
  Color at(Vertex x, Vertex y) const { return Color{triangle_[pair_index(x, y)]}; }

  Coloring finish() const {
    return Coloring::dense(stages_ + 1, r_, triangle_, ColoringForm::Streamed);
  }

 private:
  int r_;
  int stages_ = 0;
  std::vector<std::uint8_t> triangle_;
};

/// Enumerates every r-coloring of [n] in lexicographic order of the
/// upper-triangle word (first pair most significant).
class ColoringEnumerator {
 public:
  ColoringEnumerator(int n, int r, double budget = 1 << 24) : n_(n), r_(r) {
    const double total = count(n, r);
    if (total > budget)
      throw BudgetExceeded("enumeration of " + std::to_string(total) +
                               " colorings exceeds budget",
                           total);
    word_.assign(pair_count(n), 0);
  }

  static double count(int n, int r) {
    return std::pow(static_cast<double>(r), static_cast<double>(pair_count(n)));
  }

  std::optional<Coloring> next() {
    if (done_) return std::nullopt;
    auto out = Coloring::dense(n_, r_, word_);
    // increment, least significant digit last
    std::int64_t i = static_cast<std::int64_t>(word_.size()) - 1;
    while (i >= 0 && word_[i] == r_ - 1) word_[i--] = 0;
    if (i < 0)
      done_ = true;
    else
      ++word_[i];
    return out;
  }

  /// Coloring with the given rank in the enumeration order.
  static Coloring at_rank(int n, int r, std::uint64_t rank) {
    std::vector<std::uint8_t> w(pair_count(n), 0);
    for (std::int64_t i = static_cast<std::int64_t>(w.size()) - 1; i >= 0 && rank; --i) {
      w[i] = static_cast<std::uint8_t>(rank % r);
      rank /= r;
    }
    return Coloring::dense(n, r, std::move(w));
  }

 private:
  int n_, r_;
  bool done_ = false;
  std::vector<std::uint8_t> word_;
};

template <class F>
void for_each_coloring(int n, int r, F&& f) {
  ColoringEnumerator e(n, r);
  while (auto c = e.next()) f(*c);
}

}  // namespace rado
