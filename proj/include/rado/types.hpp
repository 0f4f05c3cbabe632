#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rado {

using Vertex = int;

/// Index of a color in [0, r). For two colorings BLUE = 0 and RED = 1.
struct Color {
  int index = 0;

  constexpr Color() = default;
  constexpr explicit Color(int i) : index(i) {}

  friend constexpr bool operator==(Color, Color) = default;
  friend constexpr auto operator<=>(Color, Color) = default;
};

inline constexpr Color kBlue{0};
inline constexpr Color kRed{1};

/// The other color of a two coloring.
constexpr Color opposite(Color c) { return Color{1 - c.index}; }

inline std::string color_name(Color c) {
  if (c == kBlue) return "BLUE";
  if (c == kRed) return "RED";
  return "C" + std::to_string(c.index);
}

/// A caller broke a documented precondition (placing a vertex twice, an
/// inapplicable extension step, ...).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A search or enumeration would exceed its configured budget.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, double estimate)
      : std::runtime_error(what), estimate_(estimate) {}
  double estimate() const { return estimate_; }

 private:
  double estimate_;
};

/// Malformed input file.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rado
