// Decomposes a random 2-coloring with the insertion algorithm and prints
// both paths.
//   sample_decompose [n] [seed]

#include <cstdlib>
#include <iostream>

#include "rado/solver.hpp"

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 20;
  const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 1;
  auto c = rado::gen_random(n, 2, seed);
  rado::Trace trace;
  auto d = rado::gg_decompose(c, &trace);
  std::cout << "n=" << n << " seed=" << seed << "\n";
  std::cout << rado::to_string(d) << "\n";
  int switches = 0;
  for (const auto& s : trace.steps) switches += s.is_switch();
  std::cout << trace.steps.size() << " steps, " << switches << " switches\n";
  auto v = rado::validate_decomposition(c, d);
  std::cout << v.describe() << "\n";
  return v.ok() ? 0 : 1;
}
