// Builds the halting-table coloring for a few toy machines, takes the
// intended decomposition and reads the halting set back from it.
//   sample_halting [stages]

#include <cstdlib>
#include <iostream>

#include "rado/harness.hpp"

int main(int argc, char** argv) {
  rado::ToyHaltingOracle o;
  o.halts_at = {5, std::nullopt, 9, std::nullopt, 14};
  const int stages = argc > 1 ? std::atoi(argv[1]) : rado::halting_min_stages(o);
  auto b = rado::halting_coloring_build(o, stages);
  for (const auto& f : b.flips)
    std::cout << "stage " << f.stage << ": machine " << f.e << " halts, defaults on [" << f.lo << "," << f.hi
              << "] turn RED\n";
  const int N = rado::suites::halting_universe(b);
  auto d = rado::intended_decomposition(b, N);
  auto r = rado::decode(d, b, N);
  std::cout << "N=" << N << ", RED path has " << d.red().size() << " vertices\n";
  bool ok = true;
  for (int e = 0; e < o.size(); ++e) {
    const bool truth = o.halts_at[e].has_value();
    ok = ok && truth == r.member[e];
    std::cout << "machine " << e << ": marker " << r.markers[e] << ", t1 " << r.t1[e] << ", decoded "
              << (r.member[e] ? "halts" : "runs forever") << (truth == r.member[e] ? "" : "  (WRONG)") << "\n";
  }
  return ok ? 0 : 1;
}
