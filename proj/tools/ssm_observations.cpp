// Regenerates the shipped observation file: ssm-observations [count] [seed] [out.csv]
#include <cstdlib>
#include <iostream>

#include "mcc/feynman_kac.hpp"

int main(int argc, char** argv) {
  const std::size_t count = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 8;
  const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 20260101;
  const std::string out = argc > 3 ? argv[3] : "data/ssm_observations.csv";
  mcc::SsmBootstrapModel m;
  mcc::write_observations(out, mcc::ssm_generate_observations(m, count, seed));
  std::cout << "wrote " << count << " observations to " << out << "\n";
  return 0;
}
