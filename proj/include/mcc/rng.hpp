#pragma once

#include <cstdint>
#include <random>

namespace mcc {

// mt19937_64 seeded through seed_seq from (seed, stream, substream). Uniforms are
// built from the top 53 bits so the sequence is identical on every platform.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t substream = 0);
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double normal();
  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mcc
