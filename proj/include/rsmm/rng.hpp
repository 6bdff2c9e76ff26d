#pragma once

#include <cstdint>

namespace rsmm {

std::uint64_t splitmix64(std::uint64_t x);

// Stateless counter-based generator: every draw is a hash of
// (seed, path, stream, ordinal), so results do not depend on draw order or threads.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t path, std::uint64_t stream);

  std::uint64_t bits(std::uint64_t ordinal) const;
  double uniform(std::uint64_t ordinal) const;  // in (0, 1)
  double normal(std::uint64_t ordinal) const;   // standard normal, Box-Muller on ordinals 2k, 2k+1

 private:
  std::uint64_t key_;
};

}  // namespace rsmm
