#include "rsmm/rng.hpp"

#include <cmath>
#include <numbers>

namespace rsmm {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t path, std::uint64_t stream)
    : key_(splitmix64(splitmix64(splitmix64(seed) ^ path) ^ (stream * 0xd1b54a32d192ed03ULL))) {}

std::uint64_t CounterRng::bits(std::uint64_t ordinal) const {
  return splitmix64(splitmix64(key_ + ordinal * 0x9e3779b97f4a7c15ULL) ^ key_);
}

double CounterRng::uniform(std::uint64_t ordinal) const {
  return (static_cast<double>(bits(ordinal) >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t ordinal) const {
  double u1 = uniform(2 * ordinal);
  double u2 = uniform(2 * ordinal + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace rsmm
