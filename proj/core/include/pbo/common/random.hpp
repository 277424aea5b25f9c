#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace pbo {

using Rng = std::mt19937_64;

// Derives an independent 64-bit seed for a named sub-stream of a master seed.
// Each consumer (initial sampling, plant noise, acquisition, oracle noise)
// draws from its own stream so toggling one leaves the others untouched.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream, std::uint64_t index = 0);

inline Rng make_stream(std::uint64_t master, std::string_view stream, std::uint64_t index = 0) {
  return Rng(derive_seed(master, stream, index));
}

// Standard normal draw. Kept as a free function so every module draws the
// same way from an Rng.
inline double standard_normal(Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

inline double uniform01(Rng& rng) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

}  // namespace pbo
