// Shared error taxonomy, deterministic RNG plumbing and tolerance constants.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace tame {

// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidSpecError : Error {
  using Error::Error;
};
struct DimensionMismatchError : Error {
  using Error::Error;
};
struct NumericFailureError : Error {
  using Error::Error;
};
struct DegenerateFunctionError : Error {
  using Error::Error;
};
struct EmptySubspaceError : Error {
  using Error::Error;
};
struct WindowTooTightError : Error {
  using Error::Error;
};
struct ArbitrationStarvedError : Error {
  ArbitrationStarvedError(const std::string& msg, double best_cost_seen)
      : Error(msg), best_cost(best_cost_seen) {}
  double best_cost;
};
struct ResolutionError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

// Numerical tolerances used across the library.
namespace tol {
inline constexpr double kHermitian = 1e-12;       // relative Frobenius
inline constexpr double kUnitary = 1e-10;         // orthonormality / trace / norm
inline constexpr double kResidual = 1e-9;         // eigen residuals, imaginary parts
inline constexpr double kSliceHermitian = 1e-10;  // slice matrix checks
inline constexpr double kSliceProduct = 1e-8;     // (slice)^N vs e^{-K tau}
}  // namespace tol

using Rng = std::mt19937_64;

// splitmix64 step; used both as a stream mixer and a cheap hash combiner.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Derive an independent child seed from a base seed and a stream index.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(base ^ splitmix64(stream));
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t mix_seed(std::uint64_t base, std::string_view tag) {
  return mix_seed(base, fnv1a(tag));
}

inline Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

// Uniform double in [0, 1); 53-bit resolution, identical across platforms.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller on the portable uniform above.  Kept
// hand-rolled so seeded output is identical across standard libraries.
inline std::pair<double, double> normal_pair(Rng& rng) {
  double u1 = 0.0;
  do {
    u1 = uniform01(rng);
  } while (u1 <= 0.0);
  const double u2 = uniform01(rng);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 6.283185307179586476925286766559 * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

}  // namespace tame
