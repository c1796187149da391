#include "irsce/rng.hpp"

#include <cmath>
#include <numbers>

namespace irsce {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t seed_mix(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x2545f4914f6cdd1dULL;
  for (std::uint64_t p : parts) h = splitmix64(h ^ p);
  return h;
}

double Rng::uniform() {
  // 53 random mantissa bits
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::uint64_t Rng::integer(std::uint64_t n) {
  const std::uint64_t bound = (~0ULL / n) * n;
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= bound);
  return r % n;
}

std::complex<double> Rng::unit_phase() {
  const double theta = uniform(0.0, 2.0 * std::numbers::pi);
  return {std::cos(theta), std::sin(theta)};
}

std::complex<double> Rng::cgaussian() {
  // |z|^2 ~ Exp(1), phase uniform
  const double mag = std::sqrt(-std::log1p(-uniform()));
  return mag * unit_phase();
}

}  // namespace irsce
