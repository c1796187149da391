#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace irsce {

// splitmix64 finalizer; used to derive trial seeds from config fields.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s);

// Order-sensitive combination of seed components.
std::uint64_t seed_mix(std::initializer_list<std::uint64_t> parts);

/// Deterministic random stream. All draws are derived from raw mt19937_64
/// output so sequences do not depend on libstdc++ distribution internals
/// (std::normal_distribution etc. are implementation-defined).
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();  // [0, 1)
  double uniform(double lo, double hi);
  std::uint64_t integer(std::uint64_t n);  // [0, n), unbiased

  std::complex<double> unit_phase();  // e^{j theta}, theta ~ U[0, 2pi)
  std::complex<double> cgaussian();   // circularly symmetric, E|z|^2 = 1

private:
  std::mt19937_64 engine_;
};

}  // namespace irsce
