#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace polycwm {

// SplitMix64 finalizer. Used to derive independent stream seeds from a base
// seed plus integer tags (restart index, grid cell, replication, ...).
std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags) noexcept;

// Inverse of the standard normal CDF (Wichura AS241, ~1e-16 relative).
double normal_quantile(double p);

// Portable random stream. std::mt19937_64 output is fixed by the standard;
// uniforms, integers and normals are derived here rather than through the
// implementation-defined std distributions, so draws match across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on the open interval (0, 1).
  double uniform();
  // Uniform integer in [0, bound), unbiased by rejection.
  std::uint64_t uniform_index(std::uint64_t bound);
  // Standard normal by inversion.
  double normal() { return normal_quantile(uniform()); }
  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace polycwm
