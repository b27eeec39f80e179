#pragma once

#include <cstdint>
#include <vector>

#include "polycwm/model.hpp"
#include "polycwm/rng.hpp"
#include "polycwm/simulate.hpp"

namespace testing_support {

inline double uniform(polycwm::Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

// Weights bounded away from zero, moderate coefficients and scales.
inline polycwm::MixtureParams random_params(polycwm::Rng& rng, std::size_t k, int degree) {
  std::vector<double> w(k);
  double total = 0.0;
  for (auto& v : w) total += (v = uniform(rng, 0.5, 1.5));
  for (auto& v : w) v /= total;
  double sum_head = 0.0;
  for (std::size_t j = 0; j + 1 < k; ++j) sum_head += w[j];
  w[k - 1] = 1.0 - sum_head;
  std::vector<polycwm::ComponentParams> comps(k);
  for (auto& c : comps) {
    c.beta.resize(static_cast<std::size_t>(degree) + 1);
    for (std::size_t l = 0; l < c.beta.size(); ++l) c.beta[l] = uniform(rng, -2.0, 2.0) / static_cast<double>(l + 1);
    c.sigma_eps = uniform(rng, 0.3, 2.0);
    c.mu_x = uniform(rng, -4.0, 4.0);
    c.sigma_x = uniform(rng, 0.4, 1.5);
  }
  return polycwm::MixtureParams(std::move(w), std::move(comps));
}

// Parameters behind random_dataset(seed, ., k, degree).
inline polycwm::MixtureParams generating_params(std::uint64_t seed, std::size_t k, int degree) {
  polycwm::Rng rng(seed);
  return random_params(rng, k, degree);
}

inline polycwm::Dataset random_dataset(std::uint64_t seed, std::size_t n, std::size_t k, int degree) {
  polycwm::Generator gen{generating_params(seed, k, degree), std::nullopt, polycwm::derive_seed(seed, {1})};
  return polycwm::sample(gen, n);
}

}  // namespace testing_support
