#pragma once

// Data-parallel inner loops of the EM engine. Each kernel exists twice:
//   serial::  straightforward row loop, kept as the reference implementation
//   omp::     OpenMP over fixed-size row blocks
// Both run the same arithmetic per row. The OpenMP variant reduces block
// partial sums in block order, so its results do not depend on the thread
// count; they differ from the serial reference only by summation order.

#include <cstddef>

#include "polycwm/model.hpp"

namespace polycwm::kernels {

inline constexpr std::size_t kBlockRows = 256;
// Below this many rows the OpenMP variant stays on the calling thread.
inline constexpr std::size_t kParallelMinRows = 4096;

struct MStepOutcome {
  MixtureParams params;
  bool hit_floor = false;  // some variance was raised to the floor
};

namespace serial {
// Fills resp (n x k) with posteriors, one-hot on labeled rows, and returns
// the observed-data log-likelihood of psi.
double e_step(const Dataset& data, const MixtureParams& psi, DensityModel model, Responsibilities& resp);
double loglik(const Dataset& data, const MixtureParams& psi, DensityModel model);
MStepOutcome m_step(const Dataset& data, const Responsibilities& resp, int degree, double variance_floor);
}  // namespace serial

namespace omp {
double e_step(const Dataset& data, const MixtureParams& psi, DensityModel model, Responsibilities& resp);
double loglik(const Dataset& data, const MixtureParams& psi, DensityModel model);
MStepOutcome m_step(const Dataset& data, const Responsibilities& resp, int degree, double variance_floor);
}  // namespace omp

}  // namespace polycwm::kernels
