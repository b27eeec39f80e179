#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polycwm/evaluation.hpp"
#include "polycwm/model.hpp"

namespace polycwm {

enum class Algorithm { EM, CEM };

struct FitConfig {
  Algorithm algorithm = Algorithm::EM;
  int restarts = 10;
  double epsilon = 0.05;   // Aitken threshold on the log-likelihood
  int max_iter = 1000;
  std::uint64_t seed = 0;
  double variance_floor = 1e-10;
  // When set, a single run starts from this hard partition (0-based, one
  // entry per row in input order) instead of random draws. Known labels
  // still override it on labeled rows.
  std::optional<std::vector<std::size_t>> initial_partition;
  // Run restarts on OpenMP threads.
  bool parallel_restarts = true;

  void validate() const;
};

struct FitResult {
  MixtureParams psi_hat;
  Responsibilities resp;          // posteriors at psi_hat, internal row order
  std::vector<double> loglik_trace;
  Partition map_labels;           // internal row order
  bool converged = false;
  int iterations = 0;
  int best_restart = 0;
  std::vector<std::string> restart_failures;  // "restart i: reason"
  std::vector<std::string> warnings;

  double loglik() const { return loglik_trace.back(); }
};

enum class AitkenDecision { Continue, Converged };

AitkenDecision aitken_stop(double l_prev2, double l_prev, double l_curr, double epsilon);

// Posterior membership probabilities under psi (one-hot on labeled rows).
Responsibilities e_step(const Dataset& data, const MixtureParams& psi);

MixtureParams m_step(const Dataset& data, const Responsibilities& resp, int degree, double variance_floor = 1e-10);

// Maximum-likelihood fit by EM or CEM with random multi-start. `model`
// selects which density factors are used; anything other than Cwm gives the
// reference mixtures used for comparison.
FitResult fit(const Dataset& data, std::size_t k, int degree, const FitConfig& cfg,
              DensityModel model = DensityModel::Cwm);

}  // namespace polycwm
