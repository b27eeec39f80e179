#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polycwm/em.hpp"
#include "polycwm/inference.hpp"
#include "polycwm/selection.hpp"

namespace polycwm {

struct Generator {
  MixtureParams psi;
  // Exact per-component counts; when absent, counts are multinomial draws.
  std::optional<std::vector<std::size_t>> group_sizes;
  std::uint64_t seed = 0;
};

// Cubic two-component benchmark: weights (0.571, 0.429), X ~ N(-2, 1) and
// N(3.8, 0.7^2), regressions (0, -1, 0, 0.1) and (-8, 0.1, -0.1, 0.15) with
// residual scales 1.6 and 2.3.
MixtureParams benchmark_parameters();
// The benchmark with fixed group sizes 400 and 300 (n = 700).
Generator benchmark_generator(std::uint64_t seed);

// Draws component, then x ~ N(mu_x, sigma_x^2), then y = mu(x) + N(0, sigma_eps^2).
// The returned dataset has no known labels; the component of origin is
// stored as truth. Rows are grouped by component when sizes are fixed.
Dataset sample(const Generator& gen, std::size_t n);

// Posterior membership under the CWM or one of the reference models.
Responsibilities posteriors(const Dataset& data, const MixtureParams& psi, DensityModel model);

// Mixture of polynomial Gaussian regressions of y on x (no X-marginal).
FitResult fit_reference_fmr(const Dataset& data, std::size_t k, int degree, const FitConfig& cfg);
// Univariate Gaussian mixture on x alone. Regression slots of the result are
// degree-0 placeholders and play no part in the fit.
FitResult fit_reference_gmm_x(const Dataset& data, std::size_t k, const FitConfig& cfg);

struct ReplicationMetrics {
  std::size_t m = 0;
  std::size_t replication = 0;
  bool ok = false;
  std::string status;
  double ari = 0.0;
  double loglik = 0.0;
  ModelCell selected;
};

struct LevelSummary {
  std::size_t m = 0;
  std::size_t successes = 0;
  double mean = 0.0;
  double std_error = 0.0;
  double q025 = 0.0;
  double q05 = 0.0;
  double q95 = 0.0;
  double q975 = 0.0;
};

struct ExperimentReport {
  std::vector<ReplicationMetrics> replications;
  std::vector<LevelSummary> levels;
};

// Sample quantile with linear interpolation between order statistics
// (the default definition of R's quantile()).
double quantile(std::vector<double> values, double p);
LevelSummary summarize(std::size_t m, const std::vector<double>& values);

struct ArtificialExperimentOptions {
  std::vector<std::size_t> k_range{1, 2, 3, 4, 5};
  std::vector<int> r_range{1, 2, 3, 4, 5};
  FitConfig fit;  // defaults: EM, t = 10, epsilon = 0.05
  bool with_standard_errors = true;
  bool with_reference_fmr = true;
};

struct ArtificialExperiment {
  Dataset data;
  GridResult grid;
  double ari_bic = 0.0;  // MAP of the BIC-selected fit against truth
  double ari_icl = 0.0;
  std::optional<StdErrors> std_errors;  // of the BIC-selected fit
  std::string std_errors_status;
  std::optional<double> fmr_ari;  // mixture of regressions started at truth
  ExperimentReport report;
  const FitResult& selected_fit() const { return *grid.row(grid.best_bic).fit; }
};

ArtificialExperiment run_artificial_experiment(std::uint64_t seed, const ArtificialExperimentOptions& opts = {});

// For every m and replication: label m rows drawn uniformly without
// replacement (using truth), fit, and score ARI on the unlabeled rows.
ExperimentReport run_labeled_fraction_study(const Dataset& data, const std::vector<std::size_t>& m_values,
                                            std::size_t reps, std::uint64_t seed, std::size_t k, int degree,
                                            const FitConfig& cfg);

}  // namespace polycwm
