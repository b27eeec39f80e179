#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "polycwm/linalg.hpp"
#include "polycwm/model.hpp"

namespace polycwm {

// Free coordinates of a mixture: (pi_1 .. pi_{k-1}), then per component
// (beta_0 .. beta_r, log sigma_eps, mu_x, log sigma_x). pi_k = 1 - sum.
Vector to_free_coordinates(const MixtureParams& psi);
MixtureParams from_free_coordinates(std::span<const double> theta, std::size_t k, int degree);

using Objective = std::function<double(std::span<const double>)>;

// Central finite-difference Hessian; step i is relative_step * (1 + |theta_i|).
// Entries are evaluated concurrently, so the objective must be thread-safe.
SymMatrix numerical_hessian(const Objective& f, std::span<const double> theta, double relative_step = 1e-4);

// Inverse of -hessian. Throws HessianNotPD naming the first failing pivot
// (a coordinate index) when -hessian is not positive definite.
SymMatrix covariance_from_hessian(const SymMatrix& hessian);

struct ComponentErrors {
  Vector beta;
  double sigma_eps = 0.0;
  double mu_x = 0.0;
  double sigma_x = 0.0;
};

struct StdErrors {
  Vector weights;  // all k; the last one follows from the sum constraint
  std::vector<ComponentErrors> components;
  // Covariance in natural coordinates (pi_1..pi_{k-1}, beta, sigma_eps, mu_x, sigma_x per component).
  SymMatrix covariance;
};

StdErrors standard_errors(const Dataset& data, const MixtureParams& psi_hat, double relative_step = 1e-4);

struct OlsCoefficient {
  double estimate = 0.0;
  double std_error = 0.0;
  double t_value = 0.0;
  double p_value = 1.0;
};

struct OlsReport {
  std::vector<OlsCoefficient> coefficients;  // beta_0 .. beta_r
  double residual_sd = 0.0;
  double rss = 0.0;
  std::size_t df = 0;
};

OlsReport ols_polyfit(std::span<const double> x, std::span<const double> y, int degree);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);
// P(|T| >= |t|) for Student's t with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

}  // namespace polycwm
