#include "polycwm/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "polycwm/error.hpp"
#include "polycwm/kernels.hpp"

namespace polycwm {

Vector to_free_coordinates(const MixtureParams& psi) {
  const std::size_t k = psi.num_components();
  Vector theta;
  for (std::size_t j = 0; j + 1 < k; ++j) theta.push_back(psi.weight(j));
  for (const auto& c : psi.components()) {
    theta.insert(theta.end(), c.beta.begin(), c.beta.end());
    theta.push_back(std::log(c.sigma_eps));
    theta.push_back(c.mu_x);
    theta.push_back(std::log(c.sigma_x));
  }
  return theta;
}

MixtureParams from_free_coordinates(std::span<const double> theta, std::size_t k, int degree) {
  const std::size_t dim = static_cast<std::size_t>(degree) + 1;
  if (theta.size() != (k - 1) + k * (dim + 3)) throw Error(ErrorCode::ShapeMismatch, "free coordinate length mismatch");
  Vector weights(k);
  double rest = 1.0;
  for (std::size_t j = 0; j + 1 < k; ++j) {
    weights[j] = theta[j];
    rest -= theta[j];
  }
  weights[k - 1] = rest;
  std::vector<ComponentParams> comps(k);
  std::size_t at = k - 1;
  for (auto& c : comps) {
    c.beta.assign(theta.begin() + static_cast<std::ptrdiff_t>(at), theta.begin() + static_cast<std::ptrdiff_t>(at + dim));
    at += dim;
    c.sigma_eps = std::exp(theta[at++]);
    c.mu_x = theta[at++];
    c.sigma_x = std::exp(theta[at++]);
  }
  return MixtureParams(std::move(weights), std::move(comps));
}

SymMatrix numerical_hessian(const Objective& f, std::span<const double> theta, double relative_step) {
  const std::size_t d = theta.size();
  std::vector<double> h(d);
  for (std::size_t i = 0; i < d; ++i) h[i] = relative_step * (1.0 + std::abs(theta[i]));
  const double f0 = f(theta);
  if (!std::isfinite(f0)) throw Error(ErrorCode::NumericalBreakdown, "objective is not finite at the expansion point");

  // Upper-triangle entry list so the loop below is flat.
  std::vector<std::pair<std::size_t, std::size_t>> entries;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) entries.emplace_back(i, j);
  std::vector<double> values(entries.size(), 0.0);
  std::vector<char> bad(entries.size(), 0);
  const auto count = static_cast<long long>(entries.size());

#pragma omp parallel for schedule(dynamic)
  for (long long e = 0; e < count; ++e) {
    const auto [i, j] = entries[static_cast<std::size_t>(e)];
    Vector p(theta.begin(), theta.end());
    auto eval = [&](double si, double sj) {
      p.assign(theta.begin(), theta.end());
      p[i] += si * h[i];
      p[j] += sj * h[j];
      try {
        return f(p);
      } catch (const Error&) {
        return std::numeric_limits<double>::quiet_NaN();
      }
    };
    double v;
    if (i == j) {
      p.assign(theta.begin(), theta.end());
      p[i] += h[i];
      double fp, fm;
      try {
        fp = f(p);
        p[i] = theta[i] - h[i];
        fm = f(p);
      } catch (const Error&) {
        fp = fm = std::numeric_limits<double>::quiet_NaN();
      }
      v = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
    } else {
      v = (eval(1, 1) - eval(1, -1) - eval(-1, 1) + eval(-1, -1)) / (4.0 * h[i] * h[j]);
    }
    values[static_cast<std::size_t>(e)] = v;
    bad[static_cast<std::size_t>(e)] = std::isfinite(v) ? 0 : 1;
  }

  SymMatrix hess(d);
  for (std::size_t e = 0; e < entries.size(); ++e) {
    if (bad[e]) {
      throw Error(ErrorCode::NumericalBreakdown, "non-finite second difference at (" + std::to_string(entries[e].first) +
                                                     ", " + std::to_string(entries[e].second) + ")");
    }
    hess.set(entries[e].first, entries[e].second, values[e]);
  }
  return hess;
}

SymMatrix covariance_from_hessian(const SymMatrix& hessian) {
  const std::size_t d = hessian.dim();
  // Jacobi-scale -H to unit diagonal before factoring; raw polynomial
  // coordinates differ in curvature by many orders of magnitude.
  std::vector<double> scale(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double a = -hessian(i, i);
    if (!(a > 0.0)) {
      throw Error(ErrorCode::HessianNotPD, "negative Hessian has non-positive diagonal at coordinate " + std::to_string(i));
    }
    scale[i] = 1.0 / std::sqrt(a);
  }
  SymMatrix scaled(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) scaled.set(i, j, -hessian(i, j) * scale[i] * scale[j]);
  SymMatrix inv;
  try {
    inv = SpdFactor(scaled).inverse();
  } catch (const Error& e) {
    throw Error(ErrorCode::HessianNotPD, std::string("negative Hessian is not positive definite (") + e.what() + ")");
  }
  SymMatrix cov(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) cov.set(i, j, inv(i, j) * scale[i] * scale[j]);
  return cov;
}

StdErrors standard_errors(const Dataset& data, const MixtureParams& psi_hat, double relative_step) {
  const std::size_t k = psi_hat.num_components();
  const int degree = psi_hat.degree();
  const std::size_t dim = static_cast<std::size_t>(degree) + 1;
  data.validate_labels(k);
  const Vector theta = to_free_coordinates(psi_hat);
  if (theta.size() > 200) throw Error(ErrorCode::InvalidArgument, "too many parameters for a dense Hessian");

  const Objective objective = [&](std::span<const double> t) {
    return kernels::serial::loglik(data, from_free_coordinates(t, k, degree), DensityModel::Cwm);
  };
  const SymMatrix cov_free = covariance_from_hessian(numerical_hessian(objective, theta, relative_step));

  // Delta method: d sigma / d log sigma = sigma.
  const std::size_t d = theta.size();
  std::vector<double> jac(d, 1.0);
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t base = (k - 1) + j * (dim + 3);
    jac[base + dim] = psi_hat.component(j).sigma_eps;
    jac[base + dim + 2] = psi_hat.component(j).sigma_x;
  }
  StdErrors out;
  out.covariance = SymMatrix(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) out.covariance.set(i, j, cov_free(i, j) * jac[i] * jac[j]);

  auto se = [&](std::size_t i) { return std::sqrt(std::max(0.0, out.covariance(i, i))); };
  out.weights.resize(k);
  double var_last = 0.0;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    out.weights[i] = se(i);
    for (std::size_t j = 0; j + 1 < k; ++j) var_last += out.covariance(i, j);
  }
  out.weights[k - 1] = std::sqrt(std::max(0.0, var_last));
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t base = (k - 1) + j * (dim + 3);
    ComponentErrors c;
    for (std::size_t l = 0; l < dim; ++l) c.beta.push_back(se(base + l));
    c.sigma_eps = se(base + dim);
    c.mu_x = se(base + dim + 1);
    c.sigma_x = se(base + dim + 2);
    out.components.push_back(std::move(c));
  }
  return out;
}

OlsReport ols_polyfit(std::span<const double> x, std::span<const double> y, int degree) {
  if (x.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "x and y lengths differ");
  if (degree < 0) throw Error(ErrorCode::InvalidArgument, "negative polynomial degree");
  const std::size_t n = x.size();
  const std::size_t dim = static_cast<std::size_t>(degree) + 1;
  if (n <= dim) throw Error(ErrorCode::InsufficientData, "need more observations than coefficients");

  double center = 0.0;
  for (double v : x) center += v;
  center /= static_cast<double>(n);
  double var = 0.0;
  for (double v : x) var += (v - center) * (v - center);
  const double sd = std::sqrt(var / static_cast<double>(n));
  const double scale = sd > 0.0 ? sd : 1.0;

  SymMatrix gram(dim);
  Vector rhs(dim, 0.0);
  Vector t_pow(dim);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = (x[i] - center) / scale;
    t_pow[0] = 1.0;
    for (std::size_t l = 1; l < dim; ++l) t_pow[l] = t_pow[l - 1] * t;
    for (std::size_t p = 0; p < dim; ++p) {
      for (std::size_t q = p; q < dim; ++q) gram.add(p, q, t_pow[p] * t_pow[q]);
      rhs[p] += t_pow[p] * y[i];
    }
  }
  std::optional<SpdFactor> factor;
  try {
    factor.emplace(gram);
  } catch (const Error& e) {
    throw Error(ErrorCode::SingularDesign, std::string("polynomial design is singular (") + e.what() + ")");
  }
  const Vector gamma = factor->solve(rhs);
  const Vector beta = scaled_to_monomial(gamma, center, scale);

  OlsReport report;
  report.df = n - dim;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - polyval(beta, x[i]);
    report.rss += e * e;
  }
  const double sigma2 = report.rss / static_cast<double>(report.df);
  report.residual_sd = std::sqrt(sigma2);

  // Cov(beta) = T Cov(gamma) T' with Cov(gamma) = sigma^2 G^-1.
  const SymMatrix g_inv = factor->inverse();
  const auto tmat = scaled_to_monomial_matrix(degree, center, scale);
  for (std::size_t p = 0; p < dim; ++p) {
    double var_p = 0.0;
    for (std::size_t a = 0; a < dim; ++a)
      for (std::size_t b = 0; b < dim; ++b) var_p += tmat[p * dim + a] * g_inv(a, b) * tmat[p * dim + b];
    OlsCoefficient c;
    c.estimate = beta[p];
    c.std_error = std::sqrt(std::max(0.0, sigma2 * var_p));
    if (c.std_error > 0.0) {
      c.t_value = c.estimate / c.std_error;
      c.p_value = student_t_two_sided_p(c.t_value, static_cast<double>(report.df));
    } else if (c.estimate != 0.0) {
      c.t_value = std::copysign(std::numeric_limits<double>::infinity(), c.estimate);
      c.p_value = 0.0;
    }
    report.coefficients.push_back(c);
  }
  return report;
}

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw Error(ErrorCode::NumericalBreakdown, "incomplete beta continued fraction did not converge");
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorCode::InvalidArgument, "incomplete beta needs a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw Error(ErrorCode::InvalidArgument, "degrees of freedom must be positive");
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  return regularized_incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
}

}  // namespace polycwm
