#pragma once

// Shared per-row arithmetic for the serial and OpenMP kernels. A Reducer
// supplies the loop structure:
//   template <class RowFn> std::vector<double> sum(std::size_t n, std::size_t width, RowFn fn)
// where fn(i, acc) adds row i's contribution into acc[0..width).

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "polycwm/error.hpp"
#include "polycwm/kernels.hpp"

namespace polycwm::kernels::detail {

inline constexpr double kHalfLog2Pi = 0.91893853320467274178;

// Per-component constants hoisted out of the row loop.
struct ComponentTerms {
  std::span<const double> beta;
  double log_weight_and_norm;  // ln pi_j minus the log normalizers that apply
  double inv_sigma_eps;
  double mu_x;
  double inv_sigma_x;
};

inline std::vector<ComponentTerms> component_terms(const MixtureParams& psi, DensityModel model) {
  std::vector<ComponentTerms> out;
  out.reserve(psi.num_components());
  for (std::size_t j = 0; j < psi.num_components(); ++j) {
    const auto& c = psi.component(j);
    double base = std::log(psi.weight(j));
    if (model != DensityModel::MarginalOnly) base -= kHalfLog2Pi + std::log(c.sigma_eps);
    if (model != DensityModel::ConditionalOnly) base -= kHalfLog2Pi + std::log(c.sigma_x);
    out.push_back({c.beta, base, 1.0 / c.sigma_eps, c.mu_x, 1.0 / c.sigma_x});
  }
  return out;
}

// ln pi_j + ln f_j(x, y)
inline double log_joint(const ComponentTerms& t, DensityModel model, double x, double y) noexcept {
  double out = t.log_weight_and_norm;
  if (model != DensityModel::MarginalOnly) {
    const double e = (y - polyval(t.beta, x)) * t.inv_sigma_eps;
    out -= 0.5 * e * e;
  }
  if (model != DensityModel::ConditionalOnly) {
    const double d = (x - t.mu_x) * t.inv_sigma_x;
    out -= 0.5 * d * d;
  }
  return out;
}

// Fills row i of resp (when resp != nullptr) and returns its log-likelihood term.
inline double e_step_row(const Dataset& data, const std::vector<ComponentTerms>& terms, DensityModel model,
                         std::size_t i, double* resp_row, double* scratch) noexcept {
  const double x = data.x()[i];
  const double y = data.y()[i];
  const std::size_t k = terms.size();
  if (i < data.num_labeled()) {
    const std::size_t label = data.labels()[i];
    if (resp_row) {
      for (std::size_t j = 0; j < k; ++j) resp_row[j] = 0.0;
      resp_row[label] = 1.0;
    }
    return log_joint(terms[label], model, x, y);
  }
  double max = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < k; ++j) {
    scratch[j] = log_joint(terms[j], model, x, y);
    if (scratch[j] > max) max = scratch[j];
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    scratch[j] = std::exp(scratch[j] - max);
    sum += scratch[j];
  }
  if (resp_row) {
    const double inv = 1.0 / sum;
    for (std::size_t j = 0; j < k; ++j) resp_row[j] = scratch[j] * inv;
  }
  return max + std::log(sum);
}

inline void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw Error(ErrorCode::NumericalBreakdown, std::string("non-finite ") + what);
}

template <class Reducer>
double e_step(const Reducer& reducer, const Dataset& data, const MixtureParams& psi, DensityModel model,
              Responsibilities& resp) {
  const std::size_t k = psi.num_components();
  data.validate_labels(k);
  if (resp.rows() != data.size() || resp.cols() != k) resp = Responsibilities(data.size(), k);
  const auto terms = component_terms(psi, model);
  const auto total = reducer.sum(data.size(), 1, [&](std::size_t i, double* acc) {
    double scratch[64];
    std::vector<double> heap;
    double* s = scratch;
    if (k > 64) {
      heap.resize(k);
      s = heap.data();
    }
    acc[0] += e_step_row(data, terms, model, i, resp.row(i).data(), s);
  });
  check_finite(total[0], "log-likelihood");
  return total[0];
}

template <class Reducer>
double loglik(const Reducer& reducer, const Dataset& data, const MixtureParams& psi, DensityModel model) {
  const std::size_t k = psi.num_components();
  data.validate_labels(k);
  const auto terms = component_terms(psi, model);
  const auto total = reducer.sum(data.size(), 1, [&](std::size_t i, double* acc) {
    double scratch[64];
    std::vector<double> heap;
    double* s = scratch;
    if (k > 64) {
      heap.resize(k);
      s = heap.data();
    }
    acc[0] += e_step_row(data, terms, model, i, nullptr, s);
  });
  return total[0];
}

// Closed-form maximizer of the expected complete-data log-likelihood.
// Regression coefficients come from weighted least squares solved in the
// standardized basis t = (x - center)/scale, then mapped back to monomials.
template <class Reducer>
MStepOutcome m_step(const Reducer& reducer, const Dataset& data, const Responsibilities& resp, int degree,
                    double variance_floor) {
  const std::size_t n = data.size();
  const std::size_t k = resp.cols();
  if (resp.rows() != n || k == 0) throw Error(ErrorCode::ShapeMismatch, "responsibilities must be n x k");
  if (degree < 0 || degree > 30) throw Error(ErrorCode::InvalidArgument, "polynomial degree must lie in 0..30");
  if (!(variance_floor > 0.0)) throw Error(ErrorCode::InvalidArgument, "variance floor must be positive");
  const auto x = data.x();
  const auto y = data.y();
  const std::size_t dim = static_cast<std::size_t>(degree) + 1;

  // Pass 1: mass and first moment of x.
  const auto first = reducer.sum(n, 2 * k, [&](std::size_t i, double* acc) {
    const auto row = resp.row(i);
    for (std::size_t j = 0; j < k; ++j) {
      acc[2 * j] += row[j];
      acc[2 * j + 1] += row[j] * x[i];
    }
  });
  std::vector<double> mass(k), mean_x(k);
  for (std::size_t j = 0; j < k; ++j) {
    mass[j] = first[2 * j];
    if (!(mass[j] >= 2.0)) {
      throw Error(ErrorCode::EmptyComponent,
                  "component " + std::to_string(j + 1) + " has effective mass " + std::to_string(mass[j]));
    }
    mean_x[j] = first[2 * j + 1] / mass[j];
  }

  // Pass 2: centered second moment of x.
  const auto second = reducer.sum(n, k, [&](std::size_t i, double* acc) {
    const auto row = resp.row(i);
    for (std::size_t j = 0; j < k; ++j) {
      const double d = x[i] - mean_x[j];
      acc[j] += row[j] * d * d;
    }
  });
  std::vector<double> var_x(k), scale(k);
  for (std::size_t j = 0; j < k; ++j) {
    var_x[j] = second[j] / mass[j];
    const double sd = std::sqrt(var_x[j]);
    scale[j] = sd > 0.0 ? sd : 1.0;
  }

  // Pass 3: weighted Gram matrix and moment vector in the standardized basis.
  const std::size_t tri = dim * (dim + 1) / 2;
  const std::size_t stride = tri + dim;
  const auto gram = reducer.sum(n, k * stride, [&](std::size_t i, double* acc) {
    const auto row = resp.row(i);
    double t_pow[32];
    for (std::size_t j = 0; j < k; ++j) {
      const double w = row[j];
      if (w == 0.0) continue;
      const double t = (x[i] - mean_x[j]) / scale[j];
      t_pow[0] = 1.0;
      for (std::size_t l = 1; l < dim; ++l) t_pow[l] = t_pow[l - 1] * t;
      double* a = acc + j * stride;
      std::size_t idx = 0;
      for (std::size_t p = 0; p < dim; ++p) {
        const double wp = w * t_pow[p];
        for (std::size_t q = p; q < dim; ++q) a[idx++] += wp * t_pow[q];
        a[tri + p] += wp * y[i];
      }
    }
  });

  std::vector<ComponentParams> comps(k);
  for (std::size_t j = 0; j < k; ++j) {
    SymMatrix g(dim);
    const double* a = gram.data() + j * stride;
    std::size_t idx = 0;
    for (std::size_t p = 0; p < dim; ++p)
      for (std::size_t q = p; q < dim; ++q) g.set(p, q, a[idx++]);
    Vector gamma;
    try {
      gamma = solve_spd(g, std::span<const double>(a + tri, dim));
    } catch (const Error& e) {
      throw Error(ErrorCode::SingularDesign,
                  "weighted design of component " + std::to_string(j + 1) + " is singular (" + e.what() + ")");
    }
    comps[j].beta = scaled_to_monomial(gamma, mean_x[j], scale[j]);
    for (double b : comps[j].beta) check_finite(b, "regression coefficient");
    comps[j].mu_x = mean_x[j];
  }

  // Pass 4: weighted residual sum of squares.
  const auto rss = reducer.sum(n, k, [&](std::size_t i, double* acc) {
    const auto row = resp.row(i);
    for (std::size_t j = 0; j < k; ++j) {
      if (row[j] == 0.0) continue;
      const double e = y[i] - polyval(comps[j].beta, x[i]);
      acc[j] += row[j] * e * e;
    }
  });

  bool hit_floor = false;
  Vector weights(k);
  for (std::size_t j = 0; j < k; ++j) {
    weights[j] = mass[j] / static_cast<double>(n);
    double var_eps = rss[j] / mass[j];
    double vx = var_x[j];
    if (!(var_eps >= variance_floor)) {
      var_eps = variance_floor;
      hit_floor = true;
    }
    if (!(vx >= variance_floor)) {
      vx = variance_floor;
      hit_floor = true;
    }
    comps[j].sigma_eps = std::sqrt(var_eps);
    comps[j].sigma_x = std::sqrt(vx);
  }
  return {MixtureParams(std::move(weights), std::move(comps)), hit_floor};
}

}  // namespace polycwm::kernels::detail
