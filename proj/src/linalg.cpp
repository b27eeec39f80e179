#include "polycwm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "polycwm/error.hpp"

namespace polycwm {

SymMatrix SymMatrix::identity(std::size_t dim) {
  SymMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m.set(i, i, 1.0);
  return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> diag) {
  SymMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m.set(i, i, diag[i]);
  return m;
}

Vector SymMatrix::multiply(std::span<const double> v) const {
  if (v.size() != dim_) throw Error(ErrorCode::ShapeMismatch, "matrix-vector dimension mismatch");
  Vector out(dim_, 0.0);
  for (std::size_t i = 0; i < dim_; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) acc += data_[i * dim_ + j] * v[j];
    out[i] = acc;
  }
  return out;
}

SpdFactor::SpdFactor(const SymMatrix& a) : dim_(a.dim()), lower_(dim_ * dim_, 0.0), pivots_(dim_, 0.0) {
  if (dim_ == 0) throw Error(ErrorCode::ShapeMismatch, "empty matrix");
  double max_diag = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    const double d = a(i, i);
    if (!std::isfinite(d)) throw Error(ErrorCode::SingularMatrix, "non-finite diagonal entry");
    max_diag = std::max(max_diag, std::abs(d));
  }
  const double floor = kPivotFloor * max_diag;

  for (std::size_t j = 0; j < dim_; ++j) {
    double d = a(j, j);
    for (std::size_t p = 0; p < j; ++p) d -= lower_[j * dim_ + p] * lower_[j * dim_ + p] * pivots_[p];
    if (!(d > floor)) {
      throw Error(ErrorCode::SingularMatrix, "pivot " + std::to_string(j) + " below relative floor");
    }
    pivots_[j] = d;
    lower_[j * dim_ + j] = 1.0;
    for (std::size_t i = j + 1; i < dim_; ++i) {
      double v = a(i, j);
      for (std::size_t p = 0; p < j; ++p) v -= lower_[i * dim_ + p] * lower_[j * dim_ + p] * pivots_[p];
      lower_[i * dim_ + j] = v / d;
    }
  }
}

Vector SpdFactor::solve(std::span<const double> b) const {
  if (b.size() != dim_) throw Error(ErrorCode::ShapeMismatch, "rhs dimension mismatch");
  Vector x(b.begin(), b.end());
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t p = 0; p < i; ++p) x[i] -= lower_[i * dim_ + p] * x[p];
  }
  for (std::size_t i = 0; i < dim_; ++i) x[i] /= pivots_[i];
  for (std::size_t i = dim_; i-- > 0;) {
    for (std::size_t p = i + 1; p < dim_; ++p) x[i] -= lower_[p * dim_ + i] * x[p];
  }
  return x;
}

SymMatrix SpdFactor::inverse() const {
  SymMatrix inv(dim_);
  Vector e(dim_, 0.0);
  for (std::size_t j = 0; j < dim_; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    const Vector col = solve(e);
    for (std::size_t i = j; i < dim_; ++i) inv.set(i, j, col[i]);
  }
  return inv;
}

Vector vandermonde(double x, int degree) {
  if (degree < 0) throw Error(ErrorCode::InvalidArgument, "negative polynomial degree");
  Vector v(static_cast<std::size_t>(degree) + 1);
  double p = 1.0;
  for (auto& e : v) {
    e = p;
    p *= x;
  }
  return v;
}

Vector solve_spd(const SymMatrix& a, std::span<const double> b) { return SpdFactor(a).solve(b); }

double log_sum_exp(std::span<const double> values) {
  double max = -std::numeric_limits<double>::infinity();
  for (double v : values) max = std::max(max, v);
  if (values.empty() || max == -std::numeric_limits<double>::infinity()) {
    throw Error(ErrorCode::AllNegInfinity, "log_sum_exp of all -inf");
  }
  if (max == std::numeric_limits<double>::infinity()) return max;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - max);
  return max + std::log(sum);
}

double log_normal_pdf(double x, double mu, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::NonPositiveScale, "sigma must be positive");
  constexpr double kHalfLog2Pi = 0.91893853320467274178;
  const double z = (x - mu) / sigma;
  return -kHalfLog2Pi - std::log(sigma) - 0.5 * z * z;
}

double polyval(std::span<const double> beta, double x) noexcept {
  double acc = 0.0;
  for (std::size_t l = beta.size(); l-- > 0;) acc = acc * x + beta[l];
  return acc;
}

std::vector<double> scaled_to_monomial_matrix(int degree, double center, double scale) {
  const auto dim = static_cast<std::size_t>(degree) + 1;
  // Pascal rows for binomial coefficients.
  std::vector<double> binom(dim * dim, 0.0);
  for (std::size_t l = 0; l < dim; ++l) {
    binom[l * dim] = 1.0;
    for (std::size_t p = 1; p <= l; ++p) binom[l * dim + p] = binom[(l - 1) * dim + p - 1] + binom[(l - 1) * dim + p];
  }
  // t^l = s^-l sum_p C(l,p) x^p (-c)^(l-p); out[p * dim + l] is the weight of gamma_l in beta_p.
  std::vector<double> out(dim * dim, 0.0);
  double inv_scale_pow = 1.0;
  for (std::size_t l = 0; l < dim; ++l) {
    double neg_c_pow = 1.0;
    for (std::size_t q = 0; q <= l; ++q) {
      const std::size_t p = l - q;
      out[p * dim + l] = binom[l * dim + p] * neg_c_pow * inv_scale_pow;
      neg_c_pow *= -center;
    }
    inv_scale_pow /= scale;
  }
  return out;
}

Vector scaled_to_monomial(std::span<const double> gamma, double center, double scale) {
  const auto dim = gamma.size();
  const auto t = scaled_to_monomial_matrix(static_cast<int>(dim) - 1, center, scale);
  Vector beta(dim, 0.0);
  for (std::size_t p = 0; p < dim; ++p) {
    double acc = 0.0;
    for (std::size_t l = p; l < dim; ++l) acc += t[p * dim + l] * gamma[l];
    beta[p] = acc;
  }
  return beta;
}

}  // namespace polycwm
