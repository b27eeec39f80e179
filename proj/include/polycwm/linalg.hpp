#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace polycwm {

using Vector = std::vector<double>;

// Dense symmetric matrix. Writes go through set(), which mirrors the entry,
// so symmetry is exact at all times.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, 0.0) {}

  static SymMatrix identity(std::size_t dim);
  static SymMatrix diagonal(std::span<const double> diag);

  std::size_t dim() const noexcept { return dim_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * dim_ + j]; }
  void set(std::size_t i, std::size_t j, double v) noexcept {
    data_[i * dim_ + j] = v;
    data_[j * dim_ + i] = v;
  }
  void add(std::size_t i, std::size_t j, double v) noexcept {
    data_[i * dim_ + j] += v;
    if (i != j) data_[j * dim_ + i] += v;
  }

  Vector multiply(std::span<const double> v) const;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

// LDL' factorization of a symmetric positive-definite matrix. Throws
// SingularMatrix when a pivot drops below kPivotFloor times the largest
// diagonal entry.
class SpdFactor {
 public:
  static constexpr double kPivotFloor = 1e-12;

  explicit SpdFactor(const SymMatrix& a);

  std::size_t dim() const noexcept { return dim_; }
  Vector solve(std::span<const double> b) const;
  SymMatrix inverse() const;

 private:
  std::size_t dim_;
  std::vector<double> lower_;  // unit lower triangle, row-major
  std::vector<double> pivots_;
};

// (1, x, x^2, ..., x^degree)
Vector vandermonde(double x, int degree);

Vector solve_spd(const SymMatrix& a, std::span<const double> b);

double log_sum_exp(std::span<const double> values);

double log_normal_pdf(double x, double mu, double sigma);

// Evaluates sum_l beta_l x^l by Horner's rule.
double polyval(std::span<const double> beta, double x) noexcept;

// Coefficients of sum_l gamma_l ((x - center)/scale)^l re-expressed in the
// monomial basis of x. Also available as the (degree+1)^2 linear map.
Vector scaled_to_monomial(std::span<const double> gamma, double center, double scale);
std::vector<double> scaled_to_monomial_matrix(int degree, double center, double scale);

}  // namespace polycwm
