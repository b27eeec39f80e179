#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "polycwm/linalg.hpp"

namespace polycwm {

// Component indices are 0-based inside the library. Conversion to the
// 1-based indices used in files and on the command line happens in io/cli.

// Bivariate sample with the labeled rows stored first. The constructor takes
// rows in input order and records the permutation, so results can be mapped
// back with to_input_order().
class Dataset {
 public:
  Dataset() = default;

  // labels: empty, or one optional component index per row.
  // truth: empty, or one reference label per row. Truth is never used for
  // fitting; it only feeds evaluation (ARI against known classes).
  Dataset(std::vector<double> x, std::vector<double> y, std::vector<std::optional<std::size_t>> labels = {},
          std::vector<std::size_t> truth = {});

  std::size_t size() const noexcept { return x_.size(); }
  std::size_t num_labeled() const noexcept { return labels_.size(); }
  std::size_t num_unlabeled() const noexcept { return size() - num_labeled(); }

  std::span<const double> x() const noexcept { return x_; }
  std::span<const double> y() const noexcept { return y_; }
  // Known labels for internal rows 0..m-1.
  std::span<const std::size_t> labels() const noexcept { return labels_; }
  bool has_truth() const noexcept { return !truth_.empty(); }
  // Reference labels in internal order.
  std::span<const std::size_t> truth() const noexcept { return truth_; }
  // internal row -> input row
  std::span<const std::size_t> input_index() const noexcept { return input_index_; }

  // Throws LabelOutOfRange unless every known label is < k.
  void validate_labels(std::size_t k) const;

  template <typename T>
  std::vector<T> to_input_order(std::span<const T> internal) const {
    std::vector<T> out(internal.size());
    for (std::size_t i = 0; i < internal.size(); ++i) out[input_index_[i]] = internal[i];
    return out;
  }

  // Same observations in input order, with a new set of known labels.
  Dataset relabeled(std::vector<std::optional<std::size_t>> labels_in_input_order) const;
  // Same observations in input order with no known labels (truth kept).
  Dataset without_labels() const;

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<std::size_t> labels_;
  std::vector<std::size_t> truth_;
  std::vector<std::size_t> input_index_;
};

struct ComponentParams {
  Vector beta;            // beta_0 .. beta_r
  double sigma_eps = 1.0; // residual standard deviation
  double mu_x = 0.0;
  double sigma_x = 1.0;

  int degree() const noexcept { return static_cast<int>(beta.size()) - 1; }
  double regression_mean(double x) const noexcept { return polyval(beta, x); }
};

class MixtureParams {
 public:
  MixtureParams() = default;
  // Validates positivity, unit sum (1e-12), shared degree and finite entries.
  MixtureParams(Vector weights, std::vector<ComponentParams> components);

  std::size_t num_components() const noexcept { return weights_.size(); }
  int degree() const noexcept { return components_.front().degree(); }
  std::span<const double> weights() const noexcept { return weights_; }
  double weight(std::size_t j) const noexcept { return weights_[j]; }
  const ComponentParams& component(std::size_t j) const noexcept { return components_[j]; }
  std::span<const ComponentParams> components() const noexcept { return components_; }

  // Returns a copy with components (and weights) reordered: new j = old order[j].
  MixtureParams permuted(std::span<const std::size_t> order) const;

 private:
  Vector weights_;
  std::vector<ComponentParams> components_;
};

// n x k row-major matrix of posterior membership probabilities.
class Responsibilities {
 public:
  Responsibilities() = default;
  Responsibilities(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }

  // One-hot rows from a label per row.
  static Responsibilities hard(std::span<const std::size_t> labels, std::size_t cols);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Which factors of the component density enter the posterior and likelihood.
// Cwm is the cluster-weighted model; the other two are the reference
// mixtures of regressions (Y|x only) and of Gaussians on X.
enum class DensityModel { Cwm, ConditionalOnly, MarginalOnly };

double log_component_density(double x, double y, const ComponentParams& c,
                             DensityModel model = DensityModel::Cwm);

double log_mixture_density(double x, double y, const MixtureParams& psi,
                           DensityModel model = DensityModel::Cwm);

double observed_loglik(const Dataset& data, const MixtureParams& psi, DensityModel model = DensityModel::Cwm);

double complete_loglik(const Dataset& data, const MixtureParams& psi, const Responsibilities& resp);

}  // namespace polycwm
