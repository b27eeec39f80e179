#include "polycwm/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "polycwm/error.hpp"
#include "polycwm/kernels.hpp"

namespace polycwm {

Dataset::Dataset(std::vector<double> x, std::vector<double> y, std::vector<std::optional<std::size_t>> labels,
                 std::vector<std::size_t> truth) {
  const std::size_t n = x.size();
  if (n == 0) throw Error(ErrorCode::InsufficientData, "dataset needs at least one observation");
  if (y.size() != n) throw Error(ErrorCode::LengthMismatch, "x and y lengths differ");
  if (!labels.empty() && labels.size() != n) throw Error(ErrorCode::LengthMismatch, "labels length differs from n");
  if (!truth.empty() && truth.size() != n) throw Error(ErrorCode::LengthMismatch, "truth length differs from n");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw Error(ErrorCode::InvalidArgument, "non-finite observation at row " + std::to_string(i));
    }
  }

  input_index_.reserve(n);
  if (!labels.empty()) {
    for (std::size_t i = 0; i < n; ++i)
      if (labels[i]) input_index_.push_back(i);
    for (std::size_t i = 0; i < n; ++i)
      if (!labels[i]) input_index_.push_back(i);
  } else {
    for (std::size_t i = 0; i < n; ++i) input_index_.push_back(i);
  }

  x_.resize(n);
  y_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t src = input_index_[i];
    x_[i] = x[src];
    y_[i] = y[src];
    if (!labels.empty() && labels[src]) labels_.push_back(*labels[src]);
  }
  if (!truth.empty()) {
    truth_.resize(n);
    for (std::size_t i = 0; i < n; ++i) truth_[i] = truth[input_index_[i]];
  }
}

void Dataset::validate_labels(std::size_t k) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] >= k) {
      throw Error(ErrorCode::LabelOutOfRange, "label " + std::to_string(labels_[i] + 1) + " of input row " +
                                                  std::to_string(input_index_[i] + 1) + " exceeds k=" +
                                                  std::to_string(k));
    }
  }
}

Dataset Dataset::relabeled(std::vector<std::optional<std::size_t>> labels_in_input_order) const {
  const auto xs = to_input_order<double>(x_);
  const auto ys = to_input_order<double>(y_);
  std::vector<std::size_t> truth;
  if (has_truth()) truth = to_input_order<std::size_t>(truth_);
  return Dataset(xs, ys, std::move(labels_in_input_order), std::move(truth));
}

Dataset Dataset::without_labels() const { return relabeled({}); }

MixtureParams::MixtureParams(Vector weights, std::vector<ComponentParams> components)
    : weights_(std::move(weights)), components_(std::move(components)) {
  if (weights_.empty()) throw Error(ErrorCode::InvalidParameters, "mixture needs at least one component");
  if (weights_.size() != components_.size()) throw Error(ErrorCode::InvalidParameters, "weights/components size mismatch");
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w > 0.0) || !std::isfinite(w)) throw Error(ErrorCode::InvalidParameters, "weights must be positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw Error(ErrorCode::InvalidParameters, "weights must sum to 1");
  const std::size_t dim = components_.front().beta.size();
  if (dim == 0) throw Error(ErrorCode::InvalidParameters, "empty coefficient vector");
  for (const auto& c : components_) {
    if (c.beta.size() != dim) throw Error(ErrorCode::InvalidParameters, "components must share one degree");
    for (double b : c.beta)
      if (!std::isfinite(b)) throw Error(ErrorCode::InvalidParameters, "non-finite regression coefficient");
    if (!(c.sigma_eps > 0.0) || !(c.sigma_x > 0.0) || !std::isfinite(c.sigma_eps) || !std::isfinite(c.sigma_x)) {
      throw Error(ErrorCode::NonPositiveScale, "component scales must be positive and finite");
    }
    if (!std::isfinite(c.mu_x)) throw Error(ErrorCode::InvalidParameters, "non-finite marginal mean");
  }
}

MixtureParams MixtureParams::permuted(std::span<const std::size_t> order) const {
  if (order.size() != num_components()) throw Error(ErrorCode::ShapeMismatch, "permutation size mismatch");
  Vector w;
  std::vector<ComponentParams> c;
  for (auto j : order) {
    w.push_back(weights_.at(j));
    c.push_back(components_.at(j));
  }
  return MixtureParams(std::move(w), std::move(c));
}

Responsibilities Responsibilities::hard(std::span<const std::size_t> labels, std::size_t cols) {
  Responsibilities r(labels.size(), cols);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= cols) throw Error(ErrorCode::LabelOutOfRange, "hard label exceeds column count");
    r(i, labels[i]) = 1.0;
  }
  return r;
}

double log_component_density(double x, double y, const ComponentParams& c, DensityModel model) {
  double out = 0.0;
  if (model != DensityModel::MarginalOnly) out += log_normal_pdf(y, c.regression_mean(x), c.sigma_eps);
  if (model != DensityModel::ConditionalOnly) out += log_normal_pdf(x, c.mu_x, c.sigma_x);
  return out;
}

double log_mixture_density(double x, double y, const MixtureParams& psi, DensityModel model) {
  const std::size_t k = psi.num_components();
  std::vector<double> terms(k);
  for (std::size_t j = 0; j < k; ++j) terms[j] = std::log(psi.weight(j)) + log_component_density(x, y, psi.component(j), model);
  return log_sum_exp(terms);
}

double observed_loglik(const Dataset& data, const MixtureParams& psi, DensityModel model) {
  data.validate_labels(psi.num_components());
  return kernels::omp::loglik(data, psi, model);
}

double complete_loglik(const Dataset& data, const MixtureParams& psi, const Responsibilities& resp) {
  const std::size_t k = psi.num_components();
  if (resp.rows() != data.size() || resp.cols() != k) throw Error(ErrorCode::ShapeMismatch, "responsibilities must be n x k");
  data.validate_labels(k);
  std::vector<double> log_w(k);
  for (std::size_t j = 0; j < k; ++j) log_w[j] = std::log(psi.weight(j));
  const auto x = data.x();
  const auto y = data.y();
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double z = resp(i, j);
      if (z == 0.0) continue;
      total += z * (log_w[j] + log_component_density(x[i], y[i], psi.component(j)));
    }
  }
  return total;
}

}  // namespace polycwm
