#include <doctest.h>

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "helpers.hpp"
#include "oracles.hpp"
#include "polycwm/em.hpp"
#include "polycwm/error.hpp"
#include "polycwm/model.hpp"

using namespace polycwm;
using testing_support::random_params;

namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

ComponentParams standard_line() { return {{0.0, 1.0}, 1.0, 0.0, 1.0}; }

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidArgument;
}

// sum_i log sum_j pi_j f_j, with labeled rows contributing only their own term
double naive_loglik(const Dataset& d, const MixtureParams& psi) {
  double total = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double x = d.x()[i], y = d.y()[i];
    auto term = [&](std::size_t j) {
      const auto& c = psi.component(j);
      return psi.weight(j) * oracle::normal_pdf(y, oracle::poly(c.beta, x), c.sigma_eps) *
             oracle::normal_pdf(x, c.mu_x, c.sigma_x);
    };
    if (i < d.num_labeled()) {
      total += std::log(term(d.labels()[i]));
    } else {
      double s = 0.0;
      for (std::size_t j = 0; j < psi.num_components(); ++j) s += term(j);
      total += std::log(s);
    }
  }
  return total;
}

}  // namespace

TEST_CASE("dataset stores labeled rows first and remembers input order") {
  std::vector<std::optional<std::size_t>> labels{std::nullopt, 1, std::nullopt, 0};
  Dataset d({1, 2, 3, 4}, {10, 20, 30, 40}, labels, {0, 1, 0, 0});
  REQUIRE(d.size() == 4);
  CHECK(d.num_labeled() == 2);
  CHECK(d.num_unlabeled() == 2);
  CHECK(std::vector<double>(d.x().begin(), d.x().end()) == std::vector<double>{2, 4, 1, 3});
  CHECK(std::vector<double>(d.y().begin(), d.y().end()) == std::vector<double>{20, 40, 10, 30});
  CHECK(d.labels()[0] == 1);
  CHECK(d.labels()[1] == 0);
  CHECK(std::vector<std::size_t>(d.truth().begin(), d.truth().end()) == std::vector<std::size_t>{1, 0, 0, 0});
  CHECK(d.to_input_order(d.x()) == std::vector<double>{1, 2, 3, 4});

  const auto plain = d.without_labels();
  CHECK(plain.num_labeled() == 0);
  CHECK(std::vector<double>(plain.x().begin(), plain.x().end()) == std::vector<double>{1, 2, 3, 4});
  CHECK(plain.has_truth());
}

TEST_CASE("dataset validation") {
  CHECK(code_of([] { Dataset({}, {}); }) == ErrorCode::InsufficientData);
  CHECK(code_of([] { Dataset({1, 2}, {1}); }) == ErrorCode::LengthMismatch);
  CHECK(code_of([] { Dataset({1, std::nan("")}, {1, 2}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { Dataset({1, 2}, {1, 2}, {std::nullopt}); }) == ErrorCode::LengthMismatch);
  Dataset d({1, 2}, {1, 2}, {2, std::nullopt});
  CHECK(code_of([&] { d.validate_labels(2); }) == ErrorCode::LabelOutOfRange);
  CHECK_NOTHROW(d.validate_labels(3));
}

TEST_CASE("mixture parameter validation") {
  const auto c = standard_line();
  CHECK_NOTHROW(MixtureParams({0.5, 0.5}, {c, c}));
  CHECK(code_of([&] { MixtureParams({0.6, 0.5}, {c, c}); }) == ErrorCode::InvalidParameters);
  CHECK(code_of([&] { MixtureParams({1.0, 0.0}, {c, c}); }) == ErrorCode::InvalidParameters);
  CHECK(code_of([&] { MixtureParams({1.0}, {c, c}); }) == ErrorCode::InvalidParameters);
  auto cubic = c;
  cubic.beta = {0, 0, 0, 1};
  CHECK(code_of([&] { MixtureParams({0.5, 0.5}, {c, cubic}); }) == ErrorCode::InvalidParameters);
  auto bad = c;
  bad.sigma_x = 0.0;
  CHECK(code_of([&] { MixtureParams({1.0}, {bad}); }) == ErrorCode::NonPositiveScale);
  bad = c;
  bad.sigma_eps = -1.0;
  CHECK(code_of([&] { MixtureParams({1.0}, {bad}); }) == ErrorCode::NonPositiveScale);
}

TEST_CASE("component density") {
  CHECK(log_component_density(0, 0, standard_line()) == doctest::Approx(-1.8378770664).epsilon(1e-10));

  ComponentParams c{{0.5, -1.2, 0.3}, 0.8, 1.0, 2.0};
  const double x = 0.7;
  const double cond = log_component_density(x, c.regression_mean(x), c) - log_normal_pdf(x, c.mu_x, c.sigma_x);
  CHECK(cond == doctest::Approx(-kHalfLog2Pi - std::log(0.8)).epsilon(1e-14));

  ComponentParams fitted{{0.030, -1.004, 0.041, 0.114}, 1.586, -2.046, 1.022};
  const double y = 0.030 - 1.004 * (-2) + 0.041 * 4 + 0.114 * (-8);
  const double marginal = log_normal_pdf(-2.0, fitted.mu_x, fitted.sigma_x);
  CHECK(log_component_density(-2.0, y, fitted) - marginal ==
        doctest::Approx(-kHalfLog2Pi - std::log(1.586)).epsilon(1e-13));

  CHECK_THROWS_AS(log_component_density(0, 0, ComponentParams{{0}, 0.0, 0, 1}), Error);
  CHECK(log_component_density(1, 2, c, DensityModel::ConditionalOnly) ==
        doctest::Approx(log_normal_pdf(2, c.regression_mean(1), 0.8)));
  CHECK(log_component_density(1, 2, c, DensityModel::MarginalOnly) == doctest::Approx(log_normal_pdf(1, 1, 2)));
}

TEST_CASE("mixture density") {
  const auto c = standard_line();
  const MixtureParams single({1.0}, {c});
  CHECK(log_mixture_density(0.3, -0.2, single) == doctest::Approx(log_component_density(0.3, -0.2, c)).epsilon(1e-15));

  const MixtureParams twins({0.5, 0.5}, {c, c});
  CHECK(log_mixture_density(0.3, -0.2, twins) == doctest::Approx(log_component_density(0.3, -0.2, c)).epsilon(1e-14));

  auto far = c;
  far.mu_x = 10.0;
  const MixtureParams split({0.5, 0.5}, {c, far});
  const double expected = std::log(0.5) + log_component_density(0, 0, c);
  CHECK(std::fabs(log_mixture_density(0, 0, split) - expected) < 1e-12);

  // label switching
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const auto psi = random_params(rng, 3, 2);
    const auto swapped = psi.permuted(std::vector<std::size_t>{2, 0, 1});
    const double x = rng.normal(), y = rng.normal();
    CHECK(log_mixture_density(x, y, psi) == doctest::Approx(log_mixture_density(x, y, swapped)).epsilon(1e-13));
  }
}

TEST_CASE("observed log-likelihood") {
  const auto d = testing_support::random_dataset(3, 40, 1, 2);
  Rng rng(4);
  const auto psi = random_params(rng, 1, 2);
  double direct = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) direct += log_component_density(d.x()[i], d.y()[i], psi.component(0));
  CHECK(observed_loglik(d, psi) == doctest::Approx(direct).epsilon(1e-13));

  std::vector<std::optional<std::size_t>> all(d.size(), std::size_t{0});
  const auto labeled = d.relabeled(all);
  CHECK(observed_loglik(labeled, psi) == doctest::Approx(direct).epsilon(1e-13));

  // mixed labels, against naive arithmetic
  for (int trial = 0; trial < 20; ++trial) {
    const auto data = testing_support::random_dataset(100 + trial, 60, 3, 2);
    std::vector<std::optional<std::size_t>> labels(data.size());
    for (std::size_t i = 0; i < data.size(); i += 3) labels[i] = rng.uniform_index(3);
    const auto mixed = data.relabeled(labels);
    const auto p = testing_support::generating_params(100 + trial, 3, 2);
    CHECK(observed_loglik(mixed, p) == doctest::Approx(naive_loglik(mixed, p)).epsilon(1e-11));
  }

  std::vector<std::optional<std::size_t>> too_big(d.size());
  too_big[0] = 4;
  CHECK(code_of([&] { observed_loglik(d.relabeled(too_big), psi); }) == ErrorCode::LabelOutOfRange);
}

TEST_CASE("complete log-likelihood") {
  const auto d = testing_support::random_dataset(8, 50, 2, 3);
  Rng rng(8);
  const auto psi = random_params(rng, 2, 3);

  std::vector<std::size_t> ones(d.size(), 0);
  const auto hard = Responsibilities::hard(ones, 2);
  double expected = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i)
    expected += std::log(psi.weight(0)) + log_component_density(d.x()[i], d.y()[i], psi.component(0));
  CHECK(complete_loglik(d, psi, hard) == doctest::Approx(expected).epsilon(1e-13));

  const auto single = random_params(rng, 1, 3);
  const auto resp1 = e_step(d, single);
  CHECK(complete_loglik(d, single, resp1) == doctest::Approx(observed_loglik(d, single)).epsilon(1e-13));

  CHECK(code_of([&] { complete_loglik(d, psi, Responsibilities(d.size(), 3)); }) == ErrorCode::ShapeMismatch);
  CHECK(code_of([&] { complete_loglik(d, psi, Responsibilities(d.size() - 1, 2)); }) == ErrorCode::ShapeMismatch);
}

TEST_CASE("complete log-likelihood is bounded by the observed one at the posteriors") {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 1 + rng.uniform_index(4);
    const int r = static_cast<int>(rng.uniform_index(4));
    const auto d = testing_support::random_dataset(500 + trial, 30, k, r);
    const auto psi = random_params(rng, k, r);
    const auto resp = e_step(d, psi);
    CHECK(complete_loglik(d, psi, resp) <= observed_loglik(d, psi) + 1e-9);
  }
}

TEST_CASE("complete log-likelihood splits into weight, marginal and regression parts") {
  Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const auto d = testing_support::random_dataset(900 + trial, 45, 3, 2);
    const auto psi = testing_support::generating_params(900 + trial, 3, 2);
    Responsibilities resp(d.size(), 3);
    for (std::size_t i = 0; i < d.size(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < 3; ++j) s += (resp(i, j) = rng.uniform());
      for (std::size_t j = 0; j < 3; ++j) resp(i, j) /= s;
    }
    double l1 = 0.0, l2 = 0.0, l3 = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        const auto& c = psi.component(j);
        const double z = resp(i, j);
        l1 += z * std::log(psi.weight(j));
        const double ex = (d.x()[i] - c.mu_x) / c.sigma_x;
        const double ey = (d.y()[i] - oracle::poly(c.beta, d.x()[i])) / c.sigma_eps;
        l2 += z * (-kHalfLog2Pi - std::log(c.sigma_x) - 0.5 * ex * ex);
        l3 += z * (-kHalfLog2Pi - std::log(c.sigma_eps) - 0.5 * ey * ey);
      }
    }
    CHECK(complete_loglik(d, psi, resp) == doctest::Approx(l1 + l2 + l3).epsilon(1e-10));
  }
}

TEST_CASE("hard responsibilities matching the assignment reproduce the labeled likelihood") {
  const auto d = testing_support::random_dataset(77, 40, 2, 1);
  Rng rng(77);
  const auto psi = random_params(rng, 2, 1);
  std::vector<std::optional<std::size_t>> labels(d.size());
  const auto input_truth = d.to_input_order(d.truth());
  for (std::size_t i = 0; i < d.size(); ++i) labels[i] = input_truth[i];
  const auto labeled = d.relabeled(labels);
  const auto hard = Responsibilities::hard(labeled.labels(), 2);
  CHECK(complete_loglik(labeled, psi, hard) == doctest::Approx(observed_loglik(labeled, psi)).epsilon(1e-13));
}

TEST_CASE("responsibilities helpers") {
  const auto hard = Responsibilities::hard(std::vector<std::size_t>{1, 0, 2}, 3);
  CHECK(hard(0, 1) == 1.0);
  CHECK(hard(1, 0) == 1.0);
  CHECK(hard(2, 2) == 1.0);
  CHECK(hard(0, 0) == 0.0);
  CHECK(code_of([] { Responsibilities::hard(std::vector<std::size_t>{3}, 3); }) == ErrorCode::LabelOutOfRange);
}
