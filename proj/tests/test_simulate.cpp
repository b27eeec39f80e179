#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "helpers.hpp"
#include "oracles.hpp"
#include "polycwm/error.hpp"
#include "polycwm/evaluation.hpp"
#include "polycwm/simulate.hpp"

using namespace polycwm;

namespace {

double max_gap(const Responsibilities& a, const Responsibilities& b) {
  double g = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) g = std::max(g, std::fabs(a(i, j) - b(i, j)));
  return g;
}

Dataset scattered_points(Rng& rng, std::size_t n) {
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = testing_support::uniform(rng, -6, 6);
    y[i] = testing_support::uniform(rng, -10, 10);
  }
  return Dataset(std::move(x), std::move(y));
}

}  // namespace

TEST_CASE("equal x-marginals give the conditional mixture posteriors") {
  Rng rng(51);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + rng.uniform_index(3);
    const int r = static_cast<int>(rng.uniform_index(4));
    auto psi = testing_support::random_params(rng, k, r);
    std::vector<ComponentParams> comps(psi.components().begin(), psi.components().end());
    for (auto& c : comps) {
      c.mu_x = comps[0].mu_x;
      c.sigma_x = comps[0].sigma_x;
    }
    psi = MixtureParams(Vector(psi.weights().begin(), psi.weights().end()), std::move(comps));
    const auto d = scattered_points(rng, 100);
    worst = std::max(worst, max_gap(posteriors(d, psi, DensityModel::Cwm), posteriors(d, psi, DensityModel::ConditionalOnly)));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("equal regressions give the x-mixture posteriors") {
  Rng rng(52);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + rng.uniform_index(3);
    const int r = static_cast<int>(rng.uniform_index(4));
    auto psi = testing_support::random_params(rng, k, r);
    std::vector<ComponentParams> comps(psi.components().begin(), psi.components().end());
    for (auto& c : comps) {
      c.beta = comps[0].beta;
      c.sigma_eps = comps[0].sigma_eps;
    }
    psi = MixtureParams(Vector(psi.weights().begin(), psi.weights().end()), std::move(comps));
    const auto d = scattered_points(rng, 100);
    worst = std::max(worst, max_gap(posteriors(d, psi, DensityModel::Cwm), posteriors(d, psi, DensityModel::MarginalOnly)));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("single-component reference fits") {
  const auto d = testing_support::random_dataset(53, 300, 1, 2);
  const auto fmr = fit_reference_fmr(d, 1, 2, FitConfig{});
  const auto ols = ols_polyfit(d.x(), d.y(), 2);
  for (std::size_t l = 0; l < 3; ++l) {
    CHECK(fmr.psi_hat.component(0).beta[l] == doctest::Approx(ols.coefficients[l].estimate).epsilon(1e-10).scale(1.0));
  }
  // ML residual scale divides by n, OLS by n - r - 1
  CHECK(fmr.psi_hat.component(0).sigma_eps == doctest::Approx(std::sqrt(ols.rss / 300.0)).epsilon(1e-10));

  const auto gmm = fit_reference_gmm_x(d, 1, FitConfig{});
  const auto x = d.x();
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / 300.0;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  CHECK(gmm.psi_hat.component(0).mu_x == doctest::Approx(mean).epsilon(1e-12));
  CHECK(gmm.psi_hat.component(0).sigma_x == doctest::Approx(std::sqrt(ss / 300.0)).epsilon(1e-12));
}

TEST_CASE("x-mixture MAP matches the analytic density crossing") {
  std::vector<ComponentParams> comps{{{0.0}, 1.0, -4.0, 1.0}, {{0.0}, 1.0, 4.0, 1.6}};
  const MixtureParams psi({0.45, 0.55}, std::move(comps));
  const auto d = sample(Generator{psi, std::nullopt, 54}, 600);
  // random hard starts begin near the pooled fit, where the default
  // tolerance can stop early
  FitConfig cfg;
  cfg.epsilon = 1e-8;
  const auto f = fit_reference_gmm_x(d, 2, cfg);

  // log(w1 phi1) = log(w2 phi2) is a quadratic in x
  const auto& a = f.psi_hat.component(0);
  const auto& b = f.psi_hat.component(1);
  const double wa = f.psi_hat.weight(0), wb = f.psi_hat.weight(1);
  const double qa = 0.5 / (b.sigma_x * b.sigma_x) - 0.5 / (a.sigma_x * a.sigma_x);
  const double qb = a.mu_x / (a.sigma_x * a.sigma_x) - b.mu_x / (b.sigma_x * b.sigma_x);
  const double qc = 0.5 * b.mu_x * b.mu_x / (b.sigma_x * b.sigma_x) - 0.5 * a.mu_x * a.mu_x / (a.sigma_x * a.sigma_x) +
                    std::log(wa / a.sigma_x) - std::log(wb / b.sigma_x);
  // qa x^2 + qb x + qc > 0 exactly where component a wins
  const double disc = std::sqrt(qb * qb - 4.0 * qa * qc);
  const double r1 = std::min((-qb - disc) / (2.0 * qa), (-qb + disc) / (2.0 * qa));
  const double r2 = std::max((-qb - disc) / (2.0 * qa), (-qb + disc) / (2.0 * qa));
  const bool a_inside = qa < 0.0;
  const auto x = d.x();
  for (std::size_t i = 0; i < d.size(); ++i) {
    const bool inside = x[i] > r1 && x[i] < r2;
    CHECK(f.map_labels[i] == ((inside == a_inside) ? 0u : 1u));
  }
  CHECK(adjusted_rand_index(f.map_labels, d.truth()) > 0.95);
}

TEST_CASE("sample counts and reproducibility") {
  const auto a = sample(benchmark_generator(55), 700);
  const auto b = sample(benchmark_generator(55), 700);
  const auto c = sample(benchmark_generator(56), 700);
  CHECK(std::equal(a.x().begin(), a.x().end(), b.x().begin()));
  CHECK(std::equal(a.y().begin(), a.y().end(), b.y().begin()));
  CHECK_FALSE(std::equal(a.x().begin(), a.x().end(), c.x().begin()));
  const auto truth = a.truth();
  CHECK(std::count(truth.begin(), truth.end(), 0u) == 400);
  CHECK(std::count(truth.begin(), truth.end(), 1u) == 300);
  CHECK(a.num_labeled() == 0);
  CHECK_THROWS_AS(sample(benchmark_generator(1), 699), Error);

  double mean = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (truth[i] == 0) mean += a.x()[i];
  CHECK(std::fabs(mean / 400.0 + 2.0) < 3.0 / std::sqrt(400.0));

  MixtureParams psi({0.3, 0.7}, {ComponentParams{{0.0}, 1.0, 0.0, 1.0}, ComponentParams{{0.0}, 1.0, 0.0, 1.0}});
  const auto m = sample(Generator{psi, std::nullopt, 57}, 10000);
  const auto mt = m.truth();
  const double ones = static_cast<double>(std::count(mt.begin(), mt.end(), 0u));
  CHECK(std::fabs(ones - 3000.0) < 4.0 * std::sqrt(10000.0 * 0.3 * 0.7));
}

TEST_CASE("sample moments and degenerate scales") {
  MixtureParams psi({1.0}, {ComponentParams{{0.5, -1.0}, 0.8, 1.5, 2.0}});
  const std::size_t n = 100000;
  const auto d = sample(Generator{psi, std::nullopt, 58}, n);
  double s = 0.0, ss = 0.0;
  for (double v : d.x()) {
    s += v;
    ss += v * v;
  }
  const double mean = s / n;
  const double sd = std::sqrt(ss / n - mean * mean);
  CHECK(std::fabs(mean - 1.5) < 3.0 * 2.0 / std::sqrt(n));
  CHECK(std::fabs(sd - 2.0) < 3.0 * 2.0 / std::sqrt(2.0 * n));

  MixtureParams flat({1.0}, {ComponentParams{{3.0}, 1e-10, -1.0, 1e-10}});
  const auto p = sample(Generator{flat, std::nullopt, 59}, 50);
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(std::fabs(p.x()[i] + 1.0) < 1e-8);
    CHECK(std::fabs(p.y()[i] - 3.0) < 1e-8);
  }
}

TEST_CASE("quantiles and level summaries") {
  CHECK(quantile({1, 2, 3, 4}, 0.25) == doctest::Approx(1.75));
  CHECK(quantile({4, 1, 3, 2}, 0.5) == doctest::Approx(2.5));
  CHECK(quantile({1, 2, 3, 4}, 0.0) == 1.0);
  CHECK(quantile({1, 2, 3, 4}, 1.0) == 4.0);
  CHECK(quantile({7}, 0.3) == 7.0);
  CHECK(quantile({0, 10}, 0.975) == doctest::Approx(9.75));

  Rng rng(60);
  std::vector<double> v(37);
  for (auto& e : v) e = rng.normal();
  const auto s = summarize(5, v);
  CHECK(s.m == 5);
  CHECK(s.successes == 37);
  CHECK(s.q025 <= s.q05);
  CHECK(s.q05 <= s.q95);
  CHECK(s.q95 <= s.q975);
  double mean = 0.0;
  for (double e : v) mean += e;
  CHECK(s.mean == doctest::Approx(mean / 37.0));
  CHECK(summarize(1, {}).successes == 0);
}

TEST_CASE("labeled-fraction study edge levels") {
  const auto d = sample(benchmark_generator(61), 700);
  FitConfig cfg;
  cfg.restarts = 3;
  const auto rep = run_labeled_fraction_study(d, {0, 698}, 4, 62, 2, 3, cfg);
  REQUIRE(rep.levels.size() == 2);
  REQUIRE(rep.replications.size() == 8);
  for (const auto& r : rep.replications) CHECK(r.ok);
  CHECK(rep.levels[0].m == 0);
  CHECK(rep.levels[0].mean > 0.95);
  CHECK(rep.levels[1].mean == doctest::Approx(1.0));

  // with no labels a replication is an ordinary fit scored on all rows
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& r = rep.replications[i];
    CHECK(r.m == 0);
    CHECK(r.ari >= -1.0);
    CHECK(r.ari <= 1.0);
  }

  CHECK_THROWS_AS(run_labeled_fraction_study(d, {699}, 1, 0, 2, 3, cfg), Error);
  CHECK_THROWS_AS(run_labeled_fraction_study(d, {0}, 0, 0, 2, 3, cfg), Error);
  const auto unlabeled = testing_support::random_dataset(63, 50, 3, 1);
  CHECK_THROWS_AS(run_labeled_fraction_study(unlabeled, {0}, 1, 0, 2, 1, cfg), Error);
}

TEST_CASE("labeled-fraction study is reproducible") {
  const auto d = testing_support::random_dataset(64, 120, 2, 1);
  FitConfig cfg;
  cfg.restarts = 2;
  const auto a = run_labeled_fraction_study(d, {0, 20}, 3, 5, 2, 1, cfg);
  const auto b = run_labeled_fraction_study(d, {0, 20}, 3, 5, 2, 1, cfg);
  for (std::size_t i = 0; i < a.replications.size(); ++i) {
    CHECK(a.replications[i].ari == b.replications[i].ari);
    CHECK(a.replications[i].loglik == b.replications[i].loglik);
  }
}

TEST_CASE("restricted benchmark grid recovers the truth") {
  ArtificialExperimentOptions opts;
  opts.k_range = {2};
  opts.r_range = {3};
  const auto e = run_artificial_experiment(0, opts);
  CHECK(e.grid.best_bic == ModelCell{2, 3});
  CHECK(e.ari_bic == 1.0);
  CHECK(e.ari_icl == 1.0);
  CHECK(e.std_errors_status == "ok");
  REQUIRE(e.fmr_ari.has_value());
  CHECK(*e.fmr_ari < 0.3);
}

TEST_CASE("samples sit inside the high-density region") {
  const auto psi = benchmark_parameters();
  const auto d = sample(Generator{psi, std::nullopt, 65}, 20000);
  std::size_t inside = 0;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (log_mixture_density(d.x()[i], d.y()[i], psi) > std::log(1e-6)) ++inside;
  CHECK(static_cast<double>(inside) >= 0.99 * static_cast<double>(d.size()));
}
