#include "polycwm/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "polycwm/error.hpp"
#include "polycwm/evaluation.hpp"
#include "polycwm/kernels.hpp"
#include "polycwm/rng.hpp"

namespace polycwm {

MixtureParams benchmark_parameters() {
  std::vector<ComponentParams> comps(2);
  comps[0] = {{0.0, -1.0, 0.0, 0.1}, 1.6, -2.0, 1.0};
  comps[1] = {{-8.0, 0.1, -0.1, 0.15}, 2.3, 3.8, 0.7};
  return MixtureParams({0.571, 0.429}, std::move(comps));
}

Generator benchmark_generator(std::uint64_t seed) {
  return Generator{benchmark_parameters(), std::vector<std::size_t>{400, 300}, seed};
}

Dataset sample(const Generator& gen, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "sample size must be positive");
  const std::size_t k = gen.psi.num_components();
  Rng rng(gen.seed);

  std::vector<std::size_t> origin;
  origin.reserve(n);
  if (gen.group_sizes) {
    const auto& sizes = *gen.group_sizes;
    if (sizes.size() != k) throw Error(ErrorCode::InvalidArgument, "group sizes must match the number of components");
    if (std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}) != n) {
      throw Error(ErrorCode::InvalidArgument, "group sizes must sum to n");
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (sizes[j] == 0) throw Error(ErrorCode::InvalidArgument, "group sizes must be positive");
      origin.insert(origin.end(), sizes[j], j);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      // categorical draw by inverting the cumulative weights
      const double u = rng.uniform();
      double cum = 0.0;
      std::size_t j = 0;
      for (; j + 1 < k; ++j) {
        cum += gen.psi.weight(j);
        if (u < cum) break;
      }
      origin.push_back(j);
    }
  }

  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = gen.psi.component(origin[i]);
    x[i] = rng.normal(c.mu_x, c.sigma_x);
    y[i] = c.regression_mean(x[i]) + rng.normal(0.0, c.sigma_eps);
  }
  return Dataset(std::move(x), std::move(y), {}, std::move(origin));
}

Responsibilities posteriors(const Dataset& data, const MixtureParams& psi, DensityModel model) {
  Responsibilities resp;
  kernels::omp::e_step(data, psi, model, resp);
  return resp;
}

FitResult fit_reference_fmr(const Dataset& data, std::size_t k, int degree, const FitConfig& cfg) {
  return fit(data, k, degree, cfg, DensityModel::ConditionalOnly);
}

FitResult fit_reference_gmm_x(const Dataset& data, std::size_t k, const FitConfig& cfg) {
  return fit(data, k, 0, cfg, DensityModel::MarginalOnly);
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidArgument, "quantile probability outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

LevelSummary summarize(std::size_t m, const std::vector<double>& values) {
  LevelSummary s;
  s.m = m;
  s.successes = values.size();
  if (values.empty()) return s;
  const double count = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / count;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std_error = std::sqrt(ss / (count - 1.0)) / std::sqrt(count);
  }
  s.q025 = quantile(values, 0.025);
  s.q05 = quantile(values, 0.05);
  s.q95 = quantile(values, 0.95);
  s.q975 = quantile(values, 0.975);
  return s;
}

ArtificialExperiment run_artificial_experiment(std::uint64_t seed, const ArtificialExperimentOptions& opts) {
  ArtificialExperiment out;
  out.data = sample(benchmark_generator(derive_seed(seed, {0x73616d706c65ULL})), 700);

  FitConfig cfg = opts.fit;
  cfg.seed = derive_seed(seed, {0x66697473ULL});
  GridOptions grid_opts;
  grid_opts.keep_fits = true;
  out.grid = grid_search(out.data, opts.k_range, opts.r_range, cfg, grid_opts);

  const auto truth = out.data.truth();
  const auto& fit_bic = *out.grid.row(out.grid.best_bic).fit;
  const auto& fit_icl = *out.grid.row(out.grid.best_icl).fit;
  out.ari_bic = adjusted_rand_index(fit_bic.map_labels, truth);
  out.ari_icl = adjusted_rand_index(fit_icl.map_labels, truth);

  if (opts.with_standard_errors) {
    try {
      out.std_errors = standard_errors(out.data, fit_bic.psi_hat);
      out.std_errors_status = "ok";
    } catch (const Error& e) {
      out.std_errors_status = e.what();
    }
  }

  if (opts.with_reference_fmr) {
    FitConfig fmr_cfg = cfg;
    fmr_cfg.initial_partition = out.data.to_input_order(truth);
    try {
      const auto fmr = fit_reference_fmr(out.data, 2, 3, fmr_cfg);
      out.fmr_ari = adjusted_rand_index(fmr.map_labels, truth);
    } catch (const Error&) {
      out.fmr_ari.reset();
    }
  }

  ReplicationMetrics rep;
  rep.ok = true;
  rep.status = "ok";
  rep.ari = out.ari_bic;
  rep.loglik = fit_bic.loglik();
  rep.selected = out.grid.best_bic;
  out.report.replications.push_back(rep);
  out.report.levels.push_back(summarize(0, {out.ari_bic}));
  return out;
}

namespace {

std::vector<std::size_t> draw_without_replacement(Rng& rng, std::size_t n, std::size_t m) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(m);
  return idx;
}

}  // namespace

ExperimentReport run_labeled_fraction_study(const Dataset& data, const std::vector<std::size_t>& m_values,
                                            std::size_t reps, std::uint64_t seed, std::size_t k, int degree,
                                            const FitConfig& cfg) {
  if (!data.has_truth()) throw Error(ErrorCode::InvalidArgument, "labeled-fraction study needs reference labels");
  if (reps == 0) throw Error(ErrorCode::InvalidArgument, "reps must be >= 1");
  const std::size_t n = data.size();
  for (auto m : m_values) {
    if (m + 2 > n) throw Error(ErrorCode::InvalidArgument, "every m must leave at least two unlabeled rows");
  }
  const auto truth_input = data.to_input_order(data.truth());
  for (auto t : truth_input) {
    if (t >= k) throw Error(ErrorCode::LabelOutOfRange, "reference label exceeds k");
  }

  ExperimentReport report;
  report.replications.resize(m_values.size() * reps);
  const auto total = static_cast<long long>(report.replications.size());

#pragma omp parallel for schedule(dynamic)
  for (long long t = 0; t < total; ++t) {
    const std::size_t level = static_cast<std::size_t>(t) / reps;
    const std::size_t rep_idx = static_cast<std::size_t>(t) % reps;
    const std::size_t m = m_values[level];
    auto& rep = report.replications[static_cast<std::size_t>(t)];
    rep.m = m;
    rep.replication = rep_idx;
    rep.selected = {k, degree};
    try {
      Rng rng(derive_seed(seed, {0x6c6162656cULL, m, rep_idx}));
      std::vector<std::optional<std::size_t>> labels(n);
      for (auto i : draw_without_replacement(rng, n, m)) labels[i] = truth_input[i];
      const Dataset labeled = data.relabeled(std::move(labels));
      FitConfig rep_cfg = cfg;
      rep_cfg.seed = derive_seed(seed, {0x666974ULL, m, rep_idx});
      rep_cfg.parallel_restarts = false;
      const auto f = fit(labeled, k, degree, rep_cfg);
      rep.ari = ari_unlabeled_subset(f.map_labels, labeled.truth(), labeled.num_labeled());
      rep.loglik = f.loglik();
      rep.ok = true;
      rep.status = "ok";
    } catch (const std::exception& e) {
      rep.ok = false;
      rep.status = e.what();
    }
  }

  for (std::size_t level = 0; level < m_values.size(); ++level) {
    std::vector<double> aris;
    for (std::size_t r = 0; r < reps; ++r) {
      const auto& rep = report.replications[level * reps + r];
      if (rep.ok) aris.push_back(rep.ari);
    }
    report.levels.push_back(summarize(m_values[level], aris));
  }
  return report;
}

}  // namespace polycwm
