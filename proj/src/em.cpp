#include "polycwm/em.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "polycwm/error.hpp"
#include "polycwm/kernels.hpp"
#include "polycwm/rng.hpp"

namespace polycwm {

void FitConfig::validate() const {
  if (restarts < 1) throw Error(ErrorCode::InvalidArgument, "restarts must be >= 1");
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be > 0");
  if (max_iter < 1) throw Error(ErrorCode::InvalidArgument, "max_iter must be >= 1");
  if (!(variance_floor > 0.0)) throw Error(ErrorCode::InvalidArgument, "variance_floor must be > 0");
}

AitkenDecision aitken_stop(double l_prev2, double l_prev, double l_curr, double epsilon) {
  const double increment = l_curr - l_prev;
  if (std::abs(increment) < 1e-12) return AitkenDecision::Converged;
  const double previous = l_prev - l_prev2;
  if (previous == 0.0) return AitkenDecision::Continue;
  const double a = increment / previous;
  if (a == 1.0) return AitkenDecision::Continue;
  const double l_inf = l_prev + increment / (1.0 - a);
  const double gap = l_inf - l_prev;
  return (gap >= 0.0 && gap < epsilon) ? AitkenDecision::Converged : AitkenDecision::Continue;
}

Responsibilities e_step(const Dataset& data, const MixtureParams& psi) {
  Responsibilities resp;
  kernels::omp::e_step(data, psi, DensityModel::Cwm, resp);
  return resp;
}

MixtureParams m_step(const Dataset& data, const Responsibilities& resp, int degree, double variance_floor) {
  return kernels::omp::m_step(data, resp, degree, variance_floor).params;
}

namespace {

struct RunOutcome {
  MixtureParams psi;
  Responsibilities resp;
  std::vector<double> trace;
  bool converged = false;
};

Responsibilities initial_responsibilities(const Dataset& data, std::size_t k, const FitConfig& cfg, std::uint64_t seed) {
  const std::size_t n = data.size();
  const std::size_t m = data.num_labeled();
  Responsibilities resp(n, k);
  for (std::size_t i = 0; i < m; ++i) resp(i, data.labels()[i]) = 1.0;
  if (cfg.initial_partition) {
    const auto& init = *cfg.initial_partition;
    for (std::size_t i = m; i < n; ++i) resp(i, init[data.input_index()[i]]) = 1.0;
  } else {
    // z_i^(0) ~ Multinomial(1; 1/k, ..., 1/k)
    Rng rng(seed);
    for (std::size_t i = m; i < n; ++i) resp(i, rng.uniform_index(k)) = 1.0;
  }
  return resp;
}

void harden(const Dataset& data, Responsibilities& resp) {
  for (std::size_t i = data.num_labeled(); i < resp.rows(); ++i) {
    auto row = resp.row(i);
    const std::size_t best = map_index(row);
    for (auto& v : row) v = 0.0;
    row[best] = 1.0;
  }
}

RunOutcome run_once(const Dataset& data, std::size_t k, int degree, const FitConfig& cfg, DensityModel model,
                    std::uint64_t seed) {
  Responsibilities resp = initial_responsibilities(data, k, cfg, seed);
  auto step = kernels::omp::m_step(data, resp, degree, cfg.variance_floor);
  int floor_streak = step.hit_floor ? 1 : 0;
  MixtureParams psi = std::move(step.params);

  RunOutcome out;
  for (int iter = 1;; ++iter) {
    const double l = kernels::omp::e_step(data, psi, model, resp);
    out.trace.push_back(l);
    const std::size_t t = out.trace.size();
    if (t >= 2) {
      const double l2 = t >= 3 ? out.trace[t - 3] : out.trace[t - 2];
      if (aitken_stop(l2, out.trace[t - 2], out.trace[t - 1], cfg.epsilon) == AitkenDecision::Converged) {
        out.converged = true;
        break;
      }
    }
    if (iter >= cfg.max_iter) break;

    if (cfg.algorithm == Algorithm::CEM) {
      Responsibilities hard = resp;
      harden(data, hard);
      step = kernels::omp::m_step(data, hard, degree, cfg.variance_floor);
    } else {
      step = kernels::omp::m_step(data, resp, degree, cfg.variance_floor);
    }
    floor_streak = step.hit_floor ? floor_streak + 1 : 0;
    if (floor_streak >= 2) {
      throw Error(ErrorCode::VarianceCollapse, "variance floor reached on two consecutive M-steps");
    }
    psi = std::move(step.params);
  }
  out.psi = std::move(psi);
  out.resp = std::move(resp);
  return out;
}

}  // namespace

FitResult fit(const Dataset& data, std::size_t k, int degree, const FitConfig& cfg, DensityModel model) {
  cfg.validate();
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  if (degree < 0) throw Error(ErrorCode::InvalidArgument, "degree must be >= 0");
  data.validate_labels(k);
  if (cfg.initial_partition) {
    if (cfg.initial_partition->size() != data.size()) {
      throw Error(ErrorCode::LengthMismatch, "initial partition length differs from n");
    }
    for (auto label : *cfg.initial_partition) {
      if (label >= k) throw Error(ErrorCode::LabelOutOfRange, "initial partition label exceeds k");
    }
  }

  FitResult result;
  const std::size_t min_rows = k * (static_cast<std::size_t>(degree) + 2);
  if (data.size() < min_rows) {
    result.warnings.push_back("n=" + std::to_string(data.size()) + " is below k*(r+2)=" + std::to_string(min_rows) +
                              "; the fit is likely under-determined");
  }

  // With one component, or a fixed starting partition, every restart would be identical.
  const int runs = (k == 1 || cfg.initial_partition) ? 1 : cfg.restarts;
  std::vector<std::optional<RunOutcome>> outcomes(static_cast<std::size_t>(runs));
  std::vector<std::string> failures(static_cast<std::size_t>(runs));

#pragma omp parallel for schedule(dynamic) if (cfg.parallel_restarts && runs > 1)
  for (int r = 0; r < runs; ++r) {
    const auto idx = static_cast<std::size_t>(r);
    try {
      outcomes[idx] = run_once(data, k, degree, cfg, model, derive_seed(cfg.seed, {static_cast<std::uint64_t>(r)}));
    } catch (const std::exception& e) {
      failures[idx] = e.what();
    }
  }

  int best = -1;
  double best_l = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < runs; ++r) {
    const auto idx = static_cast<std::size_t>(r);
    if (!outcomes[idx]) {
      result.restart_failures.push_back("restart " + std::to_string(r) + ": " + failures[idx]);
      continue;
    }
    const double l = outcomes[idx]->trace.back();
    if (best < 0 || l > best_l) {
      best = r;
      best_l = l;
    }
  }
  if (best < 0) {
    std::string msg = "all " + std::to_string(runs) + " restarts failed";
    for (const auto& f : result.restart_failures) msg += "; " + f;
    throw Error(ErrorCode::AllRestartsFailed, msg);
  }

  auto& chosen = *outcomes[static_cast<std::size_t>(best)];
  result.psi_hat = std::move(chosen.psi);
  result.resp = std::move(chosen.resp);
  result.loglik_trace = std::move(chosen.trace);
  result.converged = chosen.converged;
  result.iterations = static_cast<int>(result.loglik_trace.size());
  result.best_restart = best;
  result.map_labels = map_assign(result.resp);
  return result;
}

}  // namespace polycwm
