#include "polycwm/report.hpp"

#include <algorithm>
#include <fstream>

#include "format.hpp"
#include "polycwm/error.hpp"

namespace polycwm {

Json params_to_json(const MixtureParams& psi) {
  Json comps = Json::array();
  for (const auto& c : psi.components()) {
    comps.push_back({{"beta", c.beta}, {"sigma_eps", c.sigma_eps}, {"mu_x", c.mu_x}, {"sigma_x", c.sigma_x}});
  }
  Json weights(std::vector<double>(psi.weights().begin(), psi.weights().end()));
  return {{"weights", std::move(weights)}, {"components", std::move(comps)}};
}

MixtureParams params_from_json(const nlohmann::json& j) {
  try {
    auto weights = j.at("weights").get<Vector>();
    std::vector<ComponentParams> comps;
    for (const auto& c : j.at("components")) {
      comps.push_back({c.at("beta").get<Vector>(), c.at("sigma_eps").get<double>(), c.at("mu_x").get<double>(),
                       c.at("sigma_x").get<double>()});
    }
    return MixtureParams(std::move(weights), std::move(comps));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("parameter block: ") + e.what());
  }
}

Json std_errors_to_json(const StdErrors& se) {
  Json comps = Json::array();
  for (const auto& c : se.components) {
    comps.push_back({{"beta", c.beta}, {"sigma_eps", c.sigma_eps}, {"mu_x", c.mu_x}, {"sigma_x", c.sigma_x}});
  }
  return {{"status", "ok"}, {"weights", se.weights}, {"components", std::move(comps)}};
}

std::optional<StdErrors> try_standard_errors(const Dataset& data, const MixtureParams& psi, std::string& status) {
  try {
    auto se = standard_errors(data, psi);
    status = "ok";
    return se;
  } catch (const Error& e) {
    status = e.what();
    return std::nullopt;
  }
}

Json fit_to_json(const Dataset& data, const FitResult& f, const std::optional<StdErrors>& std_errors,
                 const std::string& std_errors_status) {
  const std::size_t n = data.size();
  const std::size_t k = f.psi_hat.num_components();
  const int degree = f.psi_hat.degree();
  const double l = f.loglik();
  const double b = bic(l, k, degree, n);

  Json j;
  j["k"] = k;
  j["r"] = degree;
  j["params"] = params_to_json(f.psi_hat);
  if (std_errors) {
    j["standard_errors"] = std_errors_to_json(*std_errors);
  } else {
    j["standard_errors"] = {{"status", "unavailable"}, {"reason", std_errors_status}};
  }
  j["loglik"] = l;
  j["two_loglik"] = 2.0 * l;
  j["num_params"] = num_params(k, degree);
  j["bic"] = b;
  j["icl"] = icl(b, f.resp, data.num_labeled());
  if (data.has_truth()) j["ari"] = adjusted_rand_index(f.map_labels, data.truth());
  j["converged"] = f.converged;
  j["iterations"] = f.iterations;
  j["best_restart"] = f.best_restart + 1;
  j["restart_failures"] = f.restart_failures;
  j["warnings"] = f.warnings;
  j["loglik_trace"] = f.loglik_trace;

  std::vector<std::size_t> map(n);
  std::vector<std::vector<double>> post(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t in = data.input_index()[i];
    map[in] = f.map_labels[i] + 1;
    const auto row = f.resp.row(i);
    post[in].assign(row.begin(), row.end());
  }
  j["map_labels"] = std::move(map);
  j["posteriors"] = std::move(post);
  return j;
}

Json grid_to_json(const GridResult& grid) {
  Json rows = Json::array();
  for (const auto& r : grid.rows) {
    Json row;
    row["k"] = r.cell.k;
    row["r"] = r.cell.degree;
    row["num_params"] = num_params(r.cell.k, r.cell.degree);
    row["status"] = r.status;
    if (r.ok) {
      row["two_loglik"] = r.two_loglik;
      row["bic"] = r.bic;
      row["icl"] = r.icl;
    } else {
      row["two_loglik"] = nullptr;
      row["bic"] = nullptr;
      row["icl"] = nullptr;
    }
    rows.push_back(std::move(row));
  }
  Json j;
  j["cells"] = std::move(rows);
  j["selected"] = {{"bic", {{"k", grid.best_bic.k}, {"r", grid.best_bic.degree}}},
                   {"icl", {{"k", grid.best_icl.k}, {"r", grid.best_icl.degree}}}};
  return j;
}

Json experiment_report_to_json(const ExperimentReport& report) {
  Json levels = Json::array();
  for (const auto& s : report.levels) {
    levels.push_back({{"m", s.m},
                      {"successes", s.successes},
                      {"mean_ari", s.mean},
                      {"std_error", s.std_error},
                      {"q025", s.q025},
                      {"q05", s.q05},
                      {"q95", s.q95},
                      {"q975", s.q975}});
  }
  Json reps = Json::array();
  for (const auto& r : report.replications) {
    Json row;
    row["m"] = r.m;
    row["replication"] = r.replication + 1;
    row["status"] = r.status;
    if (r.ok) {
      row["ari"] = r.ari;
      row["loglik"] = r.loglik;
    } else {
      row["ari"] = nullptr;
      row["loglik"] = nullptr;
    }
    reps.push_back(std::move(row));
  }
  return {{"levels", std::move(levels)}, {"replications", std::move(reps)}};
}

MixtureParams read_report_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  if (!j.contains("fit") || !j["fit"].contains("params")) {
    throw Error(ErrorCode::ParseError, path.string() + ": no fit.params entry");
  }
  return params_from_json(j["fit"]["params"]);
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

void write_plot_tables(const std::filesystem::path& dir, const Dataset& data, const FitResult& f,
                       std::size_t grid_points) {
  const std::size_t n = data.size();
  const std::size_t k = f.psi_hat.num_components();
  std::vector<std::size_t> internal_of(n);
  for (std::size_t i = 0; i < n; ++i) internal_of[data.input_index()[i]] = i;

  auto out = open_out(dir / "assignments.csv");
  out << "row,x,y,map";
  for (std::size_t j = 0; j < k; ++j) out << ",z_" << j + 1;
  out << '\n';
  for (std::size_t in = 0; in < n; ++in) {
    const std::size_t i = internal_of[in];
    out << in + 1 << ',' << format_double(data.x()[i]) << ',' << format_double(data.y()[i]) << ','
        << f.map_labels[i] + 1;
    for (double z : f.resp.row(i)) out << ',' << format_double(z);
    out << '\n';
  }

  const auto [lo, hi] = std::minmax_element(data.x().begin(), data.x().end());
  const std::size_t points = std::max<std::size_t>(grid_points, 2);
  for (std::size_t j = 0; j < k; ++j) {
    auto curve = open_out(dir / ("curve_k" + std::to_string(j + 1) + ".csv"));
    curve << "x,y_hat\n";
    const auto& c = f.psi_hat.component(j);
    for (std::size_t g = 0; g < points; ++g) {
      const double t = static_cast<double>(g) / static_cast<double>(points - 1);
      const double xv = g + 1 == points ? *hi : *lo + t * (*hi - *lo);
      curve << format_double(xv) << ',' << format_double(c.regression_mean(xv)) << '\n';
    }
  }
}

void write_json(const std::filesystem::path& path, const Json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::InvalidArgument, "write failed for '" + path.string() + "'");
}

}  // namespace polycwm
