#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "polycwm/em.hpp"
#include "polycwm/inference.hpp"
#include "polycwm/selection.hpp"
#include "polycwm/simulate.hpp"

namespace polycwm {

using Json = nlohmann::ordered_json;

// {"weights": [...], "components": [{"beta", "sigma_eps", "mu_x", "sigma_x"}]}
Json params_to_json(const MixtureParams& psi);
MixtureParams params_from_json(const nlohmann::json& j);

Json std_errors_to_json(const StdErrors& se);

// Everything known about one fit. Per-row fields are in input order with
// 1-based component indices. `std_errors` is either computed values or an
// "unavailable" entry carrying the reason.
Json fit_to_json(const Dataset& data, const FitResult& f, const std::optional<StdErrors>& std_errors,
                 const std::string& std_errors_status);

// Standard errors of a fit, or nullopt with the failure reason in `status`.
std::optional<StdErrors> try_standard_errors(const Dataset& data, const MixtureParams& psi, std::string& status);

Json grid_to_json(const GridResult& grid);
Json experiment_report_to_json(const ExperimentReport& report);

// Reads the "fit"."params" entry of a report file written by the CLI.
MixtureParams read_report_params(const std::filesystem::path& path);

// assignments.csv (row, x, y, map, z_1..z_k) and curve_k<j>.csv (x, y_hat on
// `grid_points` evenly spaced x values spanning the data).
void write_plot_tables(const std::filesystem::path& dir, const Dataset& data, const FitResult& f,
                       std::size_t grid_points = 200);

void write_json(const std::filesystem::path& path, const Json& j);

}  // namespace polycwm
