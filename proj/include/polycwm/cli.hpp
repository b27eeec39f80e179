#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "polycwm/em.hpp"
#include "polycwm/error.hpp"

namespace polycwm::cli {

enum class Criterion { Bic, Icl };

enum ExitCode : int {
  kOk = 0,
  kInputError = 2,
  kFitFailure = 3,
  kNumericalError = 4,
};

struct RunConfig {
  std::string subcommand;  // simulate | fit | select | classify | experiment
  std::filesystem::path input;
  // Report directory (report.json plus CSV tables); for simulate, the CSV
  // file to write. Empty: the report goes to stdout and no tables are written.
  std::filesystem::path output;
  std::filesystem::path params;  // simulate: draw from a report's fitted parameters
  std::size_t k = 2;
  int degree = 3;
  std::vector<std::size_t> k_range{1, 2, 3, 4, 5};
  std::vector<int> r_range{1, 2, 3, 4, 5};
  Algorithm algorithm = Algorithm::EM;
  int restarts = 10;
  double epsilon = 0.05;
  int max_iter = 1000;
  std::uint64_t seed = 0;
  Criterion criterion = Criterion::Bic;
  std::size_t n = 700;
  std::size_t reps = 500;
  std::vector<std::size_t> m_values;  // labeled-fraction study levels
  bool paper_experiment = false;

  FitConfig fit_config() const;
};

ExitCode exit_code_for(ErrorCode code) noexcept;

// Parses "A:B" (inclusive) or a single "A".
std::vector<std::size_t> parse_range(const std::string& text);

int cmd_simulate(const RunConfig& cfg, std::ostream& out);
int cmd_fit(const RunConfig& cfg, std::ostream& out);
int cmd_select(const RunConfig& cfg, std::ostream& out);
int cmd_classify(const RunConfig& cfg, std::ostream& out);
int cmd_experiment(const RunConfig& cfg, std::ostream& out);

// Full command line: parse, dispatch, map failures to exit codes with a
// diagnostic on `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace polycwm::cli
