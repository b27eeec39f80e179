#include "polycwm/cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <ostream>

#include <CLI11.hpp>

#include "polycwm/io.hpp"
#include "polycwm/report.hpp"
#include "polycwm/rng.hpp"
#include "polycwm/simulate.hpp"

namespace polycwm::cli {

namespace fs = std::filesystem;

FitConfig RunConfig::fit_config() const {
  FitConfig f;
  f.algorithm = algorithm;
  f.restarts = restarts;
  f.epsilon = epsilon;
  f.max_iter = max_iter;
  f.seed = seed;
  f.validate();
  return f;
}

ExitCode exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::EmptyFile:
    case ErrorCode::BadLabel:
    case ErrorCode::LabelOutOfRange:
    case ErrorCode::InvalidArgument:
    case ErrorCode::LengthMismatch:
    case ErrorCode::ShapeMismatch:
    case ErrorCode::InvalidParameters:
    case ErrorCode::TooFewPoints:
    case ErrorCode::InsufficientData:
      return kInputError;
    case ErrorCode::EmptyComponent:
    case ErrorCode::SingularDesign:
    case ErrorCode::VarianceCollapse:
    case ErrorCode::AllRestartsFailed:
    case ErrorCode::AllCellsFailed:
      return kFitFailure;
    case ErrorCode::SingularMatrix:
    case ErrorCode::AllNegInfinity:
    case ErrorCode::NonPositiveScale:
    case ErrorCode::HessianNotPD:
    case ErrorCode::NumericalBreakdown:
      return kNumericalError;
  }
  return kNumericalError;
}

namespace {

std::size_t parse_count(std::string_view s, const std::string& text) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::InvalidArgument, "bad range '" + text + "'");
  }
  return v;
}

}  // namespace

std::vector<std::size_t> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  const std::string_view sv(text);
  const std::size_t a = parse_count(sv.substr(0, colon), text);
  const std::size_t b = colon == std::string::npos ? a : parse_count(sv.substr(colon + 1), text);
  if (b < a) throw Error(ErrorCode::InvalidArgument, "empty range '" + text + "'");
  std::vector<std::size_t> out;
  for (std::size_t v = a; v <= b; ++v) out.push_back(v);
  return out;
}

namespace {

const char* algorithm_name(Algorithm a) { return a == Algorithm::EM ? "em" : "cem"; }
const char* criterion_name(Criterion c) { return c == Criterion::Bic ? "bic" : "icl"; }

Json config_json(const RunConfig& cfg, bool single_cell) {
  Json j;
  j["command"] = cfg.subcommand;
  if (!cfg.input.empty()) j["input"] = cfg.input.string();
  if (single_cell) {
    j["k"] = cfg.k;
    j["r"] = cfg.degree;
  } else {
    j["k_range"] = cfg.k_range;
    j["r_range"] = cfg.r_range;
    j["criterion"] = criterion_name(cfg.criterion);
  }
  j["algorithm"] = algorithm_name(cfg.algorithm);
  j["restarts"] = cfg.restarts;
  j["epsilon"] = cfg.epsilon;
  j["max_iter"] = cfg.max_iter;
  j["seed"] = cfg.seed;
  return j;
}

Json data_json(const Dataset& data) {
  return {{"n", data.size()}, {"num_labeled", data.num_labeled()}, {"has_truth", data.has_truth()}};
}

void check_input(const RunConfig& cfg) {
  if (cfg.input.empty()) throw Error(ErrorCode::InvalidArgument, "--input is required");
  if (!fs::is_regular_file(cfg.input)) {
    throw Error(ErrorCode::InvalidArgument, "input '" + cfg.input.string() + "' is not a readable file");
  }
}

void prepare_output_dir(const RunConfig& cfg) {
  if (cfg.output.empty()) return;
  std::error_code ec;
  fs::create_directories(cfg.output, ec);
  if (ec || !fs::is_directory(cfg.output)) {
    throw Error(ErrorCode::InvalidArgument, "cannot create output directory '" + cfg.output.string() + "'");
  }
}

// Report to stdout, or report.json plus tables into the output directory.
void emit(const RunConfig& cfg, const Json& report, const Dataset& data, const FitResult* f, std::ostream& out) {
  if (cfg.output.empty()) {
    out << report.dump(2) << '\n';
    return;
  }
  write_json(cfg.output / "report.json", report);
  if (f) write_plot_tables(cfg.output, data, *f);
  out << "wrote " << (cfg.output / "report.json").string() << '\n';
}

Json fit_with_errors(const Dataset& data, const FitResult& f) {
  std::string status;
  const auto se = try_standard_errors(data, f.psi_hat, status);
  return fit_to_json(data, f, se, status);
}

}  // namespace

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  if (cfg.n == 0) throw Error(ErrorCode::InvalidArgument, "--n must be positive");
  Generator gen;
  if (!cfg.params.empty()) {
    gen = Generator{read_report_params(cfg.params), std::nullopt, cfg.seed};
  } else if (cfg.n == 700) {
    gen = benchmark_generator(cfg.seed);
  } else {
    gen = Generator{benchmark_parameters(), std::nullopt, cfg.seed};
  }
  if (!cfg.output.empty() && cfg.output.has_parent_path() && !fs::is_directory(cfg.output.parent_path())) {
    throw Error(ErrorCode::InvalidArgument, "no such directory '" + cfg.output.parent_path().string() + "'");
  }
  const Dataset data = sample(gen, cfg.n);
  if (cfg.output.empty()) {
    write_csv(out, data);
  } else {
    save_csv(cfg.output, data);
    out << "wrote " << cfg.output.string() << '\n';
  }
  return kOk;
}

int cmd_fit(const RunConfig& cfg, std::ostream& out) {
  check_input(cfg);
  prepare_output_dir(cfg);
  const FitConfig fc = cfg.fit_config();
  const Dataset data = load_csv(cfg.input);
  const FitResult f = fit(data, cfg.k, cfg.degree, fc);

  Json report;
  report["config"] = config_json(cfg, true);
  report["data"] = data_json(data);
  report["fit"] = fit_with_errors(data, f);
  emit(cfg, report, data, &f, out);
  return kOk;
}

int cmd_classify(const RunConfig& cfg, std::ostream& out) {
  check_input(cfg);
  prepare_output_dir(cfg);
  const FitConfig fc = cfg.fit_config();
  const Dataset data = load_csv(cfg.input);
  const FitResult f = fit(data, cfg.k, cfg.degree, fc);

  const std::size_t n = data.size();
  const std::size_t m = data.num_labeled();
  Json predictions = Json::array();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (input row, label)
  for (std::size_t i = m; i < n; ++i) pairs.emplace_back(data.input_index()[i], f.map_labels[i]);
  std::sort(pairs.begin(), pairs.end());
  for (const auto& [row, label] : pairs) predictions.push_back({{"row", row + 1}, {"label", label + 1}});

  Json cls;
  cls["num_labeled"] = m;
  cls["num_unlabeled"] = n - m;
  cls["predictions"] = std::move(predictions);
  if (data.has_truth()) {
    if (n - m >= 2) {
      cls["ari_unlabeled"] = ari_unlabeled_subset(f.map_labels, data.truth(), m);
    } else {
      cls["ari_unlabeled"] = nullptr;
    }
  }

  Json report;
  report["config"] = config_json(cfg, true);
  report["data"] = data_json(data);
  report["classification"] = std::move(cls);
  report["fit"] = fit_with_errors(data, f);
  emit(cfg, report, data, &f, out);
  return kOk;
}

int cmd_select(const RunConfig& cfg, std::ostream& out) {
  check_input(cfg);
  prepare_output_dir(cfg);
  const FitConfig fc = cfg.fit_config();
  const Dataset data = load_csv(cfg.input);
  GridOptions opts;
  opts.keep_fits = true;
  const GridResult grid = grid_search(data, cfg.k_range, cfg.r_range, fc, opts);
  const ModelCell chosen = cfg.criterion == Criterion::Bic ? grid.best_bic : grid.best_icl;
  const FitResult& f = *grid.row(chosen).fit;

  Json report;
  report["config"] = config_json(cfg, false);
  report["data"] = data_json(data);
  report["grid"] = grid_to_json(grid);
  report["fit"] = fit_with_errors(data, f);
  emit(cfg, report, data, &f, out);
  return kOk;
}

int cmd_experiment(const RunConfig& cfg, std::ostream& out) {
  prepare_output_dir(cfg);
  ArtificialExperimentOptions opts;
  opts.k_range = cfg.k_range;
  opts.r_range = cfg.r_range;
  opts.fit = cfg.fit_config();
  const ArtificialExperiment ex = run_artificial_experiment(cfg.seed, opts);
  const FitResult& f = ex.selected_fit();

  Json report;
  report["config"] = config_json(cfg, false);
  report["data"] = data_json(ex.data);
  report["grid"] = grid_to_json(ex.grid);
  report["ari_bic"] = ex.ari_bic;
  report["ari_icl"] = ex.ari_icl;
  if (ex.fmr_ari) {
    report["reference_fmr_ari"] = *ex.fmr_ari;
  } else {
    report["reference_fmr_ari"] = nullptr;
  }
  report["fit"] = fit_to_json(ex.data, f, ex.std_errors, ex.std_errors_status);

  if (cfg.paper_experiment) {
    if (cfg.reps == 0) throw Error(ErrorCode::InvalidArgument, "--reps must be >= 1");
    if (cfg.m_values.empty()) throw Error(ErrorCode::InvalidArgument, "no labeled-set sizes");
    const auto study = run_labeled_fraction_study(ex.data, cfg.m_values, cfg.reps,
                                                  derive_seed(cfg.seed, {0x7374756479ULL}), 2, 3, cfg.fit_config());
    Json lf = experiment_report_to_json(study);
    lf["k"] = 2;
    lf["r"] = 3;
    lf["reps"] = cfg.reps;
    report["labeled_fraction"] = std::move(lf);
  }

  if (!cfg.output.empty()) save_csv(cfg.output / "data.csv", ex.data);
  emit(cfg, report, ex.data, &f, out);
  return kOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  std::string k_range = "1:5", r_range = "1:5", m_range = "0:250";
  std::size_t m_step = 25;
  std::string algorithm = "em", criterion = "bic";

  CLI::App app{"Polynomial Gaussian cluster-weighted models: fitting, model selection and classification"};
  app.require_subcommand(0, 1);
  app.add_option("--input", cfg.input, "CSV with columns x,y and optional label, truth");
  app.add_option("--output", cfg.output, "Report directory (simulate: CSV file); stdout when omitted");
  app.add_option("--params", cfg.params, "simulate: draw from the fitted parameters of a report.json");
  app.add_option("--k", cfg.k, "Number of components")->check(CLI::PositiveNumber);
  app.add_option("--r", cfg.degree, "Polynomial degree")->check(CLI::Range(0, 30));
  app.add_option("--k-range", k_range, "Grid of k as A:B")->capture_default_str();
  app.add_option("--r-range", r_range, "Grid of r as A:B")->capture_default_str();
  app.add_option("--algorithm", algorithm, "em or cem")
      ->check(CLI::IsMember({"em", "cem"}))
      ->capture_default_str();
  app.add_option("--restarts", cfg.restarts, "Random restarts")->capture_default_str();
  app.add_option("--epsilon", cfg.epsilon, "Aitken stopping threshold")->capture_default_str();
  app.add_option("--max-iter", cfg.max_iter, "Iteration cap per run")->capture_default_str();
  app.add_option("--seed", cfg.seed, "Base random seed")->capture_default_str();
  app.add_option("--criterion", criterion, "bic or icl")
      ->check(CLI::IsMember({"bic", "icl"}))
      ->capture_default_str();
  app.add_option("--n", cfg.n, "simulate: sample size (700 uses group sizes 400 and 300)")->capture_default_str();
  app.add_option("--reps", cfg.reps, "Replications per labeled-set size")->capture_default_str();
  app.add_option("--m-range", m_range, "Labeled-set sizes as A:B")->capture_default_str();
  app.add_option("--m-step", m_step, "Step through --m-range")->check(CLI::PositiveNumber)->capture_default_str();
  auto* paper = app.add_flag("--paper-experiment", cfg.paper_experiment,
                             "Artificial experiment plus the labeled-fraction study");

  auto* sim = app.add_subcommand("simulate", "Sample from the benchmark cubic two-component model");
  auto* fit_cmd = app.add_subcommand("fit", "Fit one (k, r) model");
  auto* sel = app.add_subcommand("select", "Fit a (k, r) grid and pick the best cell by BIC or ICL");
  auto* cls = app.add_subcommand("classify", "Fit with the known labels and predict the unlabeled rows");
  auto* exp = app.add_subcommand("experiment", "Grid search on freshly simulated benchmark data");
  for (auto* s : {sim, fit_cmd, sel, cls, exp}) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (auto subs = app.get_subcommands(); !subs.empty()) {
      cfg.subcommand = subs.front()->get_name();
    } else if (paper->count() > 0) {
      cfg.subcommand = "experiment";
    } else {
      err << app.help();
      return kInputError;
    }
    if ((cfg.subcommand == "fit" || cfg.subcommand == "classify") &&
        (app.count("--k") == 0 || app.count("--r") == 0)) {
      throw Error(ErrorCode::InvalidArgument, cfg.subcommand + " needs --k and --r");
    }
    cfg.k_range = parse_range(k_range);
    if (cfg.k_range.front() == 0) throw Error(ErrorCode::InvalidArgument, "--k-range must start at 1 or more");
    cfg.r_range.clear();
    for (auto r : parse_range(r_range)) cfg.r_range.push_back(static_cast<int>(r));
    const auto ms = parse_range(m_range);
    for (std::size_t i = 0; i < ms.size(); i += m_step) cfg.m_values.push_back(ms[i]);
    cfg.algorithm = algorithm == "em" ? Algorithm::EM : Algorithm::CEM;
    cfg.criterion = criterion == "bic" ? Criterion::Bic : Criterion::Icl;

    if (cfg.subcommand == "simulate") return cmd_simulate(cfg, out);
    if (cfg.subcommand == "fit") return cmd_fit(cfg, out);
    if (cfg.subcommand == "select") return cmd_select(cfg, out);
    if (cfg.subcommand == "classify") return cmd_classify(cfg, out);
    return cmd_experiment(cfg, out);
  } catch (const Error& e) {
    err << "polycwm: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "polycwm: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "polycwm: internal error: " << e.what() << '\n';
    return kNumericalError;
  }
}

}  // namespace polycwm::cli
