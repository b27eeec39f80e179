#include "polycwm/selection.hpp"

#include <algorithm>
#include <cmath>

#include "polycwm/error.hpp"
#include "polycwm/rng.hpp"

namespace polycwm {

std::size_t num_params(std::size_t k, int degree) {
  if (k == 0 || degree < 0) throw Error(ErrorCode::InvalidArgument, "num_params needs k >= 1 and r >= 0");
  return k * static_cast<std::size_t>(degree) + 4 * k - 1;
}

double bic(double loglik, std::size_t k, int degree, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "bic needs n >= 1");
  return 2.0 * loglik - static_cast<double>(num_params(k, degree)) * std::log(static_cast<double>(n));
}

double icl(double bic_value, const Responsibilities& resp, std::size_t m) {
  double entropy = 0.0;
  for (std::size_t i = m; i < resp.rows(); ++i) {
    const auto row = resp.row(i);
    entropy += std::log(row[map_index(row)]);
  }
  return bic_value + entropy;
}

const GridRow& GridResult::row(ModelCell cell) const {
  for (const auto& r : rows)
    if (r.cell == cell) return r;
  throw Error(ErrorCode::InvalidArgument, "cell not in grid");
}

std::uint64_t cell_seed(std::uint64_t base, std::size_t k, int degree) noexcept {
  return derive_seed(base, {0x6772696400000000ULL, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(degree)});
}

namespace {

// Larger score wins; ties prefer fewer parameters, then fewer components.
bool better(const GridRow& a, double score_a, const GridRow& b, double score_b) {
  if (score_a != score_b) return score_a > score_b;
  const auto eta_a = num_params(a.cell.k, a.cell.degree);
  const auto eta_b = num_params(b.cell.k, b.cell.degree);
  if (eta_a != eta_b) return eta_a < eta_b;
  return a.cell.k < b.cell.k;
}

}  // namespace

GridResult grid_search(const Dataset& data, const std::vector<std::size_t>& k_range, const std::vector<int>& r_range,
                       const FitConfig& cfg, const GridOptions& opts) {
  if (k_range.empty() || r_range.empty()) throw Error(ErrorCode::InvalidArgument, "grid ranges must be non-empty");
  cfg.validate();

  std::vector<ModelCell> cells;
  for (auto k : k_range)
    for (auto r : r_range) cells.push_back({k, r});
  std::sort(cells.begin(), cells.end(), [](const ModelCell& a, const ModelCell& b) {
    return a.k != b.k ? a.k < b.k : a.degree < b.degree;
  });
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());

  GridResult result;
  result.rows.resize(cells.size());
  const auto count = static_cast<long long>(cells.size());

#pragma omp parallel for schedule(dynamic) if (opts.parallel_cells && count > 1)
  for (long long c = 0; c < count; ++c) {
    auto& row = result.rows[static_cast<std::size_t>(c)];
    row.cell = cells[static_cast<std::size_t>(c)];
    FitConfig cell_cfg = cfg;
    cell_cfg.seed = cell_seed(cfg.seed, row.cell.k, row.cell.degree);
    try {
      auto f = fit(data, row.cell.k, row.cell.degree, cell_cfg);
      const double l = f.loglik();
      row.two_loglik = 2.0 * l;
      row.bic = bic(l, row.cell.k, row.cell.degree, data.size());
      row.icl = icl(row.bic, f.resp, data.num_labeled());
      row.ok = true;
      row.status = "ok";
      if (opts.keep_fits) row.fit = std::move(f);
    } catch (const std::exception& e) {
      row.ok = false;
      row.status = e.what();
    }
  }

  const GridRow* best_b = nullptr;
  const GridRow* best_i = nullptr;
  for (const auto& row : result.rows) {
    if (!row.ok) continue;
    if (!best_b || better(row, row.bic, *best_b, best_b->bic)) best_b = &row;
    if (!best_i || better(row, row.icl, *best_i, best_i->icl)) best_i = &row;
  }
  if (!best_b) throw Error(ErrorCode::AllCellsFailed, "every (k, r) cell failed to fit");
  result.best_bic = best_b->cell;
  result.best_icl = best_i->cell;
  return result;
}

}  // namespace polycwm
