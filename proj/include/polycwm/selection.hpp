#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "polycwm/em.hpp"

namespace polycwm {

// Free-parameter count: k - 1 weights, then per component r + 1
// coefficients, a residual scale, and the mean and scale of X.
std::size_t num_params(std::size_t k, int degree);

// 2 l - eta ln n. Larger is better.
double bic(double loglik, std::size_t k, int degree, std::size_t n);

// BIC plus the log MAP posterior of every unlabeled row (rows m..n-1).
double icl(double bic_value, const Responsibilities& resp, std::size_t m);

struct ModelCell {
  std::size_t k = 1;
  int degree = 0;
  bool operator==(const ModelCell&) const = default;
};

struct GridRow {
  ModelCell cell;
  bool ok = false;
  std::string status;  // "ok" or the failure reason
  double two_loglik = 0.0;
  double bic = 0.0;
  double icl = 0.0;
  std::optional<FitResult> fit;  // kept when requested
};

struct GridResult {
  std::vector<GridRow> rows;  // sorted by (k, r)
  ModelCell best_bic;
  ModelCell best_icl;

  const GridRow& row(ModelCell cell) const;
};

struct GridOptions {
  bool keep_fits = false;
  bool parallel_cells = true;
};

// Per-cell seed so that adding cells to a grid never perturbs existing ones.
std::uint64_t cell_seed(std::uint64_t base, std::size_t k, int degree) noexcept;

GridResult grid_search(const Dataset& data, const std::vector<std::size_t>& k_range, const std::vector<int>& r_range,
                       const FitConfig& cfg, const GridOptions& opts = {});

}  // namespace polycwm
