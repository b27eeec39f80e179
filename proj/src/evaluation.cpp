#include "polycwm/evaluation.hpp"

#include <map>
#include <utility>

#include "polycwm/error.hpp"

namespace polycwm {
namespace {

struct PairCounts {
  double total = 0.0;   // C(n, 2)
  double joint = 0.0;   // sum over cells of C(n_ij, 2)
  double rows = 0.0;    // sum over a-clusters of C(a_i, 2)
  double cols = 0.0;    // sum over b-clusters of C(b_j, 2)
};

double choose2(double v) { return 0.5 * v * (v - 1.0); }

PairCounts pair_counts(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::LengthMismatch, "partitions differ in length");
  if (a.size() < 2) throw Error(ErrorCode::TooFewPoints, "agreement indices need at least two points");
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> table;
  std::map<std::size_t, std::size_t> row_sums, col_sums;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++table[{a[i], b[i]}];
    ++row_sums[a[i]];
    ++col_sums[b[i]];
  }
  PairCounts c;
  c.total = choose2(static_cast<double>(a.size()));
  for (const auto& [cell, count] : table) c.joint += choose2(static_cast<double>(count));
  for (const auto& [id, count] : row_sums) c.rows += choose2(static_cast<double>(count));
  for (const auto& [id, count] : col_sums) c.cols += choose2(static_cast<double>(count));
  return c;
}

}  // namespace

std::size_t map_index(std::span<const double> row) noexcept {
  std::size_t best = 0;
  for (std::size_t j = 1; j < row.size(); ++j)
    if (row[j] > row[best]) best = j;
  return best;
}

Partition map_assign(const Responsibilities& resp) {
  Partition out(resp.rows());
  for (std::size_t i = 0; i < resp.rows(); ++i) out[i] = map_index(resp.row(i));
  return out;
}

double rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  const auto c = pair_counts(a, b);
  // agreements = pairs together in both + pairs apart in both
  const double agree = c.total + 2.0 * c.joint - c.rows - c.cols;
  return agree / c.total;
}

double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  const auto c = pair_counts(a, b);
  const double expected = c.rows * c.cols / c.total;
  const double max = 0.5 * (c.rows + c.cols);
  if (max == expected) return (c.joint == c.rows && c.joint == c.cols) ? 1.0 : 0.0;
  return (c.joint - expected) / (max - expected);
}

double ari_unlabeled_subset(std::span<const std::size_t> a, std::span<const std::size_t> b, std::size_t m) {
  if (a.size() != b.size()) throw Error(ErrorCode::LengthMismatch, "partitions differ in length");
  if (m + 2 > a.size()) throw Error(ErrorCode::TooFewPoints, "fewer than two unlabeled observations");
  return adjusted_rand_index(a.subspan(m), b.subspan(m));
}

}  // namespace polycwm
