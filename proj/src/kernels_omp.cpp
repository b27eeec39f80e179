#include "kernels_impl.hpp"

namespace polycwm::kernels {
namespace {

// Rows are cut into fixed blocks of kBlockRows. Each block accumulates into
// its own slot and the slots are summed in block order afterwards, so the
// result is identical for any number of threads.
struct BlockedReducer {
  template <class RowFn>
  std::vector<double> sum(std::size_t n, std::size_t width, RowFn&& fn) const {
    const std::size_t blocks = (n + kBlockRows - 1) / kBlockRows;
    std::vector<double> partial(blocks * width, 0.0);
    const auto nb = static_cast<long long>(blocks);
#pragma omp parallel for schedule(static) if (n >= kParallelMinRows)
    for (long long b = 0; b < nb; ++b) {
      double* acc = partial.data() + static_cast<std::size_t>(b) * width;
      const std::size_t begin = static_cast<std::size_t>(b) * kBlockRows;
      const std::size_t end = std::min(n, begin + kBlockRows);
      for (std::size_t i = begin; i < end; ++i) fn(i, acc);
    }
    std::vector<double> out(width, 0.0);
    for (std::size_t b = 0; b < blocks; ++b)
      for (std::size_t w = 0; w < width; ++w) out[w] += partial[b * width + w];
    return out;
  }
};

}  // namespace

namespace omp {

double e_step(const Dataset& data, const MixtureParams& psi, DensityModel model, Responsibilities& resp) {
  return detail::e_step(BlockedReducer{}, data, psi, model, resp);
}

double loglik(const Dataset& data, const MixtureParams& psi, DensityModel model) {
  return detail::loglik(BlockedReducer{}, data, psi, model);
}

MStepOutcome m_step(const Dataset& data, const Responsibilities& resp, int degree, double variance_floor) {
  return detail::m_step(BlockedReducer{}, data, resp, degree, variance_floor);
}

}  // namespace omp
}  // namespace polycwm::kernels
