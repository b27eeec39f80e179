#include "kernels_impl.hpp"

namespace polycwm::kernels {
namespace {

struct SerialReducer {
  template <class RowFn>
  std::vector<double> sum(std::size_t n, std::size_t width, RowFn&& fn) const {
    std::vector<double> acc(width, 0.0);
    for (std::size_t i = 0; i < n; ++i) fn(i, acc.data());
    return acc;
  }
};

}  // namespace

namespace serial {

double e_step(const Dataset& data, const MixtureParams& psi, DensityModel model, Responsibilities& resp) {
  return detail::e_step(SerialReducer{}, data, psi, model, resp);
}

double loglik(const Dataset& data, const MixtureParams& psi, DensityModel model) {
  return detail::loglik(SerialReducer{}, data, psi, model);
}

MStepOutcome m_step(const Dataset& data, const Responsibilities& resp, int degree, double variance_floor) {
  return detail::m_step(SerialReducer{}, data, resp, degree, variance_floor);
}

}  // namespace serial
}  // namespace polycwm::kernels
