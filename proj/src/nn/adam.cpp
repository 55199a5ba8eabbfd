#include "dpcipi/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace dpcipi::nn {

AdamState make_adam_state(const Network& params) {
  return {zeros_like(params), zeros_like(params), 0};
}

void adam_step(Network& params, const Network& grads, AdamState& state, double learning_rate,
               const AdamOptions& options) {
  auto p = tensors(params);
  auto g = tensors(grads);
  auto m = tensors(state.first_moment);
  auto v = tensors(state.second_moment);
  if (g.size() != p.size() || m.size() != p.size() || v.size() != p.size())
    throw std::invalid_argument("adam_step: parameter, gradient and state layouts differ");

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(options.beta1, t);
  const double correction2 = 1.0 - std::pow(options.beta2, t);
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (g[k].values.size() != p[k].values.size())
      throw std::invalid_argument("adam_step: shape mismatch in " + p[k].name);
    for (std::size_t i = 0; i < p[k].values.size(); ++i) {
      const double gi = g[k].values[i];
      double& mi = m[k].values[i];
      double& vi = v[k].values[i];
      mi = options.beta1 * mi + (1.0 - options.beta1) * gi;
      vi = options.beta2 * vi + (1.0 - options.beta2) * gi * gi;
      const double m_hat = mi / correction1;
      const double v_hat = vi / correction2;
      p[k].values[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + options.epsilon);
    }
  }
}

}  // namespace dpcipi::nn
