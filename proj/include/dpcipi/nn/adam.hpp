#pragma once

#include <cstdint>

#include "dpcipi/nn/network.hpp"

namespace dpcipi::nn {

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  Network first_moment;
  Network second_moment;
  std::uint64_t step = 0;
};

AdamState make_adam_state(const Network& params);

/// Bias-corrected Adam update of every tensor in params.
void adam_step(Network& params, const Network& grads, AdamState& state, double learning_rate,
               const AdamOptions& options = {});

}  // namespace dpcipi::nn
