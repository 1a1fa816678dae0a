#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "adapt/ad/tensor.hpp"

namespace adapt::ad {

struct AdamConfig {
  double learning_rate{0.001};
  double beta1{0.9};
  double beta2{0.999};
  double epsilon{1e-8};
};

/// Moment estimates for an ordered parameter list.
struct AdamState {
  AdamConfig config;
  std::uint64_t step{0};
  std::vector<Tensor> first;
  std::vector<Tensor> second;
};

/// One bias-corrected Adam update over `params` (same order every call).
/// Gradients are cleared afterwards. Throws UninitializedGrad if any
/// parameter has no gradient.
void adam_step(std::span<Parameter* const> params, AdamState& state);

}  // namespace adapt::ad
