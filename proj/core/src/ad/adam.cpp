#include "adapt/ad/adam.hpp"

#include <cmath>

#include "adapt/util/error.hpp"

namespace adapt::ad {

void adam_step(std::span<Parameter* const> params, AdamState& state) {
  for (const auto* p : params)
    if (!p->grad) throw UninitializedGrad("parameter '" + p->name + "' has no gradient");
  if (state.first.empty()) {
    for (const auto* p : params) {
      state.first.emplace_back(p->value.shape());
      state.second.emplace_back(p->value.shape());
    }
  }
  if (state.first.size() != params.size()) throw Error("adam state tracks a different parameter list");

  const auto& c = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto* p = params[k];
    auto& m = state.first[k];
    auto& v = state.second[k];
    if (m.shape() != p->value.shape()) throw ShapeError("adam moment shape mismatch for '" + p->name + "'");
    const double* g = p->grad->data();
    double* w = p->value.data();
    double* mm = m.data();
    double* vv = v.data();
    for (std::size_t j = 0, n = p->value.numel(); j < n; ++j) {
      mm[j] = c.beta1 * mm[j] + (1.0 - c.beta1) * g[j];
      vv[j] = c.beta2 * vv[j] + (1.0 - c.beta2) * g[j] * g[j];
      const double mhat = mm[j] / bc1;
      const double vhat = vv[j] / bc2;
      w[j] -= c.learning_rate * mhat / (std::sqrt(vhat) + c.epsilon);
    }
    p->zero_grad();
  }
}

}  // namespace adapt::ad
