#include "adapt/model/lgnn.hpp"

#include <cmath>

#include "adapt/util/error.hpp"

namespace adapt {

AdaptorParams init_adaptor_params(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(derive_seed(seed, {0xada}));
  const std::size_t hidden = cfg.adaptor_hidden;
  const double limit = std::sqrt(6.0 / static_cast<double>(kPropertyCount + hidden));
  AdaptorParams p;
  p.trunk_w = {"adaptor.trunk.w", ad::Tensor({kPropertyCount, hidden}), {}};
  for (auto& v : p.trunk_w.value.values()) v = (2.0 * uniform_real(rng) - 1.0) * limit;
  p.trunk_b = {"adaptor.trunk.b", ad::Tensor({hidden}), {}};
  for (std::size_t l = 0; l < cfg.layer_count(); ++l) {
    const auto tag = std::to_string(l + 1);
    p.head_w.push_back({"adaptor.head." + tag + ".w", ad::Tensor({hidden, cfg.film_size(l)}), {}});
    p.head_b.push_back({"adaptor.head." + tag + ".b", ad::Tensor({cfg.film_size(l)}), {}});
  }
  return p;
}

AdaptorVars bind_adaptor(ad::Tape& tape, AdaptorParams& p) {
  AdaptorVars v{tape.param(p.trunk_w), tape.param(p.trunk_b), {}, {}};
  for (auto& w : p.head_w) v.head_w.push_back(tape.param(w));
  for (auto& c : p.head_b) v.head_b.push_back(tape.param(c));
  return v;
}

AdaptorVars freeze_adaptor(ad::Tape& tape, const AdaptorParams& p) {
  AdaptorVars v{tape.leaf(p.trunk_w.value, nullptr), tape.leaf(p.trunk_b.value, nullptr), {}, {}};
  for (const auto& w : p.head_w) v.head_w.push_back(tape.leaf(w.value, nullptr));
  for (const auto& c : p.head_b) v.head_b.push_back(tape.leaf(c.value, nullptr));
  return v;
}

std::vector<ad::Var> adaptor_forward(ad::Tape& tape, const std::array<double, kPropertyCount>& p_norm,
                                     const AdaptorVars& adaptor, const ModelConfig& cfg) {
  const auto& tw = adaptor.trunk_w.value();
  if (tw.rank() != 2 || tw.rows() != p_norm.size())
    throw ShapeError("adaptor input width " + std::to_string(p_norm.size()) + " vs trunk " +
                     ad::shape_str(tw.shape()));
  if (adaptor.head_w.size() != cfg.layer_count() || adaptor.head_b.size() != cfg.layer_count())
    throw ShapeError("adaptor has " + std::to_string(adaptor.head_w.size()) + " heads for " +
                     std::to_string(cfg.layer_count()) + " layers");
  ad::Var p = tape.constant(ad::Tensor({1, kPropertyCount}, std::vector<double>(p_norm.begin(), p_norm.end())));
  ad::Var h = ad::tanh(ad::add_row(ad::matmul(p, adaptor.trunk_w), adaptor.trunk_b));

  std::vector<ad::Var> phis;
  for (std::size_t l = 0; l < cfg.layer_count(); ++l) {
    const std::size_t size = cfg.film_size(l);
    ad::Var raw = ad::add_row(ad::matmul(h, adaptor.head_w[l]), adaptor.head_b[l]);
    if (raw.value().numel() != size)
      throw ShapeError("adaptor head " + std::to_string(l + 1) + " produces " +
                       std::to_string(raw.value().numel()) + " values, expected " + std::to_string(size));
    ad::Tensor offset({size});
    for (std::size_t k = 0; k < size / 2; ++k) offset[k] = 1.0;
    phis.push_back(ad::add(ad::reshape(raw, {size}), tape.constant(std::move(offset))));
  }
  return phis;
}

ad::Var film_adapt(ad::Var theta, ad::Var phi) {
  const auto& shape = theta.value().shape();
  const std::size_t n = theta.value().numel();
  if (phi.value().numel() != 2 * n)
    throw ShapeError("film: adapting vector of length " + std::to_string(phi.value().numel()) +
                     " does not match weights " + ad::shape_str(shape) + " (need " + std::to_string(2 * n) + ")");
  ad::Var gamma = ad::slice(phi, 0, shape);
  ad::Var beta = ad::slice(phi, n, shape);
  return ad::add(ad::mul(theta, gamma), beta);
}

std::vector<ad::Var> film_adapt(std::span<const ad::Var> thetas, std::span<const ad::Var> phis) {
  if (thetas.size() != phis.size())
    throw ShapeError("film: " + std::to_string(phis.size()) + " adapting vectors for " +
                     std::to_string(thetas.size()) + " layers");
  std::vector<ad::Var> out;
  for (std::size_t l = 0; l < thetas.size(); ++l) out.push_back(film_adapt(thetas[l], phis[l]));
  return out;
}

AdaptedParams adapt_weights(const MetaLgnnParams& meta, const AdaptorParams& adaptor,
                            const std::array<double, kPropertyCount>& p_norm, const ModelConfig& cfg) {
  ad::Tape tape;
  auto thetas = freeze_layers(tape, meta.layers);
  auto vars = freeze_adaptor(tape, adaptor);
  auto adapted = film_adapt(thetas, adaptor_forward(tape, p_norm, vars, cfg));
  AdaptedParams out;
  for (auto v : adapted) out.layers.push_back(v.value());
  return out;
}

}  // namespace adapt
