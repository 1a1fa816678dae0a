#include "adapt/model/lgnn.hpp"

#include <cmath>

#include "adapt/util/error.hpp"

namespace adapt {

void ModelConfig::validate() const {
  if (layer_dims.empty()) throw ConfigError("model needs at least one convolution layer");
  for (auto d : layer_dims)
    if (d == 0) throw ConfigError("layer widths must be positive");
  if (max_label < 1) throw ConfigError("max_label must be at least 1");
  if (adaptor_hidden == 0) throw ConfigError("adaptor_hidden must be positive");
  if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout must lie in [0, 1)");
  rwr.validate();
}

namespace {

ad::Tensor glorot(std::size_t fan_in, std::size_t fan_out, ad::Shape shape, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  ad::Tensor t(std::move(shape));
  for (auto& v : t.values()) v = (2.0 * uniform_real(rng) - 1.0) * limit;
  return t;
}

}  // namespace

MetaLgnnParams init_meta_params(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(derive_seed(seed, {0x3e7a}));
  MetaLgnnParams p;
  for (std::size_t l = 0; l < cfg.layer_count(); ++l) {
    const auto din = cfg.layer_in(l), dout = cfg.layer_out(l);
    p.layers.push_back({"theta." + std::to_string(l + 1), glorot(din, dout, {din, dout}, rng), {}});
  }
  const auto dl = cfg.layer_dims.back();
  p.delta = {"delta", glorot(dl, 1, {dl}, rng), {}};
  return p;
}

ad::Tensor encode_labels(const LocalSubgraph& sub, std::size_t max_label) {
  const std::size_t width = max_label + 1;
  ad::Tensor x({sub.size(), width});
  for (std::size_t v = 0; v < sub.size(); ++v) {
    const std::size_t label = std::min<std::size_t>(v < sub.labels.size() ? sub.labels[v] : 0, max_label);
    x.at(v, label) = 1.0;
  }
  return x;
}

ad::SparseMatrix normalized_adjacency(const LocalSubgraph& sub) {
  const std::size_t n = sub.size();
  std::vector<double> degree(n, 1.0);
  for (auto [a, b] : sub.edges) {
    degree[a] += 1.0;
    degree[b] += 1.0;
  }
  ad::SparseMatrix s;
  s.rows = s.cols = n;
  const std::size_t nnz = n + 2 * sub.edges.size();
  s.row.reserve(nnz);
  s.col.reserve(nnz);
  s.weight.reserve(nnz);
  for (std::uint32_t v = 0; v < n; ++v) {
    s.row.push_back(v);
    s.col.push_back(v);
    s.weight.push_back(1.0 / degree[v]);
  }
  for (auto [a, b] : sub.edges) {
    const double w = 1.0 / std::sqrt(degree[a] * degree[b]);
    s.row.push_back(a);
    s.col.push_back(b);
    s.weight.push_back(w);
    s.row.push_back(b);
    s.col.push_back(a);
    s.weight.push_back(w);
  }
  return s;
}

ad::Var gcn_forward(ad::Tape& tape, const ad::SparseMatrix& adjacency, ad::Var features,
                    std::span<const ad::Var> layer_weights, double dropout, std::uint64_t seed,
                    bool train_mode) {
  (void)tape;
  ad::Var h = features;
  const std::size_t layers = layer_weights.size();
  for (std::size_t l = 0; l < layers; ++l) {
    h = ad::spmm(adjacency, ad::matmul(h, layer_weights[l]));
    if (l + 1 < layers) {
      h = ad::relu(h);
      h = ad::dropout(h, dropout, derive_seed(seed, {0xd70, l}), train_mode);
    }
  }
  return h;
}

ad::Var pool(ad::Var node_states) { return ad::mean_rows(node_states); }

ad::Var score_logit(ad::Var h, ad::Var delta) {
  if (h.value().numel() != delta.value().numel())
    throw ShapeError("score: embedding " + ad::shape_str(h.shape()) + " vs scorer " +
                     ad::shape_str(delta.shape()));
  return ad::dot(h, delta);
}

ad::Var score(ad::Var h, ad::Var delta) { return ad::sigmoid(score_logit(h, delta)); }

std::vector<ad::Var> bind_layers(ad::Tape& tape, std::vector<ad::Parameter>& layers) {
  std::vector<ad::Var> out;
  out.reserve(layers.size());
  for (auto& p : layers) out.push_back(tape.param(p));
  return out;
}

std::vector<ad::Var> freeze_layers(ad::Tape& tape, const std::vector<ad::Parameter>& layers) {
  std::vector<ad::Var> out;
  out.reserve(layers.size());
  for (const auto& p : layers) out.push_back(tape.leaf(p.value, nullptr));
  return out;
}

ad::Var lgnn_logit(ad::Tape& tape, const BipartiteGraph& g, NodeIndex u, NodeIndex i,
                   std::span<const ad::Var> layer_weights, ad::Var delta, const ModelConfig& cfg,
                   std::uint64_t seed, bool train_mode) {
  const LocalSubgraph sub = extract_local_graph(g, u, i, cfg.rwr, derive_seed(seed, {0x5b}));
  const ad::SparseMatrix adjacency = normalized_adjacency(sub);
  ad::Var x = tape.constant(encode_labels(sub, cfg.max_label));
  ad::Var h = gcn_forward(tape, adjacency, x, layer_weights, cfg.dropout, derive_seed(seed, {0xd0}),
                          train_mode);
  return score_logit(pool(h), delta);
}

double lgnn_logit_value(const BipartiteGraph& g, NodeIndex u, NodeIndex i,
                        std::span<const ad::Tensor> layer_weights, const ad::Tensor& delta,
                        const ModelConfig& cfg, std::uint64_t seed) {
  ad::Tape tape;
  std::vector<ad::Var> weights;
  weights.reserve(layer_weights.size());
  for (const auto& w : layer_weights) weights.push_back(tape.leaf(w, nullptr));
  ad::Var d = tape.leaf(delta, nullptr);
  return lgnn_logit(tape, g, u, i, weights, d, cfg, seed, false).value().item();
}

double lgnn_score(const BipartiteGraph& g, NodeIndex u, NodeIndex i,
                  std::span<const ad::Tensor> layer_weights, const ad::Tensor& delta,
                  const ModelConfig& cfg, std::uint64_t seed) {
  const double x = lgnn_logit_value(g, u, i, layer_weights, delta, cfg, seed);
  return 1.0 / (1.0 + std::exp(-x));
}

}  // namespace adapt
