#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "adapt/ad/ops.hpp"
#include "adapt/ad/tape.hpp"
#include "adapt/ad/tensor.hpp"
#include "adapt/graph/bipartite_graph.hpp"
#include "adapt/props/properties.hpp"
#include "adapt/subgraph/local_subgraph.hpp"
#include "adapt/util/rng.hpp"

namespace adapt {

/// Architecture and sampling hyperparameters shared by every model variant.
struct ModelConfig {
  /// Largest DRNL label kept distinct; the one-hot input has max_label + 1 slots.
  std::size_t max_label{kMaxLabel};
  /// Output width of each convolution layer; size() is the layer count.
  std::vector<std::size_t> layer_dims{32, 32, 32};
  std::size_t adaptor_hidden{64};
  double dropout{0.1};
  /// Feed h.delta (rather than sigmoid(h.delta)) into the BPR difference.
  bool bpr_on_logits{false};
  RwrConfig rwr;

  std::size_t layer_count() const noexcept { return layer_dims.size(); }
  std::size_t input_dim() const noexcept { return max_label + 1; }
  std::size_t layer_in(std::size_t l) const { return l == 0 ? input_dim() : layer_dims[l - 1]; }
  std::size_t layer_out(std::size_t l) const { return layer_dims[l]; }
  /// Length of the adapting vector for layer l: 2 * d_in * d_out.
  std::size_t film_size(std::size_t l) const { return 2 * layer_in(l) * layer_out(l); }
  void validate() const;
};

/// Convolution weights and scorer of the shared model.
struct MetaLgnnParams {
  std::vector<ad::Parameter> layers;  // "theta.<l>", d_in x d_out
  ad::Parameter delta;                // "delta", length d_L
};

/// Hypernetwork: tanh trunk then one linear head per layer.
struct AdaptorParams {
  ad::Parameter trunk_w;              // kPropertyCount x hidden
  ad::Parameter trunk_b;              // hidden
  std::vector<ad::Parameter> head_w;  // hidden x film_size(l)
  std::vector<ad::Parameter> head_b;  // film_size(l)
};

/// Customised per-graph convolution weights (delta stays shared).
struct AdaptedParams {
  std::vector<ad::Tensor> layers;
};

MetaLgnnParams init_meta_params(const ModelConfig& cfg, std::uint64_t seed);
/// Trunk randomly initialised, heads zero so the adaptor starts as identity.
AdaptorParams init_adaptor_params(const ModelConfig& cfg, std::uint64_t seed);

/// One-hot DRNL labels, n x (max_label + 1); labels above max_label use the
/// last slot.
ad::Tensor encode_labels(const LocalSubgraph& sub, std::size_t max_label);

/// D^-1/2 (A + I) D^-1/2 of the local graph in coordinate form.
ad::SparseMatrix normalized_adjacency(const LocalSubgraph& sub);

/// H^l = act(Ahat H^{l-1} W^l); ReLU on hidden layers, identity on the last,
/// dropout after each hidden layer in train mode.
ad::Var gcn_forward(ad::Tape& tape, const ad::SparseMatrix& adjacency, ad::Var features,
                    std::span<const ad::Var> layer_weights, double dropout, std::uint64_t seed,
                    bool train_mode);

/// Mean over node rows.
ad::Var pool(ad::Var node_states);

/// h . delta (pre-sigmoid score).
ad::Var score_logit(ad::Var h, ad::Var delta);
/// sigmoid(h . delta).
ad::Var score(ad::Var h, ad::Var delta);

/// Tape handles for the adaptor weights.
struct AdaptorVars {
  ad::Var trunk_w, trunk_b;
  std::vector<ad::Var> head_w, head_b;
};
/// Trainable bindings accumulate gradients into the parameters; frozen ones
/// treat them as constants.
AdaptorVars bind_adaptor(ad::Tape& tape, AdaptorParams& p);
AdaptorVars freeze_adaptor(ad::Tape& tape, const AdaptorParams& p);
std::vector<ad::Var> bind_layers(ad::Tape& tape, std::vector<ad::Parameter>& layers);
std::vector<ad::Var> freeze_layers(ad::Tape& tape, const std::vector<ad::Parameter>& layers);

/// Adapting vectors phi^l (length film_size(l)); the first half of each is
/// gamma and carries a constant +1 offset, the second half is beta.
std::vector<ad::Var> adaptor_forward(ad::Tape& tape, const std::array<double, kPropertyCount>& p_norm,
                                     const AdaptorVars& adaptor, const ModelConfig& cfg);

/// theta_m = theta * gamma + beta with (gamma, beta) the two row-major halves
/// of phi. Throws ShapeError when phi has the wrong length.
ad::Var film_adapt(ad::Var theta, ad::Var phi);
std::vector<ad::Var> film_adapt(std::span<const ad::Var> thetas, std::span<const ad::Var> phis);

/// Computes the customised weights without tracking gradients.
AdaptedParams adapt_weights(const MetaLgnnParams& meta, const AdaptorParams& adaptor,
                            const std::array<double, kPropertyCount>& p_norm, const ModelConfig& cfg);

/// Extract, label, encode and run the model on one pair. Returns the
/// pre-sigmoid score h.delta; wrap with ad::sigmoid for s.
ad::Var lgnn_logit(ad::Tape& tape, const BipartiteGraph& g, NodeIndex u, NodeIndex i,
                   std::span<const ad::Var> layer_weights, ad::Var delta, const ModelConfig& cfg,
                   std::uint64_t seed, bool train_mode);

/// Forward-only pre-sigmoid score h.delta for one pair with concrete weights.
/// Ranks exactly like lgnn_score but never saturates.
double lgnn_logit_value(const BipartiteGraph& g, NodeIndex u, NodeIndex i,
                        std::span<const ad::Tensor> layer_weights, const ad::Tensor& delta,
                        const ModelConfig& cfg, std::uint64_t seed);

/// Forward-only score s in (0, 1) for one pair with concrete weights.
double lgnn_score(const BipartiteGraph& g, NodeIndex u, NodeIndex i,
                  std::span<const ad::Tensor> layer_weights, const ad::Tensor& delta,
                  const ModelConfig& cfg, std::uint64_t seed);

/// Seed of the subgraph sample for pair (u, i) under a scoring seed.
inline std::uint64_t pair_seed(std::uint64_t seed, NodeIndex u, NodeIndex i) {
  return derive_seed(seed, {0x70a1, u, i});
}

}  // namespace adapt
