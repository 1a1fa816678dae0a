#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adapt/ad/adam.hpp"
#include "adapt/ad/ops.hpp"
#include "adapt/graph/bipartite_graph.hpp"
#include "adapt/graph/edge_io.hpp"
#include "adapt/model/checkpoint.hpp"

namespace adapt {

/// -ln sigmoid(s_pos - s_neg) for one pair of scalar scores.
ad::Var bpr_loss(ad::Var s_pos, ad::Var s_neg);
/// Summed BPR loss over a batch of score pairs.
ad::Var bpr_loss(std::span<const ad::Var> s_pos, std::span<const ad::Var> s_neg);
double bpr_value(double s_pos, double s_neg);

/// One BPR training example drawn from graph `graph`.
struct Triplet {
  std::size_t graph{0};
  NodeIndex user{0};
  NodeIndex pos_item{0};
  NodeIndex neg_item{0};
};

/// A graph as seen by the trainer: the edges available for subgraph
/// extraction and positives, plus the full interaction set used to reject
/// false negatives.
struct TrainGraph {
  BipartiteGraph train;
  BipartiteGraph known;  // every interaction that must never be a negative
  std::array<double, kPropertyCount> p_norm{};
};

/// Which parameters a BPR step differentiates and updates.
enum class ParamMode {
  /// Meta weights, adaptor and scorer (pre-training, joint fine-tuning).
  MetaAdaptorScorer,
  /// Meta weights and scorer, adaptor bypassed (no-adaptor ablation, scratch).
  MetaScorer,
  /// Customised weights and scorer (direct fine-tuning).
  CustomScorer,
};

/// Names of the parameters optimised under `mode` for a given architecture.
std::vector<std::string> trainable_parameter_names(const ModelConfig& cfg, ParamMode mode);

/// Mutable model state a BPR step operates on.
struct StepModel {
  std::vector<ad::Parameter>* layers{nullptr};  // meta or customised weights
  ad::Parameter* delta{nullptr};
  AdaptorParams* adaptor{nullptr};  // null: layers are used as given
  bool train_adaptor{true};
  ModelConfig config;

  std::vector<ad::Parameter*> parameters() const;
};

StepModel make_step_model(Checkpoint& ck, ParamMode mode);

/// Summed BPR loss of a single-graph batch. With compute_grads the gradients
/// of every trainable parameter of `model` are accumulated, including through
/// FiLM and the adaptor when present. Triplets are processed independently
/// and reduced in index order, so results do not depend on thread count.
double bpr_batch(StepModel& model, const TrainGraph& graph, std::span<const Triplet> batch,
                 std::uint64_t seed, bool train_mode, bool compute_grads);

/// b positives from g.train (without replacement when possible) each paired
/// with one uniformly drawn negative item unknown to g.known.
std::vector<Triplet> sample_triplets(const TrainGraph& g, std::size_t graph_id, std::size_t b, Rng& rng,
                                     bool* with_replacement = nullptr);

/// One row of a training log.
struct EpochRecord {
  std::size_t epoch{0};
  double train_loss{0};  // mean per triplet
  double val_loss{0};    // pre-training held-out BPR (mean); NaN when unused
  double val_hr{0};      // fine-tuning validation HR; NaN when unused
};

void write_epoch_log(std::ostream& out, std::span<const EpochRecord> log);

struct PretrainConfig {
  std::size_t batch_size{256};
  /// Positives visited per epoch; 0 means the total number of training edges.
  std::size_t samples_per_epoch{0};
  double learning_rate{0.001};
  std::size_t max_epochs{20};
  std::size_t patience{5};
  double holdout_frac{0.05};
  /// False freezes the adaptor at identity (no-adaptor ablation).
  bool train_adaptor{true};
  std::uint64_t seed{0};
};

struct PretrainResult {
  Checkpoint checkpoint;
  std::vector<EpochRecord> log;
  std::size_t best_epoch{0};
  std::size_t steps{0};
};

/// Multi-graph pre-training: each step samples a graph uniformly, customises
/// the meta model through the adaptor and minimises BPR over b triplets.
/// Stops after max_epochs or `patience` epochs without held-out improvement,
/// returning the best held-out parameters.
PretrainResult pretrain(std::span<const BipartiteGraph> graphs, const ModelConfig& model_cfg,
                        const PretrainConfig& cfg);

enum class Strategy { Direct, Joint };

Strategy parse_strategy(const std::string& s);
std::string to_string(Strategy s);

struct EvalProtocol;  // eval/protocol.hpp

struct FinetuneConfig {
  std::size_t batch_size{256};
  double learning_rate{0.001};
  std::size_t max_epochs{30};
  /// Stop after this many epochs without a new best validation HR (0 = never).
  std::size_t patience{0};
  std::uint64_t seed{0};
};

struct FinetuneResult {
  Checkpoint model;  // parameters of the best validation epoch
  std::vector<EpochRecord> log;
  std::size_t best_epoch{0};
  double best_val_hr{0};
  std::size_t steps{0};
};

/// Fine-tunes on the training partition of `target`, selecting the epoch with
/// the highest validation HR (epoch 0 = the untouched starting model).
///
/// Direct: weights are customised once through the frozen adaptor and then
/// optimised together with the scorer; the result stores them with the
/// adaptor disabled. Joint: meta weights, adaptor and scorer are optimised
/// with the target's property vector fixed. A checkpoint with use_adaptor
/// false trains its layers as-is under either strategy.
FinetuneResult finetune(const Checkpoint& start, const Manifest& target, Strategy strategy,
                        const FinetuneConfig& cfg, const EvalProtocol& protocol);

}  // namespace adapt
