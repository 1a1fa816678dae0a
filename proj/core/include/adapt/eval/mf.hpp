#pragma once

#include <cstdint>
#include <vector>

#include "adapt/ad/tensor.hpp"
#include "adapt/eval/protocol.hpp"
#include "adapt/graph/edge_io.hpp"
#include "adapt/train/trainer.hpp"

namespace adapt {

/// Matrix factorisation trained with BPR on raw dot-product scores.
struct MfConfig {
  std::size_t dim{32};
  double learning_rate{0.01};
  double l2{1e-4};
  double init_std{0.1};
  std::size_t batch_size{256};
  std::size_t max_epochs{60};
  /// Stop after this many epochs without a new best validation HR (0 = never).
  std::size_t patience{10};
  std::uint64_t seed{0};
};

struct MfModel {
  ad::Tensor users;  // user_count x dim
  ad::Tensor items;  // item_count x dim

  double score(NodeIndex u, NodeIndex i) const;
};

MfModel init_mf(std::size_t user_count, std::size_t item_count, const MfConfig& cfg);
PairScorer mf_scorer(MfModel model);

struct MfResult {
  MfModel model;  // best validation epoch
  std::vector<EpochRecord> log;
  std::size_t best_epoch{0};
  double best_val_hr{0};
};

MfResult train_mf(const Manifest& target, const MfConfig& cfg, const EvalProtocol& protocol);

}  // namespace adapt
