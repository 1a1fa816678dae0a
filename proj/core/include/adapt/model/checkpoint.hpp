#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "adapt/model/lgnn.hpp"
#include "adapt/props/properties.hpp"

namespace adapt {

/// Everything needed to score pairs on a new graph: architecture, frozen
/// property normalisation, meta weights, scorer and adaptor.
///
/// When use_adaptor is false the layer weights are used as stored (a meta
/// model without adaptation, or weights already customised for one graph).
struct Checkpoint {
  ModelConfig config;
  NormStats norm;
  bool use_adaptor{true};
  MetaLgnnParams meta;
  AdaptorParams adaptor;
  /// Free-form provenance (training hyperparameters, strategy, seeds).
  std::vector<std::pair<std::string, std::string>> info;

  static Checkpoint fresh(const ModelConfig& cfg, std::uint64_t seed);

  /// The convolution weights to use on a graph with normalised properties p.
  std::vector<ad::Tensor> effective_layers(const std::array<double, kPropertyCount>& p_norm) const;
  std::vector<ad::Tensor> effective_layers(const BipartiteGraph& train_graph) const;

  std::string info_value(const std::string& key, const std::string& fallback = "") const;
};

/// Text container ("# adapt-checkpoint v1" header, then config/info/norm
/// lines and param blocks). Values round-trip bit-exactly.
void write_checkpoint(std::ostream& out, const Checkpoint& ck);
void write_checkpoint_file(const std::string& path, const Checkpoint& ck);
Checkpoint read_checkpoint(std::istream& in);
Checkpoint read_checkpoint_file(const std::string& path);

}  // namespace adapt
