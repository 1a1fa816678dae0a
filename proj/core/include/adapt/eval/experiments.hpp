#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adapt/eval/mf.hpp"
#include "adapt/eval/protocol.hpp"
#include "adapt/graph/edge_io.hpp"
#include "adapt/model/checkpoint.hpp"
#include "adapt/train/trainer.hpp"

namespace adapt {

/// Model variants that can be scored on a target graph.
enum class Variant {
  RandomInit,  // untrained weights, no adaptor
  Meta,        // pre-trained meta weights, adaptor bypassed
  Customized,  // pre-trained weights customised by the adaptor, no fine-tuning
  AdaptD,      // direct fine-tuning
  AdaptJ,      // joint fine-tuning
  AdaptBest,   // AdaptD or AdaptJ, whichever validates higher on each seed
  Scratch,     // same architecture trained only on the target
  Mf,          // matrix factorisation trained on the target
};

std::string to_string(Variant v);
Variant parse_variant(const std::string& s);

/// The five rows of the ablation table, in order.
std::vector<Variant> ablation_variants();

struct ExperimentConfig {
  ModelConfig model;
  FinetuneConfig finetune;
  MfConfig mf;
  EvalProtocol protocol;
  double val_frac{0.05};
  double test_frac{0.05};
  /// Fraction of training edges kept on the target (1 keeps all).
  double keep_frac{1.0};
};

/// The target's partition for one protocol seed (split, then sparsified).
Manifest target_split(const BipartiteGraph& target, const ExperimentConfig& cfg, std::uint64_t seed);

/// Test HR of a model on a partitioned target, scored on its training graph.
double test_hr(const Checkpoint& model, const Manifest& split, const EvalProtocol& protocol, std::uint64_t seed);

struct VariantRow {
  Variant variant{Variant::RandomInit};
  SeedSummary hr;
};

struct ExperimentReport {
  std::vector<VariantRow> rows;
  std::vector<std::uint64_t> seeds;
  std::vector<std::pair<std::string, std::string>> meta;

  const VariantRow& row(Variant v) const;
};

/// Test HR of each requested variant on every protocol seed. `pretrained` is
/// required for every variant except RandomInit, Scratch and Mf.
ExperimentReport run_variants(const Checkpoint* pretrained, const BipartiteGraph& target,
                              std::span<const Variant> variants, const ExperimentConfig& cfg);

/// Tab-separated table: variant, mean, std, mean±std (percent), then one
/// column per seed.
void write_report(std::ostream& out, const ExperimentReport& report);
/// Space-separated key=value lines: one header line with the meta entries
/// (dataset taken from meta "dataset", default "target"), then per variant
/// one line per seed (seed, hr) and one aggregate line (mean, std).
void write_summary(std::ostream& out, const ExperimentReport& report);

}  // namespace adapt
