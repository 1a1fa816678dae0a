#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "adapt/eval/experiments.hpp"
#include "adapt/graph/synth.hpp"
#include "adapt/train/trainer.hpp"

namespace adapt::cli {

using Json = nlohmann::ordered_json;

/// Every tunable of every command with its default value.
Json default_config();

/// Overlays `patch` onto `base`. Keys absent from `base` are rejected so that
/// typos in config files surface as errors.
void merge_config(Json& base, const Json& patch, const std::string& where = "");

/// Sets the value at a dotted path ("model.dropout") from its text form,
/// converting to the type of the existing entry. Lists are comma separated.
void set_config_value(Json& cfg, const std::string& dotted, const std::string& text);

SynthConfig synth_config(const Json& cfg);
ModelConfig model_config(const Json& cfg);
PretrainConfig pretrain_config(const Json& cfg);
FinetuneConfig finetune_config(const Json& cfg);
Strategy finetune_strategy(const Json& cfg);
EvalProtocol eval_protocol(const Json& cfg);
MfConfig mf_config(const Json& cfg);
ExperimentConfig experiment_config(const Json& cfg);
std::vector<Variant> experiment_variants(const Json& cfg);

}  // namespace adapt::cli
