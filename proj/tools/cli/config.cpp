#include "config.hpp"

#include <sstream>

#include "adapt/util/error.hpp"

namespace adapt::cli {

Json default_config() {
  return Json::parse(R"({
    "run": {"dir": "runs", "threads": 0},
    "synth": {"users": 100, "items": 100, "density": 0.05, "exponent": 1.0,
              "communities": 1, "cross_fraction": 0.0, "seed": 0},
    "split": {"val_frac": 0.05, "test_frac": 0.05, "keep_frac": 1.0, "seed": 0},
    "model": {"max_label": 32, "layer_dims": [32, 32, 32], "adaptor_hidden": 64,
              "dropout": 0.1, "bpr_on_logits": false,
              "rwr": {"restart_prob": 0.5, "walk_steps": 100, "max_nodes": 50}},
    "pretrain": {"batch_size": 256, "samples_per_epoch": 0, "learning_rate": 0.001,
                 "max_epochs": 20, "patience": 5, "holdout_frac": 0.05,
                 "train_adaptor": true, "seed": 0},
    "finetune": {"strategy": "direct", "batch_size": 256, "learning_rate": 0.001,
                 "max_epochs": 30, "patience": 0, "seed": 0},
    "eval": {"k": 5, "negatives": 49, "seeds": [1, 2, 3, 4, 5], "short_pool": "skip"},
    "mf": {"dim": 32, "learning_rate": 0.01, "l2": 0.0001, "init_std": 0.1,
           "batch_size": 256, "max_epochs": 60, "patience": 10, "seed": 0},
    "ablation": {"variants": ["random-init", "meta-lgnn", "customized-gnn", "adapt-d", "adapt-j"]}
  })");
}

void merge_config(Json& base, const Json& patch, const std::string& where) {
  if (!patch.is_object()) throw ConfigError("config" + (where.empty() ? "" : " section '" + where + "'") +
                                            " must be an object");
  for (const auto& [key, value] : patch.items()) {
    const std::string path = where.empty() ? key : where + "." + key;
    if (!base.contains(key)) throw ConfigError("unknown config key '" + path + "'");
    auto& slot = base[key];
    if (slot.is_object()) {
      merge_config(slot, value, path);
    } else {
      const bool number_ok = slot.is_number() && value.is_number();
      const bool same = slot.type() == value.type() || number_ok;
      if (!same) throw ConfigError("config key '" + path + "' has the wrong type");
      if (slot.is_number_unsigned() || slot.is_number_integer()) {
        if (!value.is_number_integer() && !value.is_number_unsigned())
          throw ConfigError("config key '" + path + "' must be an integer");
        if (value.get<long long>() < 0) throw ConfigError("config key '" + path + "' must be non-negative");
      }
      if (slot.is_number_float())
        slot = value.get<double>();
      else
        slot = value;
    }
  }
}

namespace {

Json parse_scalar(const Json& like, const std::string& text, const std::string& path) {
  try {
    std::size_t used = 0;
    if (like.is_boolean()) {
      if (text == "true" || text == "1") return true;
      if (text == "false" || text == "0") return false;
      throw ConfigError("");
    }
    if (like.is_number_integer() || like.is_number_unsigned()) {
      if (!text.empty() && text[0] == '-') throw ConfigError("");
      const auto v = std::stoull(text, &used);
      if (used != text.size()) throw ConfigError("");
      return v;
    }
    if (like.is_number_float()) {
      const double v = std::stod(text, &used);
      if (used != text.size()) throw ConfigError("");
      return v;
    }
    if (like.is_string()) return text;
  } catch (const std::exception&) {
  }
  throw ConfigError("invalid value '" + text + "' for '" + path + "'");
}

Json* find_path(Json& cfg, const std::string& dotted) {
  Json* node = &cfg;
  std::stringstream ss(dotted);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (!node->is_object() || !node->contains(part)) return nullptr;
    node = &(*node)[part];
  }
  return node;
}

template <typename T>
T get(const Json& cfg, const char* section, const char* key) {
  return cfg.at(section).at(key).get<T>();
}

}  // namespace

void set_config_value(Json& cfg, const std::string& dotted, const std::string& text) {
  Json* slot = find_path(cfg, dotted);
  if (!slot || slot->is_object()) throw ConfigError("unknown config key '" + dotted + "'");
  if (slot->is_array()) {
    const Json like = slot->empty() ? Json(std::string()) : (*slot)[0];
    Json list = Json::array();
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) list.push_back(parse_scalar(like, item, dotted));
    *slot = list;
  } else {
    *slot = parse_scalar(*slot, text, dotted);
  }
}

SynthConfig synth_config(const Json& cfg) {
  const auto& s = cfg.at("synth");
  SynthConfig c;
  c.user_count = s.at("users").get<std::size_t>();
  c.item_count = s.at("items").get<std::size_t>();
  c.target_density = s.at("density").get<double>();
  c.preferential_exponent = s.at("exponent").get<double>();
  c.communities = s.at("communities").get<std::size_t>();
  c.cross_fraction = s.at("cross_fraction").get<double>();
  c.seed = s.at("seed").get<std::uint64_t>();
  return c;
}

ModelConfig model_config(const Json& cfg) {
  const auto& m = cfg.at("model");
  ModelConfig c;
  c.max_label = m.at("max_label").get<std::size_t>();
  c.layer_dims = m.at("layer_dims").get<std::vector<std::size_t>>();
  c.adaptor_hidden = m.at("adaptor_hidden").get<std::size_t>();
  c.dropout = m.at("dropout").get<double>();
  c.bpr_on_logits = m.at("bpr_on_logits").get<bool>();
  c.rwr.restart_prob = m.at("rwr").at("restart_prob").get<double>();
  c.rwr.walk_steps = m.at("rwr").at("walk_steps").get<std::size_t>();
  c.rwr.max_nodes_per_side = m.at("rwr").at("max_nodes").get<std::size_t>();
  c.validate();
  return c;
}

PretrainConfig pretrain_config(const Json& cfg) {
  PretrainConfig c;
  c.batch_size = get<std::size_t>(cfg, "pretrain", "batch_size");
  c.samples_per_epoch = get<std::size_t>(cfg, "pretrain", "samples_per_epoch");
  c.learning_rate = get<double>(cfg, "pretrain", "learning_rate");
  c.max_epochs = get<std::size_t>(cfg, "pretrain", "max_epochs");
  c.patience = get<std::size_t>(cfg, "pretrain", "patience");
  c.holdout_frac = get<double>(cfg, "pretrain", "holdout_frac");
  c.train_adaptor = get<bool>(cfg, "pretrain", "train_adaptor");
  c.seed = get<std::uint64_t>(cfg, "pretrain", "seed");
  return c;
}

FinetuneConfig finetune_config(const Json& cfg) {
  FinetuneConfig c;
  c.batch_size = get<std::size_t>(cfg, "finetune", "batch_size");
  c.learning_rate = get<double>(cfg, "finetune", "learning_rate");
  c.max_epochs = get<std::size_t>(cfg, "finetune", "max_epochs");
  c.patience = get<std::size_t>(cfg, "finetune", "patience");
  c.seed = get<std::uint64_t>(cfg, "finetune", "seed");
  return c;
}

Strategy finetune_strategy(const Json& cfg) { return parse_strategy(get<std::string>(cfg, "finetune", "strategy")); }

EvalProtocol eval_protocol(const Json& cfg) {
  EvalProtocol p;
  p.k = get<std::size_t>(cfg, "eval", "k");
  p.negatives = get<std::size_t>(cfg, "eval", "negatives");
  p.seeds = cfg.at("eval").at("seeds").get<std::vector<std::uint64_t>>();
  const auto policy = get<std::string>(cfg, "eval", "short_pool");
  if (policy == "skip")
    p.short_pool = ShortPoolPolicy::Skip;
  else if (policy == "use-all")
    p.short_pool = ShortPoolPolicy::UseAll;
  else
    throw ConfigError("unknown eval.short_pool '" + policy + "' (expected skip or use-all)");
  p.validate();
  if (p.seeds.empty()) throw ConfigError("eval.seeds must not be empty");
  return p;
}

MfConfig mf_config(const Json& cfg) {
  MfConfig c;
  c.dim = get<std::size_t>(cfg, "mf", "dim");
  c.learning_rate = get<double>(cfg, "mf", "learning_rate");
  c.l2 = get<double>(cfg, "mf", "l2");
  c.init_std = get<double>(cfg, "mf", "init_std");
  c.batch_size = get<std::size_t>(cfg, "mf", "batch_size");
  c.max_epochs = get<std::size_t>(cfg, "mf", "max_epochs");
  c.patience = get<std::size_t>(cfg, "mf", "patience");
  c.seed = get<std::uint64_t>(cfg, "mf", "seed");
  return c;
}

ExperimentConfig experiment_config(const Json& cfg) {
  ExperimentConfig c;
  c.model = model_config(cfg);
  c.finetune = finetune_config(cfg);
  c.mf = mf_config(cfg);
  c.protocol = eval_protocol(cfg);
  c.val_frac = get<double>(cfg, "split", "val_frac");
  c.test_frac = get<double>(cfg, "split", "test_frac");
  c.keep_frac = get<double>(cfg, "split", "keep_frac");
  return c;
}

std::vector<Variant> experiment_variants(const Json& cfg) {
  std::vector<Variant> out;
  for (const auto& v : cfg.at("ablation").at("variants")) out.push_back(parse_variant(v.get<std::string>()));
  if (out.empty()) throw ConfigError("ablation.variants must not be empty");
  return out;
}

}  // namespace adapt::cli
