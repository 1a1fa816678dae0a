#include "adapt/train/trainer.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "adapt/eval/protocol.hpp"
#include "adapt/graph/split.hpp"
#include "adapt/util/error.hpp"
#include "adapt/util/parallel.hpp"
#include "adapt/util/text.hpp"

namespace adapt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void append_adaptor_names(const ModelConfig& cfg, std::vector<std::string>& out) {
  out.push_back("adaptor.trunk.w");
  out.push_back("adaptor.trunk.b");
  for (std::size_t l = 0; l < cfg.layer_count(); ++l) {
    out.push_back("adaptor.head." + std::to_string(l + 1) + ".w");
    out.push_back("adaptor.head." + std::to_string(l + 1) + ".b");
  }
}

// Gives every parameter a gradient so an update never trips over a weight the
// batch did not reach.
void ensure_grads(std::span<ad::Parameter* const> params) {
  for (auto* p : params)
    if (!p->grad) p->grad.emplace(p->value.shape());
}

NodeIndex draw_negative(const TrainGraph& g, NodeIndex user, Rng& rng) {
  const std::size_t items = g.train.item_count();
  const std::size_t taken = user < g.known.user_count() ? g.known.items_of(user).size() : 0;
  if (taken >= items)
    throw InsufficientNegatives("user " + g.train.user_ids().id(user) + " has interacted with every item");
  for (int attempt = 0; attempt < 64; ++attempt) {
    const auto j = static_cast<NodeIndex>(uniform_index(rng, items));
    if (!g.known.has_edge(user, j)) return j;
  }
  std::vector<NodeIndex> pool;
  pool.reserve(items - taken);
  for (NodeIndex j = 0; j < items; ++j)
    if (!g.known.has_edge(user, j)) pool.push_back(j);
  return pool[uniform_index(rng, pool.size())];
}

std::vector<Triplet> make_triplets(const TrainGraph& g, std::size_t graph_id, std::span<const Edge> positives,
                                   Rng& rng) {
  std::vector<Triplet> out;
  out.reserve(positives.size());
  for (const auto& e : positives) out.push_back({graph_id, e.user, e.item, draw_negative(g, e.user, rng)});
  return out;
}

std::vector<ad::Tensor> snapshot_layers(const std::vector<ad::Parameter>& layers) {
  std::vector<ad::Tensor> out;
  for (const auto& p : layers) out.push_back(p.value);
  return out;
}

}  // namespace

std::vector<std::string> trainable_parameter_names(const ModelConfig& cfg, ParamMode mode) {
  std::vector<std::string> out;
  for (std::size_t l = 0; l < cfg.layer_count(); ++l) out.push_back("theta." + std::to_string(l + 1));
  out.push_back("delta");
  if (mode == ParamMode::MetaAdaptorScorer) append_adaptor_names(cfg, out);
  return out;
}

std::vector<ad::Parameter*> StepModel::parameters() const {
  std::vector<ad::Parameter*> out;
  for (auto& p : *layers) out.push_back(&p);
  out.push_back(delta);
  if (adaptor && train_adaptor) {
    out.push_back(&adaptor->trunk_w);
    out.push_back(&adaptor->trunk_b);
    for (std::size_t l = 0; l < adaptor->head_w.size(); ++l) {
      out.push_back(&adaptor->head_w[l]);
      out.push_back(&adaptor->head_b[l]);
    }
  }
  return out;
}

StepModel make_step_model(Checkpoint& ck, ParamMode mode) {
  StepModel m;
  m.layers = &ck.meta.layers;
  m.delta = &ck.meta.delta;
  m.config = ck.config;
  if (mode == ParamMode::MetaAdaptorScorer) {
    if (!ck.use_adaptor) throw ConfigError("checkpoint has no adaptor to train");
    m.adaptor = &ck.adaptor;
    m.train_adaptor = true;
  } else {
    m.train_adaptor = false;
  }
  return m;
}

double bpr_batch(StepModel& model, const TrainGraph& graph, std::span<const Triplet> batch,
                 std::uint64_t seed, bool train_mode, bool compute_grads) {
  const std::size_t layer_count = model.layers->size();

  // Customised weights for this graph. When the adaptor is present they are
  // recorded on `outer` so gradients can later flow back through FiLM.
  ad::Tape outer;
  std::vector<ad::Var> adapted;
  std::vector<const ad::Tensor*> weights;
  if (model.adaptor) {
    auto thetas = compute_grads ? bind_layers(outer, *model.layers) : freeze_layers(outer, *model.layers);
    auto avars = compute_grads && model.train_adaptor ? bind_adaptor(outer, *model.adaptor)
                                                      : freeze_adaptor(outer, *model.adaptor);
    adapted = film_adapt(thetas, adaptor_forward(outer, graph.p_norm, avars, model.config));
    for (auto v : adapted) weights.push_back(&v.value());
  } else {
    for (const auto& p : *model.layers) weights.push_back(&p.value);
  }

  struct Slot {
    double loss{0};
    std::vector<std::optional<ad::Tensor>> layer_grads;
    std::optional<ad::Tensor> delta_grad;
  };
  std::vector<Slot> slots(batch.size());
  parallel_for(batch.size(), [&](std::size_t k) {
    Slot& slot = slots[k];
    slot.layer_grads.resize(layer_count);
    ad::Tape tape;
    std::vector<ad::Var> w;
    for (std::size_t l = 0; l < layer_count; ++l)
      w.push_back(tape.leaf(*weights[l], compute_grads ? &slot.layer_grads[l] : nullptr));
    ad::Var delta = tape.leaf(model.delta->value, compute_grads ? &slot.delta_grad : nullptr);
    const Triplet& t = batch[k];
    ad::Var pos = lgnn_logit(tape, graph.train, t.user, t.pos_item, w, delta, model.config,
                             derive_seed(seed, {k, 0}), train_mode);
    ad::Var neg = lgnn_logit(tape, graph.train, t.user, t.neg_item, w, delta, model.config,
                             derive_seed(seed, {k, 1}), train_mode);
    if (!model.config.bpr_on_logits) {
      pos = ad::sigmoid(pos);
      neg = ad::sigmoid(neg);
    }
    ad::Var loss = bpr_loss(pos, neg);
    slot.loss = loss.value().item();
    if (compute_grads) tape.backward(loss);
  });

  double total = 0.0;
  for (const auto& s : slots) total += s.loss;
  if (!compute_grads) return total;

  std::vector<ad::Tensor> layer_grads;
  for (std::size_t l = 0; l < layer_count; ++l) layer_grads.emplace_back(weights[l]->shape());
  if (!model.delta->grad) model.delta->grad.emplace(model.delta->value.shape());
  for (const auto& s : slots) {
    for (std::size_t l = 0; l < layer_count; ++l)
      if (s.layer_grads[l]) layer_grads[l].add_(*s.layer_grads[l]);
    if (s.delta_grad) model.delta->grad->add_(*s.delta_grad);
  }

  if (model.adaptor) {
    // d/dx sum(theta_m * G) = G dtheta_m/dx: replays the reduced gradient
    // through FiLM and the adaptor.
    ad::Var surrogate = ad::sum(ad::mul(adapted[0], outer.constant(std::move(layer_grads[0]))));
    for (std::size_t l = 1; l < layer_count; ++l)
      surrogate = ad::add(surrogate, ad::sum(ad::mul(adapted[l], outer.constant(std::move(layer_grads[l])))));
    outer.backward(surrogate);
  } else {
    for (std::size_t l = 0; l < layer_count; ++l) {
      auto& p = (*model.layers)[l];
      if (!p.grad) p.grad.emplace(p.value.shape());
      p.grad->add_(layer_grads[l]);
    }
  }
  return total;
}

std::vector<Triplet> sample_triplets(const TrainGraph& g, std::size_t graph_id, std::size_t b, Rng& rng,
                                     bool* with_replacement) {
  const auto edges = g.train.edges();
  if (edges.empty()) throw EmptyGraphError("cannot sample triplets from a graph without edges");
  std::vector<Edge> positives;
  positives.reserve(b);
  const bool replace = b > edges.size();
  if (with_replacement) *with_replacement = replace;
  if (replace) {
    for (std::size_t k = 0; k < b; ++k) positives.push_back(edges[uniform_index(rng, edges.size())]);
  } else {
    std::vector<std::size_t> idx(edges.size());
    for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
    for (std::size_t k = 0; k < b; ++k) {
      const auto j = k + static_cast<std::size_t>(uniform_index(rng, idx.size() - k));
      std::swap(idx[k], idx[j]);
      positives.push_back(edges[idx[k]]);
    }
  }
  return make_triplets(g, graph_id, positives, rng);
}

void write_epoch_log(std::ostream& out, std::span<const EpochRecord> log) {
  out << "epoch\ttrain_loss\tval_loss\tval_hr\n";
  auto cell = [](double v) { return std::isnan(v) ? std::string("-") : format_exact(v); };
  for (const auto& r : log)
    out << r.epoch << '\t' << cell(r.train_loss) << '\t' << cell(r.val_loss) << '\t' << cell(r.val_hr) << '\n';
}

PretrainResult pretrain(std::span<const BipartiteGraph> graphs, const ModelConfig& model_cfg,
                        const PretrainConfig& cfg) {
  if (graphs.empty()) throw ConfigError("pre-training needs at least one graph");
  if (cfg.batch_size == 0) throw ConfigError("batch_size must be positive");
  if (!(cfg.learning_rate > 0)) throw ConfigError("learning_rate must be positive");
  if (cfg.holdout_frac < 0 || cfg.holdout_frac >= 1) throw ConfigError("holdout_frac must lie in [0, 1)");
  model_cfg.validate();

  PretrainResult result;
  Checkpoint& ck = result.checkpoint;
  ck = Checkpoint::fresh(model_cfg, cfg.seed);
  ck.use_adaptor = cfg.train_adaptor;

  std::vector<TrainGraph> corpus(graphs.size());
  std::vector<std::vector<Triplet>> heldout(graphs.size());
  std::vector<PropertyVector> props;
  std::size_t total_edges = 0;
  for (std::size_t m = 0; m < graphs.size(); ++m) {
    EdgeSplit split;
    try {
      split = split_dataset(graphs[m], cfg.holdout_frac, 0.0, derive_seed(cfg.seed, {0x401d, m}));
    } catch (const SplitInfeasible&) {
      split.train.assign(graphs[m].edges().begin(), graphs[m].edges().end());
      split.val.clear();
    }
    corpus[m].train = graphs[m].with_edges(split.train);
    corpus[m].known = graphs[m];
    total_edges += split.train.size();
    PropertyOptions popts;
    popts.seed = derive_seed(cfg.seed, {0x9e0, m});
    props.push_back(compute_properties(corpus[m].train, popts));
    Rng neg_rng(derive_seed(cfg.seed, {0x4e9, m}));
    heldout[m] = make_triplets(corpus[m], m, split.val, neg_rng);
  }
  ck.norm = fit_norm(props);
  for (std::size_t m = 0; m < graphs.size(); ++m) corpus[m].p_norm = normalize(props[m], ck.norm);

  std::size_t corpus_edges = 0;
  for (const auto& g : graphs) corpus_edges += g.edge_count();
  if (cfg.samples_per_epoch >= corpus_edges && cfg.samples_per_epoch > 0)
    throw ConfigError("samples_per_epoch must be below the corpus edge count " + std::to_string(corpus_edges));
  const std::size_t samples =
      cfg.samples_per_epoch ? cfg.samples_per_epoch : std::max<std::size_t>(1, std::min(total_edges, corpus_edges - 1));
  const std::size_t steps_per_epoch = (samples + cfg.batch_size - 1) / cfg.batch_size;
  std::size_t heldout_count = 0;
  for (const auto& h : heldout) heldout_count += h.size();

  StepModel model = make_step_model(ck, cfg.train_adaptor ? ParamMode::MetaAdaptorScorer : ParamMode::MetaScorer);
  const auto params = model.parameters();
  ad::AdamState adam{{cfg.learning_rate}, 0, {}, {}};
  Rng rng(derive_seed(cfg.seed, {0x57e9}));

  auto heldout_loss = [&] {
    if (heldout_count == 0) return kNaN;
    double total = 0.0;
    for (std::size_t m = 0; m < corpus.size(); ++m)
      if (!heldout[m].empty())
        total += bpr_batch(model, corpus[m], heldout[m], derive_seed(cfg.seed, {0x4e1d, m}), false, false);
    return total / static_cast<double>(heldout_count);
  };

  double best = std::numeric_limits<double>::infinity();
  Checkpoint best_ck = ck;
  std::size_t stale = 0;
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    double loss = 0.0;
    std::size_t seen = 0;
    for (std::size_t s = 0; s < steps_per_epoch; ++s) {
      const auto m = static_cast<std::size_t>(uniform_index(rng, corpus.size()));
      bool replaced = false;
      const auto batch = sample_triplets(corpus[m], m, cfg.batch_size, rng, &replaced);
      if (replaced)
        spdlog::warn("graph {} has {} training edges for a batch of {}; sampling positives with replacement", m,
                     corpus[m].train.edge_count(), cfg.batch_size);
      loss += bpr_batch(model, corpus[m], batch, derive_seed(cfg.seed, {0x5e7, result.steps}), true, true);
      seen += batch.size();
      ensure_grads(params);
      ad::adam_step(params, adam);
      ++result.steps;
    }
    const double val = heldout_loss();
    result.log.push_back({epoch, loss / static_cast<double>(seen), val, kNaN});
    if (std::isnan(val) || val < best) {
      best = std::isnan(val) ? best : val;
      best_ck = ck;
      result.best_epoch = epoch;
      stale = 0;
    } else if (++stale >= cfg.patience && cfg.patience > 0) {
      break;
    }
  }
  if (result.best_epoch > 0) ck = std::move(best_ck);

  ck.info = {{"stage", "pretrain"},
             {"graphs", std::to_string(graphs.size())},
             {"batch_size", std::to_string(cfg.batch_size)},
             {"samples_per_epoch", std::to_string(samples)},
             {"learning_rate", format_exact(cfg.learning_rate)},
             {"epochs_run", std::to_string(result.log.size())},
             {"best_epoch", std::to_string(result.best_epoch)},
             {"seed", std::to_string(cfg.seed)}};
  return result;
}

Strategy parse_strategy(const std::string& s) {
  if (s == "direct") return Strategy::Direct;
  if (s == "joint") return Strategy::Joint;
  throw ConfigError("unknown fine-tuning strategy '" + s + "' (expected direct or joint)");
}

std::string to_string(Strategy s) { return s == Strategy::Direct ? "direct" : "joint"; }

FinetuneResult finetune(const Checkpoint& start, const Manifest& target, Strategy strategy,
                        const FinetuneConfig& cfg, const EvalProtocol& protocol) {
  if (cfg.batch_size == 0) throw ConfigError("batch_size must be positive");
  if (!(cfg.learning_rate > 0)) throw ConfigError("learning_rate must be positive");
  protocol.validate();

  FinetuneResult result;
  Checkpoint ck = start;
  TrainGraph tg;
  tg.train = target.train_graph();
  tg.known = tg.train;
  if (tg.train.edge_count() == 0) throw EmptyGraphError("target has no training edges");

  ParamMode mode = ParamMode::MetaScorer;
  if (ck.use_adaptor) {
    PropertyOptions popts;
    popts.seed = cfg.seed;
    tg.p_norm = normalize(compute_properties(tg.train, popts), ck.norm);
    if (strategy == Strategy::Direct) {
      auto custom = ck.effective_layers(tg.p_norm);
      for (std::size_t l = 0; l < custom.size(); ++l) ck.meta.layers[l].value = std::move(custom[l]);
      ck.use_adaptor = false;
      mode = ParamMode::CustomScorer;
    } else {
      mode = ParamMode::MetaAdaptorScorer;
    }
  }

  StepModel model = make_step_model(ck, mode);
  const auto params = model.parameters();
  ad::AdamState adam{{cfg.learning_rate}, 0, {}, {}};
  Rng rng(derive_seed(cfg.seed, {0xf1e}));
  const std::uint64_t score_seed = derive_seed(cfg.seed, {0x5c0});

  auto val_hr = [&]() -> double {
    if (target.split.val.empty()) return kNaN;
    auto layers = ck.use_adaptor ? ck.effective_layers(tg.p_norm) : snapshot_layers(ck.meta.layers);
    auto scorer = lgnn_scorer(std::move(layers), ck.meta.delta.value, ck.config, tg.train, score_seed);
    try {
      return evaluate_hr(scorer, target.graph, target.split.val, protocol, cfg.seed).hr;
    } catch (const ProtocolError&) {
      return kNaN;
    }
  };

  double best = val_hr();
  result.log.push_back({0, kNaN, kNaN, best});
  Checkpoint best_ck = ck;
  std::size_t stale = 0;
  std::vector<Edge> positives(tg.train.edges().begin(), tg.train.edges().end());
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    shuffle(positives, rng);
    double loss = 0.0;
    for (std::size_t lo = 0; lo < positives.size(); lo += cfg.batch_size) {
      const std::size_t hi = std::min(positives.size(), lo + cfg.batch_size);
      const auto batch = make_triplets(tg, 0, std::span(positives).subspan(lo, hi - lo), rng);
      loss += bpr_batch(model, tg, batch, derive_seed(cfg.seed, {0xba7c, result.steps}), true, true);
      ensure_grads(params);
      ad::adam_step(params, adam);
      ++result.steps;
    }
    const double hr = val_hr();
    result.log.push_back({epoch, loss / static_cast<double>(positives.size()), kNaN, hr});
    // Without a usable validation set the latest epoch wins.
    if (std::isnan(hr) || (!std::isnan(best) && hr > best) || (std::isnan(best) && !std::isnan(hr))) {
      best = hr;
      best_ck = ck;
      result.best_epoch = epoch;
      stale = 0;
    } else if (cfg.patience > 0 && ++stale >= cfg.patience) {
      break;
    }
  }

  result.model = std::move(best_ck);
  result.best_val_hr = best;
  result.model.info.emplace_back("finetune.strategy", to_string(strategy));
  result.model.info.emplace_back("finetune.best_epoch", std::to_string(result.best_epoch));
  result.model.info.emplace_back("finetune.epochs_run", std::to_string(result.log.size() - 1));
  result.model.info.emplace_back("finetune.seed", std::to_string(cfg.seed));
  return result;
}

}  // namespace adapt
