#include "adapt/eval/mf.hpp"

#include <cmath>
#include <limits>
#include <memory>

#include "adapt/ad/adam.hpp"
#include "adapt/util/error.hpp"

namespace adapt {

double MfModel::score(NodeIndex u, NodeIndex i) const {
  const std::size_t d = users.cols();
  const double* a = users.data() + u * d;
  const double* b = items.data() + i * d;
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) s += a[k] * b[k];
  return s;
}

MfModel init_mf(std::size_t user_count, std::size_t item_count, const MfConfig& cfg) {
  if (cfg.dim == 0) throw ConfigError("mf dim must be positive");
  Rng rng(derive_seed(cfg.seed, {0x3f}));
  MfModel m{ad::Tensor({user_count, cfg.dim}), ad::Tensor({item_count, cfg.dim})};
  for (auto& v : m.users.values()) v = cfg.init_std * standard_normal(rng);
  for (auto& v : m.items.values()) v = cfg.init_std * standard_normal(rng);
  return m;
}

PairScorer mf_scorer(MfModel model) {
  auto m = std::make_shared<const MfModel>(std::move(model));
  return [m](NodeIndex u, NodeIndex i) { return m->score(u, i); };
}

MfResult train_mf(const Manifest& target, const MfConfig& cfg, const EvalProtocol& protocol) {
  if (cfg.batch_size == 0) throw ConfigError("batch_size must be positive");
  protocol.validate();
  const BipartiteGraph train = target.train_graph();
  if (train.edge_count() == 0) throw EmptyGraphError("target has no training edges");
  const std::size_t d = cfg.dim;

  MfModel init = init_mf(train.user_count(), train.item_count(), cfg);
  ad::Parameter pu{"mf.users", std::move(init.users), {}};
  ad::Parameter pi{"mf.items", std::move(init.items), {}};
  ad::Parameter* params[] = {&pu, &pi};
  ad::AdamState adam{{cfg.learning_rate}, 0, {}, {}};
  Rng rng(derive_seed(cfg.seed, {0x3f1}));

  auto val_hr = [&] {
    if (target.split.val.empty()) return std::numeric_limits<double>::quiet_NaN();
    MfModel m{pu.value, pi.value};
    try {
      return evaluate_hr(mf_scorer(std::move(m)), target.graph, target.split.val, protocol, cfg.seed).hr;
    } catch (const ProtocolError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };

  MfResult result;
  result.model = {pu.value, pi.value};
  result.best_val_hr = val_hr();
  result.log.push_back({0, std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(),
                        result.best_val_hr});
  std::size_t stale = 0;
  std::vector<Edge> positives(train.edges().begin(), train.edges().end());
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    shuffle(positives, rng);
    double loss = 0.0;
    for (std::size_t lo = 0; lo < positives.size(); lo += cfg.batch_size) {
      const std::size_t hi = std::min(positives.size(), lo + cfg.batch_size);
      ad::Tensor gu(pu.value.shape()), gi(pi.value.shape());
      for (std::size_t k = lo; k < hi; ++k) {
        const Edge e = positives[k];
        if (train.items_of(e.user).size() >= train.item_count()) continue;
        NodeIndex j;
        do {
          j = static_cast<NodeIndex>(uniform_index(rng, train.item_count()));
        } while (train.has_edge(e.user, j));
        const double* u = pu.value.data() + e.user * d;
        const double* vi = pi.value.data() + e.item * d;
        const double* vj = pi.value.data() + j * d;
        double diff = 0.0;
        for (std::size_t c = 0; c < d; ++c) diff += u[c] * (vi[c] - vj[c]);
        loss += bpr_value(diff, 0.0);
        // d/d diff of -ln sigmoid(diff) is -sigmoid(-diff).
        const double g = -1.0 / (1.0 + std::exp(diff));
        double* gu_row = gu.data() + e.user * d;
        double* gi_row = gi.data() + e.item * d;
        double* gj_row = gi.data() + j * d;
        for (std::size_t c = 0; c < d; ++c) {
          gu_row[c] += g * (vi[c] - vj[c]);
          gi_row[c] += g * u[c];
          gj_row[c] -= g * u[c];
        }
      }
      if (cfg.l2 > 0) {
        gu.add_(pu.value, cfg.l2);
        gi.add_(pi.value, cfg.l2);
      }
      pu.grad = std::move(gu);
      pi.grad = std::move(gi);
      ad::adam_step(params, adam);
    }
    const double hr = val_hr();
    result.log.push_back({epoch, loss / static_cast<double>(positives.size()),
                          std::numeric_limits<double>::quiet_NaN(), hr});
    // Without a usable validation set the latest epoch wins.
    const bool better = std::isnan(hr) || std::isnan(result.best_val_hr) || hr > result.best_val_hr;
    if (better) {
      result.model = {pu.value, pi.value};
      result.best_val_hr = hr;
      result.best_epoch = epoch;
      stale = 0;
    } else if (cfg.patience > 0 && ++stale >= cfg.patience) {
      break;
    }
  }
  return result;
}

}  // namespace adapt
