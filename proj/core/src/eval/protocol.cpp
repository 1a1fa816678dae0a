#include "adapt/eval/protocol.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdio>
#include <memory>

#include "adapt/graph/split.hpp"
#include "adapt/util/error.hpp"
#include "adapt/util/parallel.hpp"

namespace adapt {

void EvalProtocol::validate() const {
  if (k == 0) throw ConfigError("k must be positive");
  if (negatives == 0) throw ConfigError("negatives must be positive");
  if (k > negatives + 1) throw ConfigError("k exceeds the candidate list length");
}

std::vector<NodeIndex> eval_negatives(const BipartiteGraph& known, const Edge& pair,
                                      const EvalProtocol& protocol, std::uint64_t seed) {
  if (pair.user >= known.user_count() || pair.item >= known.item_count())
    throw ProtocolError("evaluation pair outside the known graph");
  const NodeIndex self[] = {pair.item};
  const std::size_t available = known.item_count() - known.items_of(pair.user).size() -
                                (known.has_edge(pair.user, pair.item) ? 0 : 1);
  std::size_t n = protocol.negatives;
  if (available < n) {
    if (protocol.short_pool == ShortPoolPolicy::Skip || available == 0) return {};
    n = available;
  }
  return sample_negatives(known, pair.user, n, self, derive_seed(seed, {0xe5a1, pair.user, pair.item}));
}

std::size_t pessimistic_rank(double true_score, std::span<const double> negative_scores) {
  std::size_t rank = 1;
  for (double s : negative_scores)
    if (s >= true_score) ++rank;
  return rank;
}

HrResult evaluate_hr(const PairScorer& scorer, const BipartiteGraph& known, std::span<const Edge> cases,
                     const EvalProtocol& protocol, std::uint64_t seed) {
  protocol.validate();
  enum : char { kSkip, kMiss, kHit };
  std::vector<char> outcome(cases.size(), kSkip);
  parallel_for(cases.size(), [&](std::size_t c) {
    const Edge& e = cases[c];
    const auto negs = eval_negatives(known, e, protocol, seed);
    if (negs.empty()) return;
    const double truth = scorer(e.user, e.item);
    std::vector<double> scores;
    scores.reserve(negs.size());
    for (auto j : negs) scores.push_back(scorer(e.user, j));
    outcome[c] = pessimistic_rank(truth, scores) <= protocol.k ? kHit : kMiss;
  });

  HrResult r;
  for (char o : outcome) {
    if (o == kSkip) {
      ++r.skipped;
    } else {
      ++r.evaluated;
      if (o == kHit) ++r.hits;
    }
  }
  if (r.skipped > 0)
    spdlog::warn("skipped {} of {} evaluation pairs whose user has fewer than {} unobserved items", r.skipped,
                 cases.size(), protocol.negatives);
  if (r.evaluated == 0)
    throw ProtocolError("no evaluable pairs: all " + std::to_string(cases.size()) +
                        " users have fewer than " + std::to_string(protocol.negatives) + " unobserved items");
  r.hr = static_cast<double>(r.hits) / static_cast<double>(r.evaluated);
  return r;
}

PairScorer lgnn_scorer(std::vector<ad::Tensor> layers, ad::Tensor delta, const ModelConfig& cfg,
                       const BipartiteGraph& graph, std::uint64_t seed) {
  struct State {
    std::vector<ad::Tensor> layers;
    ad::Tensor delta;
    ModelConfig cfg;
    BipartiteGraph graph;
  };
  auto st = std::make_shared<const State>(State{std::move(layers), std::move(delta), cfg, graph});
  return [st, seed](NodeIndex u, NodeIndex i) {
    return lgnn_logit_value(st->graph, u, i, st->layers, st->delta, st->cfg, pair_seed(seed, u, i));
  };
}

PairScorer lgnn_scorer(const Checkpoint& ck, const BipartiteGraph& graph, std::uint64_t seed) {
  return lgnn_scorer(ck.effective_layers(graph), ck.meta.delta.value, ck.config, graph, seed);
}

PairScorer random_scorer(std::uint64_t seed) {
  return [seed](NodeIndex u, NodeIndex i) {
    return static_cast<double>(pair_seed(seed, u, i) >> 11) * 0x1.0p-53;
  };
}

SeedSummary summarize(std::vector<double> values) {
  SeedSummary s;
  s.values = std::move(values);
  if (s.values.empty()) return s;
  double sum = 0.0;
  for (double v : s.values) sum += v;
  s.mean = sum / static_cast<double>(s.values.size());
  if (s.values.size() > 1) {
    double ss = 0.0;
    for (double v : s.values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(s.values.size() - 1));
  }
  return s;
}

std::string format_mean_std(const SeedSummary& s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f±%.2f", 100.0 * s.mean, 100.0 * s.stddev);
  return buf;
}

SeedSummary run_seeds(const EvalProtocol& protocol, const std::function<double(std::uint64_t)>& fn) {
  if (protocol.seeds.empty()) throw ConfigError("protocol has no seeds");
  std::vector<double> values;
  for (auto s : protocol.seeds) values.push_back(fn(s));
  return summarize(std::move(values));
}

}  // namespace adapt
