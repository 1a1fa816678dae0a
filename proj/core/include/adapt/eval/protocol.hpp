#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "adapt/ad/tensor.hpp"
#include "adapt/graph/bipartite_graph.hpp"
#include "adapt/model/checkpoint.hpp"

namespace adapt {

/// What to do with a test pair whose user has fewer unobserved items than the
/// protocol asks for.
enum class ShortPoolPolicy {
  Skip,    // leave the pair out of the metric
  UseAll,  // rank against every available unobserved item
};

/// Leave-out ranking protocol: each held-out pair is ranked against
/// `negatives` items the user never interacted with; a hit is a rank <= k.
struct EvalProtocol {
  std::size_t k{5};
  std::size_t negatives{49};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  ShortPoolPolicy short_pool{ShortPoolPolicy::Skip};

  void validate() const;
};

/// Relevance of item for user; higher ranks first. Must be safe to call
/// concurrently and deterministic for a given pair.
using PairScorer = std::function<double(NodeIndex user, NodeIndex item)>;

struct HrResult {
  double hr{0};
  std::size_t hits{0};
  std::size_t evaluated{0};
  std::size_t skipped{0};
};

/// The negatives drawn for one held-out pair. They exclude every item the user
/// has in `known` and depend only on (seed, pair). Returns fewer than
/// protocol.negatives items only under ShortPoolPolicy::UseAll; under Skip an
/// empty vector marks a skipped pair.
std::vector<NodeIndex> eval_negatives(const BipartiteGraph& known, const Edge& pair,
                                      const EvalProtocol& protocol, std::uint64_t seed);

/// 1-based rank of the true item among itself and the negatives, counting
/// every negative scoring at least as high as the truth (ties lose).
std::size_t pessimistic_rank(double true_score, std::span<const double> negative_scores);

/// HR@k over `cases`. `known` must contain every interaction of every
/// partition. Throws ProtocolError when no pair can be evaluated.
HrResult evaluate_hr(const PairScorer& scorer, const BipartiteGraph& known, std::span<const Edge> cases,
                     const EvalProtocol& protocol, std::uint64_t seed);

/// Scores pairs with fixed convolution weights on `graph`; the subgraph sample
/// of each pair depends only on (seed, pair). Returns h.delta, which orders
/// pairs exactly as sigmoid(h.delta) without saturating to ties.
PairScorer lgnn_scorer(std::vector<ad::Tensor> layers, ad::Tensor delta, const ModelConfig& cfg,
                       const BipartiteGraph& graph, std::uint64_t seed);
/// Customises the checkpoint for `graph` (when it uses the adaptor) and scores
/// pairs on it.
PairScorer lgnn_scorer(const Checkpoint& ck, const BipartiteGraph& graph, std::uint64_t seed);

/// Uniform scores that depend only on (seed, pair).
PairScorer random_scorer(std::uint64_t seed);

/// Mean and sample standard deviation of per-seed results.
struct SeedSummary {
  std::vector<double> values;
  double mean{0};
  double stddev{0};
};

SeedSummary summarize(std::vector<double> values);

/// "mean±std" of fractions expressed in percent with two decimals.
std::string format_mean_std(const SeedSummary& s);

/// Runs `fn` once per protocol seed and summarises the results.
SeedSummary run_seeds(const EvalProtocol& protocol, const std::function<double(std::uint64_t)>& fn);

}  // namespace adapt
