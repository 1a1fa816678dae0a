#pragma once

#include <cstddef>
#include <cstdint>

#include "adapt/graph/bipartite_graph.hpp"

namespace adapt {

struct SynthConfig {
  std::size_t user_count{100};
  std::size_t item_count{100};
  double target_density{0.05};
  /// Attachment weight of a node is degree^exponent; 0 gives uniform choice.
  double preferential_exponent{1.0};
  /// Planted blocks: user k and item k belong to block k % communities.
  std::size_t communities{1};
  /// Probability that a non-seed edge ignores block membership.
  double cross_fraction{0.0};
  std::uint64_t seed{0};

  std::size_t target_edges() const;
  void validate() const;
};

/// Random bipartite graph with exactly target_edges() edges and no isolated
/// node. A shuffled spanning assignment gives every node one edge, then the
/// remaining edges are added by preferential attachment.
BipartiteGraph gen_synthetic(const SynthConfig& cfg);

}  // namespace adapt
