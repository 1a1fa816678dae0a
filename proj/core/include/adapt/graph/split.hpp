#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "adapt/graph/bipartite_graph.hpp"

namespace adapt {

/// Disjoint train/validation/test partition of a graph's edges.
struct EdgeSplit {
  std::vector<Edge> train;
  std::vector<Edge> val;
  std::vector<Edge> test;
  std::uint64_t seed{0};
};

/// Candidate draws allowed per edge before a split is declared infeasible.
inline constexpr std::size_t kSplitDrawsPerEdge = 100;

/// Draws round(val_frac*|E|) validation and round(test_frac*|E|) test edges
/// uniformly, rejecting any edge whose removal would leave one of its
/// endpoints without a training edge.
EdgeSplit split_dataset(const BipartiteGraph& g, double val_frac, double test_frac,
                        std::uint64_t seed);

/// Keeps ceil(keep_frac*|train|) training edges without isolating any node
/// of the original training graph, or slightly more when the greedy removal
/// runs out of droppable edges. Throws SparsifyInfeasible when the target is
/// below the number of users or items that need an edge. val/test are copied
/// unchanged.
EdgeSplit sparsify_train(const EdgeSplit& split, double keep_frac, std::uint64_t seed);

/// n distinct items the user has not interacted with in g and that are not in
/// exclude, drawn uniformly without replacement.
std::vector<NodeIndex> sample_negatives(const BipartiteGraph& g, NodeIndex user, std::size_t n,
                                        std::span<const NodeIndex> exclude, std::uint64_t seed);

}  // namespace adapt
