#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "adapt/graph/bipartite_graph.hpp"

namespace adapt {

enum class Side : std::uint8_t { User, Item };

struct NodeRef {
  Side side{Side::User};
  NodeIndex index{0};

  friend bool operator==(const NodeRef&, const NodeRef&) = default;
  friend auto operator<=>(const NodeRef&, const NodeRef&) = default;
};

/// DRNL labels above this value are clamped to it; label 0 means "unreachable".
inline constexpr std::uint32_t kMaxLabel = 32;

struct RwrConfig {
  double restart_prob{0.5};
  std::size_t walk_steps{100};
  /// Upper bound on distinct nodes collected by the walk from one target.
  std::size_t max_nodes_per_side{50};

  void validate() const;
};

/// The local graph around a target (user, item) pair.
struct LocalSubgraph {
  using LocalIndex = std::uint32_t;

  std::vector<NodeRef> nodes;
  /// Each undirected edge once, as (user-side local index, item-side local index).
  std::vector<std::pair<LocalIndex, LocalIndex>> edges;
  LocalIndex target_u{0};
  LocalIndex target_i{1};
  std::vector<std::uint32_t> labels;

  std::size_t size() const noexcept { return nodes.size(); }
};

/// Nodes visited by a random walk with restart from `start`, in order of first
/// visit (start first). When `blocked` is given, the walk never traverses that
/// edge.
std::vector<NodeRef> rwr_sample(const BipartiteGraph& g, NodeRef start, const RwrConfig& cfg,
                                std::uint64_t seed, const Edge* blocked = nullptr);

/// Samples the union of two walks (from u and from i), takes the induced
/// subgraph without the (u,i) edge itself and assigns DRNL labels. Walks also
/// skip the (u,i) edge, so positive and negative pairs are sampled alike.
LocalSubgraph extract_local_graph(const BipartiteGraph& g, NodeIndex u, NodeIndex i,
                                  const RwrConfig& cfg, std::uint64_t seed);

/// Assigns sub.labels from BFS distances to the two targets:
/// 1 + min(du, di) + floor((du + di) / 2)^2, targets fixed to 1, unreachable
/// nodes 0, everything clamped to kMaxLabel.
void drnl_label(LocalSubgraph& sub);

/// The DRNL formula for one node with finite distances (before clamping).
constexpr std::uint32_t drnl_value(std::uint32_t du, std::uint32_t di) {
  const std::uint32_t d = du + di;
  const std::uint32_t half = d / 2;
  return 1 + (du < di ? du : di) + half * half;
}

/// Debug text form:
///   nodes <n>
///   <local> <U|I> <global> <label>   (n lines, targets marked with '*')
///   edges <m>
///   <a> <b>                          (m lines)
void write_subgraph(std::ostream& out, const LocalSubgraph& sub);

}  // namespace adapt
