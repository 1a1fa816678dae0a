#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace adapt {

using NodeIndex = std::uint32_t;

/// A user-item interaction. Users and items live in separate index spaces.
struct Edge {
  NodeIndex user{0};
  NodeIndex item{0};

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Bidirectional map between original identifiers and dense indices.
class IdMap {
 public:
  /// Returns the index for id, assigning the next dense index on first sight.
  NodeIndex intern(const std::string& id);
  /// Index of id, or -1 if absent.
  std::int64_t find(const std::string& id) const;
  const std::string& id(NodeIndex index) const { return ids_.at(index); }
  std::size_t size() const noexcept { return ids_.size(); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }

  /// Map with ids "<prefix>0", "<prefix>1", ...
  static IdMap sequential(std::size_t n, const std::string& prefix);

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, NodeIndex> index_;
};

/// Immutable bipartite interaction graph with CSR adjacency on both sides.
///
/// Edges are stored in insertion order (after deduplication). Neighbour lists
/// are sorted ascending, which makes has_edge a binary search.
class BipartiteGraph {
 public:
  BipartiteGraph() = default;

  /// Builds a graph over dense indices. Duplicate edges are dropped (first
  /// occurrence wins); indices out of range throw.
  static BipartiteGraph from_edges(std::size_t user_count, std::size_t item_count,
                                   std::span<const Edge> edges);
  static BipartiteGraph from_edges(IdMap users, IdMap items, std::span<const Edge> edges);

  /// Same node sets and id maps as this graph, different edge set.
  BipartiteGraph with_edges(std::span<const Edge> edges) const;

  std::size_t user_count() const noexcept { return users_.size(); }
  std::size_t item_count() const noexcept { return items_.size(); }
  std::size_t node_count() const noexcept { return user_count() + item_count(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  bool empty() const noexcept { return edges_.empty(); }

  const std::vector<Edge>& edges() const noexcept { return edges_; }

  std::span<const NodeIndex> items_of(NodeIndex user) const {
    return {user_adj_.data() + user_ptr_[user], user_adj_.data() + user_ptr_[user + 1]};
  }
  std::span<const NodeIndex> users_of(NodeIndex item) const {
    return {item_adj_.data() + item_ptr_[item], item_adj_.data() + item_ptr_[item + 1]};
  }
  std::size_t user_degree(NodeIndex user) const { return user_ptr_[user + 1] - user_ptr_[user]; }
  std::size_t item_degree(NodeIndex item) const { return item_ptr_[item + 1] - item_ptr_[item]; }

  bool has_edge(NodeIndex user, NodeIndex item) const;

  const IdMap& user_ids() const noexcept { return users_; }
  const IdMap& item_ids() const noexcept { return items_; }

  /// Throws if any structural invariant is violated. Used by tests.
  void validate() const;

 private:
  IdMap users_;
  IdMap items_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> user_ptr_{0};
  std::vector<NodeIndex> user_adj_;
  std::vector<std::size_t> item_ptr_{0};
  std::vector<NodeIndex> item_adj_;
};

/// Unified node numbering used by whole-graph algorithms: users occupy
/// [0, U) and items [U, U + I).
struct UnifiedAdjacency {
  std::vector<std::size_t> ptr;
  std::vector<NodeIndex> adj;

  explicit UnifiedAdjacency(const BipartiteGraph& g);
  std::size_t node_count() const noexcept { return ptr.size() - 1; }
  std::span<const NodeIndex> neighbors(NodeIndex v) const {
    return {adj.data() + ptr[v], adj.data() + ptr[v + 1]};
  }
  std::size_t degree(NodeIndex v) const { return ptr[v + 1] - ptr[v]; }
};

}  // namespace adapt
