#include "adapt/graph/bipartite_graph.hpp"

#include <algorithm>
#include <unordered_set>

#include "adapt/util/error.hpp"

namespace adapt {

NodeIndex IdMap::intern(const std::string& id) {
  auto [it, inserted] = index_.try_emplace(id, static_cast<NodeIndex>(ids_.size()));
  if (inserted) ids_.push_back(id);
  return it->second;
}

std::int64_t IdMap::find(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

IdMap IdMap::sequential(std::size_t n, const std::string& prefix) {
  IdMap m;
  for (std::size_t k = 0; k < n; ++k) m.intern(prefix + std::to_string(k));
  return m;
}

namespace {

void build_csr(std::size_t n, const std::vector<Edge>& edges, bool by_user,
               std::vector<std::size_t>& ptr, std::vector<NodeIndex>& adj) {
  ptr.assign(n + 1, 0);
  for (const auto& e : edges) ++ptr[(by_user ? e.user : e.item) + 1];
  for (std::size_t k = 0; k < n; ++k) ptr[k + 1] += ptr[k];
  adj.assign(edges.size(), 0);
  std::vector<std::size_t> cursor(ptr.begin(), ptr.end() - 1);
  for (const auto& e : edges) {
    auto src = by_user ? e.user : e.item;
    adj[cursor[src]++] = by_user ? e.item : e.user;
  }
  for (std::size_t k = 0; k < n; ++k)
    std::sort(adj.begin() + static_cast<std::ptrdiff_t>(ptr[k]),
              adj.begin() + static_cast<std::ptrdiff_t>(ptr[k + 1]));
}

}  // namespace

BipartiteGraph BipartiteGraph::from_edges(std::size_t user_count, std::size_t item_count,
                                          std::span<const Edge> edges) {
  return from_edges(IdMap::sequential(user_count, "u"), IdMap::sequential(item_count, "i"), edges);
}

BipartiteGraph BipartiteGraph::from_edges(IdMap users, IdMap items, std::span<const Edge> edges) {
  BipartiteGraph g;
  g.users_ = std::move(users);
  g.items_ = std::move(items);
  const std::size_t nu = g.users_.size();
  const std::size_t ni = g.items_.size();

  std::unordered_set<std::uint64_t> seen;
  seen.reserve(edges.size() * 2);
  g.edges_.reserve(edges.size());
  for (const auto& e : edges) {
    if (e.user >= nu || e.item >= ni)
      throw Error("edge (" + std::to_string(e.user) + "," + std::to_string(e.item) +
                  ") out of range for " + std::to_string(nu) + "x" + std::to_string(ni) + " graph");
    const std::uint64_t key = (std::uint64_t{e.user} << 32) | e.item;
    if (seen.insert(key).second) g.edges_.push_back(e);
  }
  build_csr(nu, g.edges_, true, g.user_ptr_, g.user_adj_);
  build_csr(ni, g.edges_, false, g.item_ptr_, g.item_adj_);
  return g;
}

BipartiteGraph BipartiteGraph::with_edges(std::span<const Edge> edges) const {
  return from_edges(users_, items_, edges);
}

bool BipartiteGraph::has_edge(NodeIndex user, NodeIndex item) const {
  auto items = items_of(user);
  return std::binary_search(items.begin(), items.end(), item);
}

void BipartiteGraph::validate() const {
  if (user_ptr_.size() != user_count() + 1 || item_ptr_.size() != item_count() + 1)
    throw Error("csr offsets have wrong length");
  if (user_adj_.size() != edges_.size() || item_adj_.size() != edges_.size())
    throw Error("csr adjacency size differs from edge count");
  std::unordered_set<std::uint64_t> seen;
  for (const auto& e : edges_) {
    if (e.user >= user_count() || e.item >= item_count()) throw Error("edge index out of range");
    if (!seen.insert((std::uint64_t{e.user} << 32) | e.item).second) throw Error("duplicate edge");
    auto users = users_of(e.item);
    if (!has_edge(e.user, e.item) || !std::binary_search(users.begin(), users.end(), e.user))
      throw Error("csr structures disagree with edge list");
  }
  for (NodeIndex u = 0; u < user_count(); ++u)
    if (users_.find(users_.id(u)) != u) throw Error("user id map is not a bijection");
  for (NodeIndex i = 0; i < item_count(); ++i)
    if (items_.find(items_.id(i)) != i) throw Error("item id map is not a bijection");
}

UnifiedAdjacency::UnifiedAdjacency(const BipartiteGraph& g) {
  const auto nu = g.user_count();
  const auto n = g.node_count();
  ptr.assign(n + 1, 0);
  for (NodeIndex u = 0; u < nu; ++u) ptr[u + 1] = g.user_degree(u);
  for (NodeIndex i = 0; i < g.item_count(); ++i) ptr[nu + i + 1] = g.item_degree(i);
  for (std::size_t v = 0; v < n; ++v) ptr[v + 1] += ptr[v];
  adj.resize(ptr[n]);
  for (NodeIndex u = 0; u < nu; ++u) {
    auto dst = adj.begin() + static_cast<std::ptrdiff_t>(ptr[u]);
    for (auto i : g.items_of(u)) *dst++ = static_cast<NodeIndex>(nu + i);
  }
  for (NodeIndex i = 0; i < g.item_count(); ++i) {
    auto dst = adj.begin() + static_cast<std::ptrdiff_t>(ptr[nu + i]);
    for (auto u : g.users_of(i)) *dst++ = u;
  }
}

}  // namespace adapt
