#include "adapt/subgraph/local_subgraph.hpp"

#include <algorithm>
#include <limits>
#include <ostream>

#include "adapt/util/error.hpp"
#include "adapt/util/rng.hpp"

namespace adapt {

void RwrConfig::validate() const {
  if (!(restart_prob > 0.0 && restart_prob <= 1.0)) throw ConfigError("restart_prob must lie in (0, 1]");
  if (walk_steps < 1 || max_nodes_per_side < 1) throw ConfigError("walk caps must be at least 1");
}

namespace {

std::span<const NodeIndex> neighbors_of(const BipartiteGraph& g, NodeRef v) {
  return v.side == Side::User ? g.items_of(v.index) : g.users_of(v.index);
}

// Position of the neighbour of v that the blocked edge leads to, or npos.
std::size_t blocked_slot(std::span<const NodeIndex> nbrs, NodeRef v, const Edge* blocked) {
  if (!blocked) return std::numeric_limits<std::size_t>::max();
  NodeIndex other;
  if (v.side == Side::User && v.index == blocked->user)
    other = blocked->item;
  else if (v.side == Side::Item && v.index == blocked->item)
    other = blocked->user;
  else
    return std::numeric_limits<std::size_t>::max();
  auto it = std::lower_bound(nbrs.begin(), nbrs.end(), other);
  if (it == nbrs.end() || *it != other) return std::numeric_limits<std::size_t>::max();
  return static_cast<std::size_t>(it - nbrs.begin());
}

}  // namespace

std::vector<NodeRef> rwr_sample(const BipartiteGraph& g, NodeRef start, const RwrConfig& cfg,
                                std::uint64_t seed, const Edge* blocked) {
  const std::size_t bound = start.side == Side::User ? g.user_count() : g.item_count();
  if (start.index >= bound) throw Error("rwr start node out of range");

  std::vector<NodeRef> visited{start};
  Rng rng(seed);
  NodeRef current = start;
  for (std::size_t step = 0; step < cfg.walk_steps && visited.size() < cfg.max_nodes_per_side;
       ++step) {
    if (uniform_real(rng) < cfg.restart_prob) {
      current = start;
      continue;
    }
    auto nbrs = neighbors_of(g, current);
    const std::size_t skip = blocked_slot(nbrs, current, blocked);
    const std::size_t usable = nbrs.size() - (skip < nbrs.size() ? 1 : 0);
    if (usable == 0) {
      current = start;
      continue;
    }
    auto k = static_cast<std::size_t>(uniform_index(rng, usable));
    if (k >= skip) ++k;
    current = {current.side == Side::User ? Side::Item : Side::User, nbrs[k]};
    if (std::find(visited.begin(), visited.end(), current) == visited.end()) visited.push_back(current);
  }
  return visited;
}

LocalSubgraph extract_local_graph(const BipartiteGraph& g, NodeIndex u, NodeIndex i,
                                  const RwrConfig& cfg, std::uint64_t seed) {
  if (u >= g.user_count() || i >= g.item_count()) throw Error("target pair out of range");
  const Edge target{u, i};
  const NodeRef ru{Side::User, u};
  const NodeRef ri{Side::Item, i};

  LocalSubgraph sub;
  sub.nodes = {ru, ri};
  sub.target_u = 0;
  sub.target_i = 1;
  for (const auto& walk : {rwr_sample(g, ru, cfg, derive_seed(seed, {0}), &target),
                           rwr_sample(g, ri, cfg, derive_seed(seed, {1}), &target)})
    for (const auto& v : walk)
      if (std::find(sub.nodes.begin(), sub.nodes.end(), v) == sub.nodes.end()) sub.nodes.push_back(v);

  // Sorted (item global index, local index) table for membership lookups.
  std::vector<std::pair<NodeIndex, LocalSubgraph::LocalIndex>> items;
  for (LocalSubgraph::LocalIndex k = 0; k < sub.nodes.size(); ++k)
    if (sub.nodes[k].side == Side::Item) items.emplace_back(sub.nodes[k].index, k);
  std::sort(items.begin(), items.end());

  for (LocalSubgraph::LocalIndex k = 0; k < sub.nodes.size(); ++k) {
    if (sub.nodes[k].side != Side::User) continue;
    const NodeIndex user = sub.nodes[k].index;
    for (auto item : g.items_of(user)) {
      if (user == u && item == i) continue;
      auto it = std::lower_bound(items.begin(), items.end(), std::make_pair(item, LocalSubgraph::LocalIndex{0}));
      if (it != items.end() && it->first == item) sub.edges.emplace_back(k, it->second);
    }
  }
  drnl_label(sub);
  return sub;
}

namespace {

constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();

std::vector<std::uint32_t> local_bfs(const std::vector<std::vector<std::uint32_t>>& adj,
                                     std::uint32_t source) {
  std::vector<std::uint32_t> dist(adj.size(), kUnreached);
  std::vector<std::uint32_t> queue{source};
  dist[source] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    auto v = queue[head];
    for (auto w : adj[v])
      if (dist[w] == kUnreached) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
  }
  return dist;
}

}  // namespace

void drnl_label(LocalSubgraph& sub) {
  const auto n = sub.nodes.size();
  if (sub.target_u >= n || sub.target_i >= n) throw Error("subgraph targets not set");
  std::vector<std::vector<std::uint32_t>> adj(n);
  for (auto [a, b] : sub.edges) {
    if ((a == sub.target_u && b == sub.target_i) || (a == sub.target_i && b == sub.target_u)) continue;
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  const auto du = local_bfs(adj, sub.target_u);
  const auto di = local_bfs(adj, sub.target_i);
  sub.labels.assign(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    if (v == sub.target_u || v == sub.target_i) {
      sub.labels[v] = 1;
    } else if (du[v] != kUnreached && di[v] != kUnreached) {
      sub.labels[v] = std::min(drnl_value(du[v], di[v]), kMaxLabel);
    }
  }
}

void write_subgraph(std::ostream& out, const LocalSubgraph& sub) {
  out << "nodes " << sub.nodes.size() << '\n';
  for (std::size_t k = 0; k < sub.nodes.size(); ++k) {
    out << k << ' ' << (sub.nodes[k].side == Side::User ? 'U' : 'I') << ' ' << sub.nodes[k].index
        << ' ' << (k < sub.labels.size() ? sub.labels[k] : 0);
    if (k == sub.target_u || k == sub.target_i) out << " *";
    out << '\n';
  }
  out << "edges " << sub.edges.size() << '\n';
  for (auto [a, b] : sub.edges) out << a << ' ' << b << '\n';
}

}  // namespace adapt
