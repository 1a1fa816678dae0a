#include "adapt/graph/synth.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>
#include <vector>

#include "adapt/util/error.hpp"
#include "adapt/util/rng.hpp"

namespace adapt {

namespace {

std::size_t block_size(std::size_t n, std::size_t blocks, std::size_t b) {
  return n / blocks + (b < n % blocks ? 1 : 0);
}

std::size_t seed_edge_count(const SynthConfig& cfg) {
  std::size_t total = 0;
  for (std::size_t b = 0; b < cfg.communities; ++b)
    total += std::max(block_size(cfg.user_count, cfg.communities, b),
                      block_size(cfg.item_count, cfg.communities, b));
  return total;
}

// Index k in [0, total) drawn with probability weights[k] / sum(weights).
std::size_t weighted_pick(const std::vector<double>& weights, double total, Rng& rng) {
  double r = uniform_real(rng) * total;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] <= 0.0) continue;
    if (r < weights[k]) return k;
    r -= weights[k];
  }
  for (std::size_t k = weights.size(); k-- > 0;)
    if (weights[k] > 0.0) return k;
  return 0;
}

}  // namespace

std::size_t SynthConfig::target_edges() const {
  const double cells = static_cast<double>(user_count) * static_cast<double>(item_count);
  auto n = static_cast<std::size_t>(std::ceil(target_density * cells - 1e-9));
  return std::min(n, user_count * item_count);
}

void SynthConfig::validate() const {
  if (user_count == 0 || item_count == 0) throw ConfigError("synthetic graph needs users and items");
  if (!(target_density > 0.0 && target_density <= 1.0))
    throw ConfigError("target_density must lie in (0, 1]");
  if (communities == 0 || communities > std::min(user_count, item_count))
    throw ConfigError("communities must lie in [1, min(users, items)]");
  if (cross_fraction < 0.0 || cross_fraction > 1.0) throw ConfigError("cross_fraction must lie in [0, 1]");
  if (preferential_exponent < 0.0) throw ConfigError("preferential_exponent must be non-negative");
  if (target_edges() < seed_edge_count(*this))
    throw ConfigError("target density too low: " + std::to_string(target_edges()) +
                      " edges cannot cover every node (need " +
                      std::to_string(seed_edge_count(*this)) + ")");
}

BipartiteGraph gen_synthetic(const SynthConfig& cfg) {
  cfg.validate();
  const std::size_t nu = cfg.user_count;
  const std::size_t ni = cfg.item_count;
  const std::size_t blocks = cfg.communities;
  Rng rng(cfg.seed);

  std::vector<Edge> edges;
  edges.reserve(cfg.target_edges());
  std::unordered_set<std::uint64_t> present;
  std::vector<std::size_t> user_deg(nu, 0);
  std::vector<std::size_t> item_deg(ni, 0);
  auto add = [&](NodeIndex u, NodeIndex i) {
    if (!present.insert((std::uint64_t{u} << 32) | i).second) return false;
    edges.push_back({u, i});
    ++user_deg[u];
    ++item_deg[i];
    return true;
  };

  // Spanning assignment inside each block: cycle the shorter side so every
  // node receives at least one edge.
  for (std::size_t b = 0; b < blocks; ++b) {
    std::vector<NodeIndex> users;
    std::vector<NodeIndex> items;
    for (std::size_t u = b; u < nu; u += blocks) users.push_back(static_cast<NodeIndex>(u));
    for (std::size_t i = b; i < ni; i += blocks) items.push_back(static_cast<NodeIndex>(i));
    shuffle(users, rng);
    shuffle(items, rng);
    const std::size_t span = std::max(users.size(), items.size());
    for (std::size_t k = 0; k < span; ++k) add(users[k % users.size()], items[k % items.size()]);
  }

  auto weight = [&](std::size_t deg) {
    return cfg.preferential_exponent == 0.0 ? 1.0
                                            : std::pow(static_cast<double>(deg), cfg.preferential_exponent);
  };

  std::vector<std::size_t> block_items(blocks, 0);
  for (std::size_t i = 0; i < ni; ++i) ++block_items[i % blocks];
  std::vector<std::size_t> in_block_deg(nu, 0);
  for (const auto& e : edges)
    if (e.user % blocks == e.item % blocks) ++in_block_deg[e.user];

  std::vector<double> user_w(nu);
  std::vector<double> item_w(ni);
  const std::size_t target = cfg.target_edges();
  while (edges.size() < target) {
    bool cross = blocks > 1 && uniform_real(rng) < cfg.cross_fraction;
    // Users that still have a free item in the allowed range.
    auto fill_users = [&](bool in_block_only) {
      double sum = 0.0;
      for (std::size_t u = 0; u < nu; ++u) {
        const bool open = in_block_only ? in_block_deg[u] < block_items[u % blocks] : user_deg[u] < ni;
        user_w[u] = open ? weight(user_deg[u]) : 0.0;
        sum += user_w[u];
      }
      return sum;
    };
    double user_total = fill_users(blocks > 1 && !cross);
    if (user_total <= 0.0) {
      cross = true;
      user_total = fill_users(false);
    }
    const auto u = static_cast<NodeIndex>(weighted_pick(user_w, user_total, rng));

    double item_total = 0.0;
    for (std::size_t i = 0; i < ni; ++i) {
      const bool allowed = blocks == 1 || cross || i % blocks == u % blocks;
      item_w[i] = allowed && !present.count((std::uint64_t{u} << 32) | i) ? weight(item_deg[i]) : 0.0;
      item_total += item_w[i];
    }
    const auto i = static_cast<NodeIndex>(weighted_pick(item_w, item_total, rng));
    if (add(u, i) && u % blocks == i % blocks) ++in_block_deg[u];
  }
  return BipartiteGraph::from_edges(nu, ni, edges);
}

}  // namespace adapt
