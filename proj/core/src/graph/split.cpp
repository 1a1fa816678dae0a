#include "adapt/graph/split.hpp"

#include <algorithm>
#include <cmath>

#include "adapt/util/error.hpp"
#include "adapt/util/rng.hpp"

namespace adapt {

namespace {

std::size_t max_user(const EdgeSplit& s) {
  std::size_t n = 0;
  for (const auto* part : {&s.train, &s.val, &s.test})
    for (const auto& e : *part) n = std::max<std::size_t>(n, e.user + 1);
  return n;
}

std::size_t max_item(const EdgeSplit& s) {
  std::size_t n = 0;
  for (const auto* part : {&s.train, &s.val, &s.test})
    for (const auto& e : *part) n = std::max<std::size_t>(n, e.item + 1);
  return n;
}

}  // namespace

EdgeSplit split_dataset(const BipartiteGraph& g, double val_frac, double test_frac,
                        std::uint64_t seed) {
  if (g.empty()) throw EmptyGraphError("cannot split an empty graph");
  if (val_frac < 0 || test_frac < 0 || val_frac + test_frac >= 1.0)
    throw ConfigError("split fractions must be non-negative and sum to less than 1");

  const auto& edges = g.edges();
  const std::size_t m = edges.size();
  const auto n_val = static_cast<std::size_t>(std::llround(val_frac * static_cast<double>(m)));
  const auto n_test = static_cast<std::size_t>(std::llround(test_frac * static_cast<double>(m)));

  std::vector<std::size_t> user_deg(g.user_count());
  std::vector<std::size_t> item_deg(g.item_count());
  for (NodeIndex u = 0; u < g.user_count(); ++u) user_deg[u] = g.user_degree(u);
  for (NodeIndex i = 0; i < g.item_count(); ++i) item_deg[i] = g.item_degree(i);

  std::vector<std::size_t> pool(m);
  for (std::size_t k = 0; k < m; ++k) pool[k] = k;
  std::vector<char> held_out(m, 0);

  EdgeSplit out;
  out.seed = seed;
  Rng rng(seed);
  std::vector<Edge> drawn;
  const std::size_t max_draws = kSplitDrawsPerEdge * m;
  std::size_t draws = 0;
  while (drawn.size() < n_val + n_test) {
    if (draws++ >= max_draws || pool.empty())
      throw SplitInfeasible("could not draw " + std::to_string(n_val + n_test) +
                            " held-out edges without stranding a node (" +
                            std::to_string(drawn.size()) + " found)");
    const auto slot = static_cast<std::size_t>(uniform_index(rng, pool.size()));
    const Edge e = edges[pool[slot]];
    if (user_deg[e.user] < 2 || item_deg[e.item] < 2) continue;
    --user_deg[e.user];
    --item_deg[e.item];
    held_out[pool[slot]] = 1;
    pool[slot] = pool.back();
    pool.pop_back();
    drawn.push_back(e);
  }
  // Later draws are biased toward high-degree endpoints; shuffling keeps the
  // two held-out partitions exchangeable.
  shuffle(drawn, rng);
  out.val.assign(drawn.begin(), drawn.begin() + static_cast<std::ptrdiff_t>(n_val));
  out.test.assign(drawn.begin() + static_cast<std::ptrdiff_t>(n_val), drawn.end());
  out.train.reserve(m - n_val - n_test);
  for (std::size_t k = 0; k < m; ++k)
    if (!held_out[k]) out.train.push_back(edges[k]);
  return out;
}

EdgeSplit sparsify_train(const EdgeSplit& split, double keep_frac, std::uint64_t seed) {
  if (!(keep_frac > 0.0 && keep_frac <= 1.0)) throw ConfigError("keep_frac must lie in (0, 1]");
  if (keep_frac == 1.0) return split;

  const std::size_t m = split.train.size();
  const auto target =
      static_cast<std::size_t>(std::ceil(keep_frac * static_cast<double>(m) - 1e-9));

  std::vector<std::size_t> user_deg(max_user(split));
  std::vector<std::size_t> item_deg(max_item(split));
  for (const auto& e : split.train) {
    ++user_deg[e.user];
    ++item_deg[e.item];
  }

  // Every remaining node needs an edge of its own on its side.
  const auto active = [](const std::vector<std::size_t>& deg) {
    return static_cast<std::size_t>(std::count_if(deg.begin(), deg.end(), [](std::size_t d) { return d > 0; }));
  };
  const std::size_t floor = std::max(active(user_deg), active(item_deg));
  if (target < floor)
    throw SparsifyInfeasible("keeping " + std::to_string(target) + " of " + std::to_string(m) +
                             " training edges would isolate nodes (at least " + std::to_string(floor) +
                             " are needed)");

  std::vector<std::size_t> order(m);
  for (std::size_t k = 0; k < m; ++k) order[k] = k;
  Rng rng(seed);
  shuffle(order, rng);

  std::vector<char> dropped(m, 0);
  std::size_t kept = m;
  for (std::size_t k = 0; k < m && kept > target; ++k) {
    const Edge& e = split.train[order[k]];
    if (user_deg[e.user] < 2 || item_deg[e.item] < 2) continue;
    --user_deg[e.user];
    --item_deg[e.item];
    dropped[order[k]] = 1;
    --kept;
  }
  EdgeSplit out;
  out.val = split.val;
  out.test = split.test;
  out.seed = split.seed;
  out.train.reserve(kept);
  for (std::size_t k = 0; k < m; ++k)
    if (!dropped[k]) out.train.push_back(split.train[k]);
  return out;
}

std::vector<NodeIndex> sample_negatives(const BipartiteGraph& g, NodeIndex user, std::size_t n,
                                        std::span<const NodeIndex> exclude, std::uint64_t seed) {
  if (n == 0) return {};
  std::vector<NodeIndex> excluded(exclude.begin(), exclude.end());
  std::sort(excluded.begin(), excluded.end());
  auto positives = g.items_of(user);

  std::vector<NodeIndex> candidates;
  candidates.reserve(g.item_count());
  for (NodeIndex i = 0; i < g.item_count(); ++i) {
    if (std::binary_search(positives.begin(), positives.end(), i)) continue;
    if (std::binary_search(excluded.begin(), excluded.end(), i)) continue;
    candidates.push_back(i);
  }
  if (candidates.size() < n)
    throw InsufficientNegatives("user " + std::to_string(user) + " has " +
                                std::to_string(candidates.size()) + " candidate negatives, " +
                                std::to_string(n) + " requested");
  Rng rng(seed);
  for (std::size_t k = 0; k < n; ++k) {
    const auto j = k + static_cast<std::size_t>(uniform_index(rng, candidates.size() - k));
    std::swap(candidates[k], candidates[j]);
  }
  candidates.resize(n);
  return candidates;
}

}  // namespace adapt
