#include "adapt/props/properties.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "adapt/util/error.hpp"
#include "adapt/util/parallel.hpp"
#include "adapt/util/rng.hpp"
#include "adapt/util/text.hpp"

namespace adapt {

std::array<double, kPropertyCount> PropertyVector::to_array() const {
  return {node_count,           edge_count, user_item_ratio, density, degree_assortativity,
          robins_alexander_clustering, connected_components, global_efficiency};
}

PropertyVector PropertyVector::from_array(const std::array<double, kPropertyCount>& a) {
  return {a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7]};
}

const std::array<const char*, kPropertyCount>& PropertyVector::names() {
  static const std::array<const char*, kPropertyCount> n = {
      "node_count",           "edge_count",  "user_item_ratio",
      "density",              "degree_assortativity", "robins_alexander_clustering",
      "connected_components", "global_efficiency"};
  return n;
}

double degree_assortativity(const BipartiteGraph& g) {
  // Every edge contributes (du, di) and (di, du), so both coordinate
  // sequences share one multiset; integer sums keep the zero-variance test exact.
  __int128 n = 0, s1 = 0, s2 = 0, sxy = 0;
  for (const auto& e : g.edges()) {
    const __int128 du = static_cast<__int128>(g.user_degree(e.user));
    const __int128 di = static_cast<__int128>(g.item_degree(e.item));
    n += 2;
    s1 += du + di;
    s2 += du * du + di * di;
    sxy += 2 * du * di;
  }
  const __int128 var = n * s2 - s1 * s1;
  if (n == 0 || var == 0) return 0.0;
  const __int128 cov = n * sxy - s1 * s1;
  return static_cast<double>(static_cast<long double>(cov) / static_cast<long double>(var));
}

double robins_alexander_clustering(const BipartiteGraph& g) {
  std::uint64_t paths = 0;
  for (const auto& e : g.edges())
    paths += (g.user_degree(e.user) - 1) * (g.item_degree(e.item) - 1);
  if (paths == 0) return 0.0;

  // Each 4-cycle is a pair of users sharing a pair of items.
  std::uint64_t cycles = 0;
  std::vector<std::uint32_t> common(g.user_count(), 0);
  std::vector<NodeIndex> touched;
  for (NodeIndex u = 0; u < g.user_count(); ++u) {
    touched.clear();
    for (auto i : g.items_of(u))
      for (auto v : g.users_of(i))
        if (v > u) {
          if (common[v]++ == 0) touched.push_back(v);
        }
    for (auto v : touched) {
      const std::uint64_t c = common[v];
      cycles += c * (c - 1) / 2;
      common[v] = 0;
    }
  }
  return 4.0 * static_cast<double>(cycles) / static_cast<double>(paths);
}

std::size_t connected_components(const BipartiteGraph& g) {
  UnifiedAdjacency adj(g);
  const auto n = adj.node_count();
  std::vector<char> seen(n, 0);
  std::vector<NodeIndex> stack;
  std::size_t count = 0;
  for (NodeIndex s = 0; s < n; ++s) {
    if (seen[s]) continue;
    ++count;
    seen[s] = 1;
    stack.push_back(s);
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      for (auto w : adj.neighbors(v))
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
    }
  }
  return count;
}

namespace {

// BFS distances from s; -1 marks unreachable nodes.
void bfs(const UnifiedAdjacency& adj, NodeIndex s, std::vector<std::int32_t>& dist,
         std::vector<NodeIndex>& queue) {
  std::fill(dist.begin(), dist.end(), -1);
  queue.clear();
  dist[s] = 0;
  queue.push_back(s);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    auto v = queue[head];
    for (auto w : adj.neighbors(v))
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
  }
}

}  // namespace

double global_efficiency_exact(const BipartiteGraph& g) {
  UnifiedAdjacency adj(g);
  const auto n = adj.node_count();
  if (n < 2) return 0.0;
  std::vector<double> per_source(n, 0.0);
  parallel_for(n, [&](std::size_t s) {
    std::vector<std::int32_t> dist(n);
    std::vector<NodeIndex> queue;
    queue.reserve(n);
    bfs(adj, static_cast<NodeIndex>(s), dist, queue);
    double sum = 0.0;
    for (std::size_t t = 0; t < n; ++t)
      if (t != s && dist[t] > 0) sum += 1.0 / dist[t];
    per_source[s] = sum;
  });
  double total = 0.0;
  for (double v : per_source) total += v;
  return total / (static_cast<double>(n) * static_cast<double>(n - 1));
}

double global_efficiency_sampled(const BipartiteGraph& g, std::size_t samples, std::uint64_t seed,
                                 double* stderr_out) {
  UnifiedAdjacency adj(g);
  const auto n = adj.node_count();
  if (n < 2 || samples == 0) {
    if (stderr_out) *stderr_out = 0.0;
    return 0.0;
  }
  Rng rng(seed);
  std::map<NodeIndex, std::vector<NodeIndex>> by_source;
  for (std::size_t k = 0; k < samples; ++k) {
    auto s = static_cast<NodeIndex>(uniform_index(rng, n));
    auto t = static_cast<NodeIndex>(uniform_index(rng, n - 1));
    if (t >= s) ++t;
    by_source[s].push_back(t);
  }
  std::vector<std::int32_t> dist(n);
  std::vector<NodeIndex> queue;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (const auto& [s, targets] : by_source) {
    bfs(adj, s, dist, queue);
    for (auto t : targets) {
      const double v = dist[t] > 0 ? 1.0 / dist[t] : 0.0;
      sum += v;
      sum_sq += v * v;
    }
  }
  const double k = static_cast<double>(samples);
  const double mean = sum / k;
  if (stderr_out) {
    const double var = samples > 1 ? std::max(0.0, (sum_sq - k * mean * mean) / (k - 1)) : 0.0;
    *stderr_out = std::sqrt(var / k);
  }
  return mean;
}

PropertyVector compute_properties(const BipartiteGraph& g, const PropertyOptions& opts) {
  if (g.empty()) throw EmptyGraphError("properties of an empty graph are undefined");
  PropertyVector pv;
  pv.node_count = static_cast<double>(g.node_count());
  pv.edge_count = static_cast<double>(g.edge_count());
  pv.user_item_ratio = static_cast<double>(g.user_count()) / static_cast<double>(g.item_count());
  pv.density = static_cast<double>(g.edge_count()) /
               (static_cast<double>(g.user_count()) * static_cast<double>(g.item_count()));
  pv.degree_assortativity = degree_assortativity(g);
  pv.robins_alexander_clustering = robins_alexander_clustering(g);
  pv.connected_components = static_cast<double>(connected_components(g));
  pv.global_efficiency = g.node_count() <= opts.exact_efficiency_cap
                             ? global_efficiency_exact(g)
                             : global_efficiency_sampled(g, opts.efficiency_samples, opts.seed);
  return pv;
}

NormStats fit_norm(std::span<const PropertyVector> corpus) {
  if (corpus.empty()) throw ConfigError("cannot fit normalization on an empty corpus");
  NormStats stats;
  const double n = static_cast<double>(corpus.size());
  for (std::size_t d = 0; d < kPropertyCount; ++d) {
    double sum = 0.0;
    for (const auto& pv : corpus) sum += pv.to_array()[d];
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& pv : corpus) {
      const double dv = pv.to_array()[d] - mean;
      ss += dv * dv;
    }
    stats.mean[d] = mean;
    stats.stddev[d] = std::sqrt(ss / n);
  }
  return stats;
}

std::array<double, kPropertyCount> normalize(const PropertyVector& pv, const NormStats& stats) {
  std::array<double, kPropertyCount> out{};
  const auto values = pv.to_array();
  for (std::size_t d = 0; d < kPropertyCount; ++d) {
    const double sd = stats.stddev[d] > 0.0 ? stats.stddev[d] : 1.0;
    out[d] = (values[d] - stats.mean[d]) / sd;
  }
  return out;
}

namespace {

std::map<std::string, std::string> read_pairs(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key, value;
    if (!(ls >> key >> value)) throw ParseError(line_no, "expected 'key value'");
    kv[key] = value;
  }
  return kv;
}

double lookup(const std::map<std::string, std::string>& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw Error("missing key '" + key + "'");
  return parse_exact(it->second);
}

}  // namespace

void write_properties(std::ostream& out, const PropertyVector& pv) {
  const auto values = pv.to_array();
  for (std::size_t d = 0; d < kPropertyCount; ++d)
    out << PropertyVector::names()[d] << ' ' << format_exact(values[d]) << '\n';
}

PropertyVector read_properties(std::istream& in) {
  auto kv = read_pairs(in);
  std::array<double, kPropertyCount> a{};
  for (std::size_t d = 0; d < kPropertyCount; ++d) a[d] = lookup(kv, PropertyVector::names()[d]);
  return PropertyVector::from_array(a);
}

void write_norm_stats(std::ostream& out, const NormStats& stats) {
  for (std::size_t d = 0; d < kPropertyCount; ++d) {
    out << "mean." << PropertyVector::names()[d] << ' ' << format_exact(stats.mean[d]) << '\n';
    out << "std." << PropertyVector::names()[d] << ' ' << format_exact(stats.stddev[d]) << '\n';
  }
}

NormStats read_norm_stats(std::istream& in) {
  auto kv = read_pairs(in);
  NormStats stats;
  for (std::size_t d = 0; d < kPropertyCount; ++d) {
    stats.mean[d] = lookup(kv, std::string("mean.") + PropertyVector::names()[d]);
    stats.stddev[d] = lookup(kv, std::string("std.") + PropertyVector::names()[d]);
  }
  return stats;
}

}  // namespace adapt
