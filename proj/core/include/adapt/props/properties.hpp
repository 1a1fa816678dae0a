#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "adapt/graph/bipartite_graph.hpp"

namespace adapt {

inline constexpr std::size_t kPropertyCount = 8;

/// The eight structural statistics that condition the adaptor.
struct PropertyVector {
  double node_count{0};
  double edge_count{0};
  double user_item_ratio{0};
  double density{0};
  double degree_assortativity{0};
  double robins_alexander_clustering{0};
  double connected_components{0};
  double global_efficiency{0};

  std::array<double, kPropertyCount> to_array() const;
  static PropertyVector from_array(const std::array<double, kPropertyCount>& a);
  static const std::array<const char*, kPropertyCount>& names();
};

struct PropertyOptions {
  /// Graphs with more nodes use sampled global efficiency.
  std::size_t exact_efficiency_cap{2000};
  std::size_t efficiency_samples{10000};
  std::uint64_t seed{0};
};

PropertyVector compute_properties(const BipartiteGraph& g, const PropertyOptions& opts = {});

/// Pearson correlation of endpoint degrees over both orientations of every
/// edge; 0 when either degree sequence is constant.
double degree_assortativity(const BipartiteGraph& g);

/// 4 * (#4-cycles) / (#3-edge paths); 0 when there are no 3-paths.
double robins_alexander_clustering(const BipartiteGraph& g);

std::size_t connected_components(const BipartiteGraph& g);

/// Mean of 1/d(s,t) over ordered pairs s != t (unreachable pairs add 0).
double global_efficiency_exact(const BipartiteGraph& g);

/// Unbiased estimate of global_efficiency_exact from `samples` uniformly drawn
/// ordered pairs. The standard error of the estimate is written to *stderr_out
/// when non-null.
double global_efficiency_sampled(const BipartiteGraph& g, std::size_t samples, std::uint64_t seed,
                                 double* stderr_out = nullptr);

/// Per-dimension z-score statistics fit on a pre-training corpus.
struct NormStats {
  std::array<double, kPropertyCount> mean{};
  std::array<double, kPropertyCount> stddev{};
};

/// Mean and population standard deviation of each dimension.
NormStats fit_norm(std::span<const PropertyVector> corpus);

/// (value - mean) / std per dimension, with std == 0 treated as 1.
std::array<double, kPropertyCount> normalize(const PropertyVector& pv, const NormStats& stats);

// Key-value text format: one "name value" line per field; values use the
// shortest decimal form that round-trips exactly.
void write_properties(std::ostream& out, const PropertyVector& pv);
PropertyVector read_properties(std::istream& in);
void write_norm_stats(std::ostream& out, const NormStats& stats);
NormStats read_norm_stats(std::istream& in);

}  // namespace adapt
