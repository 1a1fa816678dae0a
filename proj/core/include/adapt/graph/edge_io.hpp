#pragma once

#include <iosfwd>
#include <string>

#include "adapt/graph/bipartite_graph.hpp"
#include "adapt/graph/split.hpp"

namespace adapt {

/// How records of an edge-list file are split into fields.
struct EdgeListFormat {
  /// Field separator; '\0' splits on any run of spaces or tabs.
  char delimiter{'\0'};
  char comment{'#'};
};

/// Parses "user item [ignored...]" records. Blank lines and lines starting
/// with the comment character are skipped. Duplicates are dropped and nodes
/// are indexed in order of first appearance.
BipartiteGraph load_edge_list(std::istream& in, const EdgeListFormat& format = {});
BipartiteGraph load_edge_list_file(const std::string& path, const EdgeListFormat& format = {});

/// Writes one "user_id<TAB>item_id" line per edge, in edge order.
void write_edge_list(std::ostream& out, const BipartiteGraph& g);
void write_edge_list_file(const std::string& path, const BipartiteGraph& g);

/// A graph together with its train/val/test partition, as persisted on disk.
///
/// Manifest format (UTF-8 text, tab separated):
///
///     # adapt-manifest v1
///     meta<TAB>key<TAB>value          (zero or more)
///     train<TAB>user_id<TAB>item_id   (one line per edge)
///     val<TAB>user_id<TAB>item_id
///     test<TAB>user_id<TAB>item_id
///
/// Node indices are assigned by first appearance over the edge lines, so the
/// round trip reproduces the same dense indices.
struct Manifest {
  BipartiteGraph graph;  // union of all partitions
  EdgeSplit split;
  std::vector<std::pair<std::string, std::string>> meta;

  /// The graph restricted to the training partition (same node index space).
  BipartiteGraph train_graph() const { return graph.with_edges(split.train); }
};

void write_manifest(std::ostream& out, const Manifest& m);
void write_manifest_file(const std::string& path, const Manifest& m);
Manifest read_manifest(std::istream& in);
Manifest read_manifest_file(const std::string& path);

}  // namespace adapt
