#include "adapt/graph/edge_io.hpp"

#include <fstream>
#include <sstream>
#include <string_view>

#include "adapt/util/error.hpp"

namespace adapt {

namespace {

std::vector<std::string_view> split_fields(std::string_view line, char delimiter) {
  std::vector<std::string_view> fields;
  if (delimiter == '\0') {
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
      if (pos >= line.size()) break;
      std::size_t end = pos;
      while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
      fields.push_back(line.substr(pos, end - pos));
      pos = end;
    }
  } else {
    std::size_t pos = 0;
    for (;;) {
      std::size_t end = line.find(delimiter, pos);
      fields.push_back(line.substr(pos, end == std::string_view::npos ? end : end - pos));
      if (end == std::string_view::npos) break;
      pos = end + 1;
    }
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

BipartiteGraph load_edge_list(std::istream& in, const EdgeListFormat& format) {
  IdMap users;
  IdMap items;
  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == format.comment) continue;
    auto fields = split_fields(view, format.delimiter);
    if (fields.size() < 2) throw ParseError(line_no, "expected user and item fields");
    auto user = trim(fields[0]);
    auto item = trim(fields[1]);
    if (user.empty()) throw ParseError(line_no, "empty user field");
    if (item.empty()) throw ParseError(line_no, "empty item field");
    edges.push_back({users.intern(std::string(user)), items.intern(std::string(item))});
  }
  if (edges.empty()) throw EmptyGraphError("edge list contains no interactions");
  return BipartiteGraph::from_edges(std::move(users), std::move(items), edges);
}

BipartiteGraph load_edge_list_file(const std::string& path, const EdgeListFormat& format) {
  auto in = open_in(path);
  return load_edge_list(in, format);
}

void write_edge_list(std::ostream& out, const BipartiteGraph& g) {
  for (const auto& e : g.edges())
    out << g.user_ids().id(e.user) << '\t' << g.item_ids().id(e.item) << '\n';
}

void write_edge_list_file(const std::string& path, const BipartiteGraph& g) {
  auto out = open_out(path);
  write_edge_list(out, g);
}

void write_manifest(std::ostream& out, const Manifest& m) {
  out << "# adapt-manifest v1\n";
  for (const auto& [k, v] : m.meta) out << "meta\t" << k << '\t' << v << '\n';
  auto dump = [&](const char* tag, const std::vector<Edge>& edges) {
    for (const auto& e : edges)
      out << tag << '\t' << m.graph.user_ids().id(e.user) << '\t' << m.graph.item_ids().id(e.item)
          << '\n';
  };
  dump("train", m.split.train);
  dump("val", m.split.val);
  dump("test", m.split.test);
}

void write_manifest_file(const std::string& path, const Manifest& m) {
  auto out = open_out(path);
  write_manifest(out, m);
}

Manifest read_manifest(std::istream& in) {
  Manifest m;
  IdMap users;
  IdMap items;
  std::vector<Edge> all;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    auto fields = split_fields(view, '\t');
    if (fields.size() != 3) throw ParseError(line_no, "expected three tab-separated fields");
    if (fields[0] == "meta") {
      m.meta.emplace_back(std::string(fields[1]), std::string(fields[2]));
      if (fields[1] == "seed") m.split.seed = std::stoull(std::string(fields[2]));
      continue;
    }
    if (fields[1].empty() || fields[2].empty()) throw ParseError(line_no, "empty node id");
    Edge e{users.intern(std::string(fields[1])), items.intern(std::string(fields[2]))};
    if (fields[0] == "train")
      m.split.train.push_back(e);
    else if (fields[0] == "val")
      m.split.val.push_back(e);
    else if (fields[0] == "test")
      m.split.test.push_back(e);
    else
      throw ParseError(line_no, "unknown partition '" + std::string(fields[0]) + "'");
    all.push_back(e);
  }
  if (all.empty()) throw EmptyGraphError("manifest contains no edges");
  m.graph = BipartiteGraph::from_edges(std::move(users), std::move(items), all);
  if (m.graph.edge_count() != all.size()) throw Error("manifest partitions overlap");
  return m;
}

Manifest read_manifest_file(const std::string& path) {
  auto in = open_in(path);
  return read_manifest(in);
}

}  // namespace adapt
