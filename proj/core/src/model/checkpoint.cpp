#include "adapt/model/checkpoint.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "adapt/ad/param_io.hpp"
#include "adapt/util/error.hpp"
#include "adapt/util/text.hpp"

namespace adapt {

namespace {

constexpr const char* kHeader = "# adapt-checkpoint v1";

std::string join_dims(const std::vector<std::size_t>& dims) {
  std::string s;
  for (std::size_t k = 0; k < dims.size(); ++k) s += (k ? "," : "") + std::to_string(dims[k]);
  return s;
}

std::vector<std::size_t> split_dims(const std::string& s) {
  std::vector<std::size_t> dims;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) dims.push_back(std::stoul(tok));
  return dims;
}

}  // namespace

Checkpoint Checkpoint::fresh(const ModelConfig& cfg, std::uint64_t seed) {
  Checkpoint ck;
  ck.config = cfg;
  for (std::size_t d = 0; d < kPropertyCount; ++d) ck.norm.stddev[d] = 1.0;
  ck.meta = init_meta_params(cfg, seed);
  ck.adaptor = init_adaptor_params(cfg, seed);
  return ck;
}

std::vector<ad::Tensor> Checkpoint::effective_layers(const std::array<double, kPropertyCount>& p_norm) const {
  if (use_adaptor) return adapt_weights(meta, adaptor, p_norm, config).layers;
  std::vector<ad::Tensor> out;
  for (const auto& p : meta.layers) out.push_back(p.value);
  return out;
}

std::vector<ad::Tensor> Checkpoint::effective_layers(const BipartiteGraph& train_graph) const {
  if (!use_adaptor) return effective_layers(std::array<double, kPropertyCount>{});
  return effective_layers(normalize(compute_properties(train_graph), norm));
}

std::string Checkpoint::info_value(const std::string& key, const std::string& fallback) const {
  for (const auto& [k, v] : info)
    if (k == key) return v;
  return fallback;
}

void write_checkpoint(std::ostream& out, const Checkpoint& ck) {
  const auto& c = ck.config;
  out << kHeader << '\n';
  out << "config max_label " << c.max_label << '\n';
  out << "config layer_dims " << join_dims(c.layer_dims) << '\n';
  out << "config adaptor_hidden " << c.adaptor_hidden << '\n';
  out << "config dropout " << format_exact(c.dropout) << '\n';
  out << "config bpr_on_logits " << (c.bpr_on_logits ? 1 : 0) << '\n';
  out << "config rwr.restart_prob " << format_exact(c.rwr.restart_prob) << '\n';
  out << "config rwr.walk_steps " << c.rwr.walk_steps << '\n';
  out << "config rwr.max_nodes_per_side " << c.rwr.max_nodes_per_side << '\n';
  out << "config use_adaptor " << (ck.use_adaptor ? 1 : 0) << '\n';
  for (const auto& [k, v] : ck.info) out << "info " << k << ' ' << v << '\n';
  for (std::size_t d = 0; d < kPropertyCount; ++d) {
    out << "norm mean." << PropertyVector::names()[d] << ' ' << format_exact(ck.norm.mean[d]) << '\n';
    out << "norm std." << PropertyVector::names()[d] << ' ' << format_exact(ck.norm.stddev[d]) << '\n';
  }
  for (const auto& p : ck.meta.layers) ad::write_param(out, p);
  ad::write_param(out, ck.meta.delta);
  ad::write_param(out, ck.adaptor.trunk_w);
  ad::write_param(out, ck.adaptor.trunk_b);
  for (std::size_t l = 0; l < ck.adaptor.head_w.size(); ++l) {
    ad::write_param(out, ck.adaptor.head_w[l]);
    ad::write_param(out, ck.adaptor.head_b[l]);
  }
}

void write_checkpoint_file(const std::string& path, const Checkpoint& ck) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_checkpoint(out, ck);
}

Checkpoint read_checkpoint(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw Error("not an adapt checkpoint (bad header)");
  Checkpoint ck;
  std::map<std::string, std::string> config;
  std::map<std::string, double> norm;
  std::map<std::string, ad::Parameter> params;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    std::string t;
    while (ls >> t) tok.push_back(t);
    if (tok[0] == "config" && tok.size() == 3) {
      config[tok[1]] = tok[2];
    } else if (tok[0] == "info" && tok.size() >= 2) {
      const auto pos = line.find(tok[1]) + tok[1].size();
      ck.info.emplace_back(tok[1], pos < line.size() ? line.substr(pos + 1) : "");
    } else if (tok[0] == "norm" && tok.size() == 3) {
      norm[tok[1]] = parse_exact(tok[2]);
    } else if (tok[0] == "param") {
      auto p = ad::read_param_block(in, tok);
      auto name = p.name;
      params[name] = std::move(p);
    } else {
      throw Error("unrecognised checkpoint line: " + line);
    }
  }
  auto need = [&](const std::string& k) {
    auto it = config.find(k);
    if (it == config.end()) throw Error("checkpoint missing config '" + k + "'");
    return it->second;
  };
  auto& c = ck.config;
  c.max_label = std::stoul(need("max_label"));
  c.layer_dims = split_dims(need("layer_dims"));
  c.adaptor_hidden = std::stoul(need("adaptor_hidden"));
  c.dropout = parse_exact(need("dropout"));
  c.bpr_on_logits = need("bpr_on_logits") == "1";
  c.rwr.restart_prob = parse_exact(need("rwr.restart_prob"));
  c.rwr.walk_steps = std::stoul(need("rwr.walk_steps"));
  c.rwr.max_nodes_per_side = std::stoul(need("rwr.max_nodes_per_side"));
  ck.use_adaptor = need("use_adaptor") == "1";
  c.validate();

  for (std::size_t d = 0; d < kPropertyCount; ++d) {
    const std::string name = PropertyVector::names()[d];
    if (!norm.count("mean." + name) || !norm.count("std." + name))
      throw Error("checkpoint missing normalisation for '" + name + "'");
    ck.norm.mean[d] = norm["mean." + name];
    ck.norm.stddev[d] = norm["std." + name];
  }

  auto take = [&](const std::string& name, const ad::Shape& shape) {
    auto it = params.find(name);
    if (it == params.end()) throw Error("checkpoint missing parameter '" + name + "'");
    if (it->second.value.shape() != shape)
      throw ShapeError("parameter '" + name + "' has shape " + ad::shape_str(it->second.value.shape()) +
                       ", config implies " + ad::shape_str(shape));
    return std::move(it->second);
  };
  for (std::size_t l = 0; l < c.layer_count(); ++l)
    ck.meta.layers.push_back(take("theta." + std::to_string(l + 1), {c.layer_in(l), c.layer_out(l)}));
  ck.meta.delta = take("delta", {c.layer_dims.back()});
  ck.adaptor.trunk_w = take("adaptor.trunk.w", {kPropertyCount, c.adaptor_hidden});
  ck.adaptor.trunk_b = take("adaptor.trunk.b", {c.adaptor_hidden});
  for (std::size_t l = 0; l < c.layer_count(); ++l) {
    const auto tag = std::to_string(l + 1);
    ck.adaptor.head_w.push_back(take("adaptor.head." + tag + ".w", {c.adaptor_hidden, c.film_size(l)}));
    ck.adaptor.head_b.push_back(take("adaptor.head." + tag + ".b", {c.film_size(l)}));
  }
  return ck;
}

Checkpoint read_checkpoint_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return read_checkpoint(in);
}

}  // namespace adapt
