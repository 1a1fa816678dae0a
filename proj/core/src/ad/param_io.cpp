#include "adapt/ad/param_io.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "adapt/util/error.hpp"
#include "adapt/util/text.hpp"

namespace adapt::ad {

void write_param(std::ostream& out, const Parameter& p) {
  out << "param " << p.name << ' ' << p.value.rank();
  for (auto d : p.value.shape()) out << ' ' << d;
  out << '\n';
  const auto values = p.value.values();
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) out << ' ';
    out << format_exact(values[k]);
  }
  out << '\n';
}

void write_params(std::ostream& out, std::span<const Parameter> params) {
  for (const auto& p : params) write_param(out, p);
}

Parameter read_param_block(std::istream& in, const std::vector<std::string>& header) {
  if (header.size() < 3 || header[0] != "param") throw Error("malformed parameter header");
  Parameter p;
  p.name = header[1];
  const auto rank = std::stoul(header[2]);
  if (header.size() != 3 + rank) throw Error("parameter '" + p.name + "' header has wrong dim count");
  Shape shape;
  for (std::size_t k = 0; k < rank; ++k) shape.push_back(std::stoul(header[3 + k]));
  std::string line;
  if (!std::getline(in, line)) throw Error("parameter '" + p.name + "' is missing its values");
  std::vector<double> values;
  values.reserve(shape_numel(shape));
  std::istringstream ls(line);
  std::string tok;
  while (ls >> tok) values.push_back(parse_exact(tok));
  p.value = Tensor(std::move(shape), std::move(values));
  return p;
}

std::vector<Parameter> read_params(std::istream& in) {
  std::vector<Parameter> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<std::string> header;
    std::string tok;
    while (ls >> tok) header.push_back(tok);
    out.push_back(read_param_block(in, header));
  }
  return out;
}

}  // namespace adapt::ad
