#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "adapt/ad/tensor.hpp"

namespace adapt::ad {

/// Text container, one block per parameter:
///
///     param <name> <rank> <dim>...
///     <value> <value> ...            (row-major, shortest round-trip decimal)
///
/// Reading back yields bit-identical values.
void write_params(std::ostream& out, std::span<const Parameter> params);
void write_param(std::ostream& out, const Parameter& p);
/// Reads consecutive "param" blocks until end of stream.
std::vector<Parameter> read_params(std::istream& in);
/// Reads one block whose header line has already been split into tokens.
Parameter read_param_block(std::istream& in, const std::vector<std::string>& header);

}  // namespace adapt::ad
