#pragma once

#include <cstdint>
#include <vector>

#include "adapt/ad/tape.hpp"

namespace adapt::ad {

/// Constant sparse matrix in coordinate form, used for neighbourhood
/// aggregation: out[row[k]] += weight[k] * in[col[k]].
struct SparseMatrix {
  std::size_t rows{0};
  std::size_t cols{0};
  std::vector<std::uint32_t> row;
  std::vector<std::uint32_t> col;
  std::vector<double> weight;
};

Var matmul(Var a, Var b);
Var spmm(const SparseMatrix& s, Var x);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
/// a[n x m] + b[m] broadcast over rows.
Var add_row(Var a, Var b);
Var scale(Var a, double c);
Var add_scalar(Var a, double c);
Var relu(Var a);
Var sigmoid(Var a);
Var tanh(Var a);
/// Numerically stable log(sigmoid(a)).
Var log_sigmoid(Var a);
/// Column means of a matrix (rank-1 result).
Var mean_rows(Var a);
Var sum(Var a);
Var dot(Var a, Var b);
/// Inverted dropout: in train mode each entry is zeroed with probability p and
/// survivors are scaled by 1 / (1 - p); identity otherwise.
Var dropout(Var a, double p, std::uint64_t seed, bool train_mode);
/// Concatenation along the last axis (rows must agree).
Var concat(Var a, Var b);
/// Contiguous slice [offset, offset + len) of the flattened values, reshaped.
Var slice(Var a, std::size_t offset, Shape shape);
Var reshape(Var a, Shape shape);

}  // namespace adapt::ad
