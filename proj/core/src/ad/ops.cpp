#include "adapt/ad/ops.hpp"

#include <cmath>
#include <memory>

#include "adapt/util/error.hpp"
#include "adapt/util/rng.hpp"

namespace adapt::ad {

namespace {

void require_same_tape(Var a, Var b) {
  if (a.tape != b.tape) throw Error("operands recorded on different tapes");
}

void require_same_shape(const char* op, Var a, Var b) {
  if (a.shape() != b.shape())
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                     shape_str(b.shape()));
}

bool needs_grad(Var a) { return a.tape->requires_grad(a.id); }
bool needs_grad(Var a, Var b) { return needs_grad(a) || needs_grad(b); }

double sigmoid_scalar(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Element-wise unary op with derivative expressed through input x and output y.
template <typename F, typename D>
Var unary(Var a, F f, D dfdx) {
  const Tensor& x = a.value();
  Tensor y(x.shape());
  for (std::size_t k = 0; k < x.numel(); ++k) y[k] = f(x[k]);
  return a.tape->record(std::move(y), needs_grad(a), [a, dfdx](Tape& t, std::uint32_t self) {
    if (!t.requires_grad(a.id)) return;
    const Tensor& x = t.value(a.id);
    const Tensor& y = t.value(self);
    const Tensor& gy = t.grad(self);
    Tensor& gx = t.grad_buffer(a.id);
    for (std::size_t k = 0; k < x.numel(); ++k) gx[k] += gy[k] * dfdx(x[k], y[k]);
  });
}

}  // namespace

Var matmul(Var a, Var b) {
  require_same_tape(a, b);
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  if (A.rank() != 2 || B.rank() != 2 || A.cols() != B.rows())
    throw ShapeError("matmul: incompatible shapes " + shape_str(A.shape()) + " and " + shape_str(B.shape()));
  const std::size_t n = A.rows(), k = A.cols(), m = B.cols();
  Tensor C({n, m});
  for (std::size_t i = 0; i < n; ++i) {
    double* c = C.data() + i * m;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = A.data()[i * k + p];
      if (av == 0.0) continue;
      const double* brow = B.data() + p * m;
      for (std::size_t j = 0; j < m; ++j) c[j] += av * brow[j];
    }
  }
  return a.tape->record(std::move(C), needs_grad(a, b), [a, b, n, k, m](Tape& t, std::uint32_t self) {
    const Tensor& gC = t.grad(self);
    const Tensor& A = t.value(a.id);
    const Tensor& B = t.value(b.id);
    if (t.requires_grad(a.id)) {
      Tensor& gA = t.grad_buffer(a.id);
      for (std::size_t i = 0; i < n; ++i) {
        const double* gc = gC.data() + i * m;
        for (std::size_t p = 0; p < k; ++p) {
          const double* brow = B.data() + p * m;
          double s = 0.0;
          for (std::size_t j = 0; j < m; ++j) s += gc[j] * brow[j];
          gA.data()[i * k + p] += s;
        }
      }
    }
    if (t.requires_grad(b.id)) {
      Tensor& gB = t.grad_buffer(b.id);
      for (std::size_t i = 0; i < n; ++i) {
        const double* gc = gC.data() + i * m;
        for (std::size_t p = 0; p < k; ++p) {
          const double av = A.data()[i * k + p];
          if (av == 0.0) continue;
          double* gb = gB.data() + p * m;
          for (std::size_t j = 0; j < m; ++j) gb[j] += av * gc[j];
        }
      }
    }
  });
}

Var spmm(const SparseMatrix& s, Var x) {
  const Tensor& X = x.value();
  if (X.rank() != 2 || X.rows() != s.cols)
    throw ShapeError("spmm: sparse [" + std::to_string(s.rows) + "x" + std::to_string(s.cols) +
                     "] incompatible with " + shape_str(X.shape()));
  if (s.row.size() != s.col.size() || s.row.size() != s.weight.size())
    throw ShapeError("spmm: coordinate arrays differ in length");
  const std::size_t m = X.cols();
  Tensor Y({s.rows, m});
  for (std::size_t e = 0; e < s.row.size(); ++e) {
    const double w = s.weight[e];
    const double* src = X.data() + std::size_t{s.col[e]} * m;
    double* dst = Y.data() + std::size_t{s.row[e]} * m;
    for (std::size_t j = 0; j < m; ++j) dst[j] += w * src[j];
  }
  auto shared = std::make_shared<const SparseMatrix>(s);
  return x.tape->record(std::move(Y), needs_grad(x), [x, shared, m](Tape& t, std::uint32_t self) {
    if (!t.requires_grad(x.id)) return;
    const Tensor& gY = t.grad(self);
    Tensor& gX = t.grad_buffer(x.id);
    const auto& sp = *shared;
    for (std::size_t e = 0; e < sp.row.size(); ++e) {
      const double w = sp.weight[e];
      const double* src = gY.data() + std::size_t{sp.row[e]} * m;
      double* dst = gX.data() + std::size_t{sp.col[e]} * m;
      for (std::size_t j = 0; j < m; ++j) dst[j] += w * src[j];
    }
  });
}

Var add(Var a, Var b) {
  require_same_tape(a, b);
  require_same_shape("add", a, b);
  Tensor y = a.value();
  y.add_(b.value());
  return a.tape->record(std::move(y), needs_grad(a, b), [a, b](Tape& t, std::uint32_t self) {
    t.accumulate(a.id, t.grad(self));
    t.accumulate(b.id, t.grad(self));
  });
}

Var sub(Var a, Var b) {
  require_same_tape(a, b);
  require_same_shape("sub", a, b);
  Tensor y = a.value();
  y.add_(b.value(), -1.0);
  return a.tape->record(std::move(y), needs_grad(a, b), [a, b](Tape& t, std::uint32_t self) {
    t.accumulate(a.id, t.grad(self));
    if (t.requires_grad(b.id)) t.grad_buffer(b.id).add_(t.grad(self), -1.0);
  });
}

Var mul(Var a, Var b) {
  require_same_tape(a, b);
  require_same_shape("mul", a, b);
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  Tensor y(A.shape());
  for (std::size_t k = 0; k < y.numel(); ++k) y[k] = A[k] * B[k];
  return a.tape->record(std::move(y), needs_grad(a, b), [a, b](Tape& t, std::uint32_t self) {
    const Tensor& g = t.grad(self);
    const Tensor& A = t.value(a.id);
    const Tensor& B = t.value(b.id);
    if (t.requires_grad(a.id)) {
      Tensor& gA = t.grad_buffer(a.id);
      for (std::size_t k = 0; k < g.numel(); ++k) gA[k] += g[k] * B[k];
    }
    if (t.requires_grad(b.id)) {
      Tensor& gB = t.grad_buffer(b.id);
      for (std::size_t k = 0; k < g.numel(); ++k) gB[k] += g[k] * A[k];
    }
  });
}

Var add_row(Var a, Var b) {
  require_same_tape(a, b);
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  if (B.rank() != 1 || B.numel() != A.cols())
    throw ShapeError("add_row: " + shape_str(B.shape()) + " does not broadcast over " + shape_str(A.shape()));
  Tensor y = A;
  const std::size_t m = A.cols();
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < m; ++j) y.data()[i * m + j] += B[j];
  return a.tape->record(std::move(y), needs_grad(a, b), [a, b, m](Tape& t, std::uint32_t self) {
    const Tensor& g = t.grad(self);
    t.accumulate(a.id, g);
    if (t.requires_grad(b.id)) {
      Tensor& gB = t.grad_buffer(b.id);
      for (std::size_t i = 0; i < g.numel() / m; ++i)
        for (std::size_t j = 0; j < m; ++j) gB[j] += g.data()[i * m + j];
    }
  });
}

Var scale(Var a, double c) {
  return unary(a, [c](double x) { return c * x; }, [c](double, double) { return c; });
}

Var add_scalar(Var a, double c) {
  return unary(a, [c](double x) { return x + c; }, [](double, double) { return 1.0; });
}

Var relu(Var a) {
  return unary(a, [](double x) { return x > 0.0 ? x : 0.0; },
               [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var sigmoid(Var a) {
  return unary(a, sigmoid_scalar, [](double, double y) { return y * (1.0 - y); });
}

Var tanh(Var a) {
  return unary(a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Var log_sigmoid(Var a) {
  return unary(
      a, [](double x) { return std::min(x, 0.0) - std::log1p(std::exp(-std::abs(x))); },
      [](double x, double) { return sigmoid_scalar(-x); });
}

Var mean_rows(Var a) {
  const Tensor& A = a.value();
  if (A.rank() != 2 || A.rows() == 0) throw ShapeError("mean_rows: needs a non-empty matrix, got " + shape_str(A.shape()));
  const std::size_t n = A.rows(), m = A.cols();
  Tensor y({m});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) y[j] += A.data()[i * m + j];
  for (std::size_t j = 0; j < m; ++j) y[j] /= static_cast<double>(n);
  return a.tape->record(std::move(y), needs_grad(a), [a, n, m](Tape& t, std::uint32_t self) {
    if (!t.requires_grad(a.id)) return;
    const Tensor& g = t.grad(self);
    Tensor& gA = t.grad_buffer(a.id);
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) gA.data()[i * m + j] += g[j] * inv;
  });
}

Var sum(Var a) {
  double s = 0.0;
  for (double v : a.value().values()) s += v;
  return a.tape->record(Tensor::scalar(s), needs_grad(a), [a](Tape& t, std::uint32_t self) {
    if (!t.requires_grad(a.id)) return;
    const double g = t.grad(self)[0];
    Tensor& gA = t.grad_buffer(a.id);
    for (std::size_t k = 0; k < gA.numel(); ++k) gA[k] += g;
  });
}

Var dot(Var a, Var b) {
  require_same_tape(a, b);
  if (a.value().numel() != b.value().numel())
    throw ShapeError("dot: shape mismatch " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  double s = 0.0;
  for (std::size_t k = 0; k < A.numel(); ++k) s += A[k] * B[k];
  return a.tape->record(Tensor::scalar(s), needs_grad(a, b), [a, b](Tape& t, std::uint32_t self) {
    const double g = t.grad(self)[0];
    const Tensor& A = t.value(a.id);
    const Tensor& B = t.value(b.id);
    if (t.requires_grad(a.id)) {
      Tensor& gA = t.grad_buffer(a.id);
      for (std::size_t k = 0; k < gA.numel(); ++k) gA[k] += g * B[k];
    }
    if (t.requires_grad(b.id)) {
      Tensor& gB = t.grad_buffer(b.id);
      for (std::size_t k = 0; k < gB.numel(); ++k) gB[k] += g * A[k];
    }
  });
}

Var dropout(Var a, double p, std::uint64_t seed, bool train_mode) {
  if (p < 0.0 || p >= 1.0) throw ConfigError("dropout rate must lie in [0, 1)");
  if (!train_mode || p == 0.0) return a;
  const Tensor& A = a.value();
  auto mask = std::make_shared<std::vector<double>>(A.numel());
  Rng rng(seed);
  const double keep_scale = 1.0 / (1.0 - p);
  Tensor y(A.shape());
  for (std::size_t k = 0; k < A.numel(); ++k) {
    (*mask)[k] = uniform_real(rng) < p ? 0.0 : keep_scale;
    y[k] = A[k] * (*mask)[k];
  }
  return a.tape->record(std::move(y), needs_grad(a), [a, mask](Tape& t, std::uint32_t self) {
    if (!t.requires_grad(a.id)) return;
    const Tensor& g = t.grad(self);
    Tensor& gA = t.grad_buffer(a.id);
    for (std::size_t k = 0; k < g.numel(); ++k) gA[k] += g[k] * (*mask)[k];
  });
}

Var concat(Var a, Var b) {
  require_same_tape(a, b);
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  if (A.rank() != B.rank() || A.rank() == 0 || A.rows() != B.rows())
    throw ShapeError("concat: incompatible shapes " + shape_str(A.shape()) + " and " + shape_str(B.shape()));
  const std::size_t n = A.rows(), ma = A.cols(), mb = B.cols();
  Shape shape = A.rank() == 1 ? Shape{ma + mb} : Shape{n, ma + mb};
  Tensor y(shape);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < ma; ++j) y.data()[i * (ma + mb) + j] = A.data()[i * ma + j];
    for (std::size_t j = 0; j < mb; ++j) y.data()[i * (ma + mb) + ma + j] = B.data()[i * mb + j];
  }
  return a.tape->record(std::move(y), needs_grad(a, b), [a, b, n, ma, mb](Tape& t, std::uint32_t self) {
    const Tensor& g = t.grad(self);
    if (t.requires_grad(a.id)) {
      Tensor& gA = t.grad_buffer(a.id);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < ma; ++j) gA.data()[i * ma + j] += g.data()[i * (ma + mb) + j];
    }
    if (t.requires_grad(b.id)) {
      Tensor& gB = t.grad_buffer(b.id);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < mb; ++j) gB.data()[i * mb + j] += g.data()[i * (ma + mb) + ma + j];
    }
  });
}

Var slice(Var a, std::size_t offset, Shape shape) {
  const Tensor& A = a.value();
  const std::size_t len = shape_numel(shape);
  if (offset + len > A.numel())
    throw ShapeError("slice: [" + std::to_string(offset) + ", " + std::to_string(offset + len) +
                     ") exceeds " + shape_str(A.shape()));
  std::vector<double> values(A.data() + offset, A.data() + offset + len);
  return a.tape->record(Tensor(std::move(shape), std::move(values)), needs_grad(a),
                        [a, offset, len](Tape& t, std::uint32_t self) {
                          if (!t.requires_grad(a.id)) return;
                          const Tensor& g = t.grad(self);
                          Tensor& gA = t.grad_buffer(a.id);
                          for (std::size_t k = 0; k < len; ++k) gA[offset + k] += g[k];
                        });
}

Var reshape(Var a, Shape shape) {
  if (shape_numel(shape) != a.value().numel())
    throw ShapeError("reshape: " + shape_str(a.shape()) + " cannot become " + shape_str(shape));
  return slice(a, 0, std::move(shape));
}

}  // namespace adapt::ad
