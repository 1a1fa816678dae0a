#include "adapt/ad/tensor.hpp"

#include "adapt/util/error.hpp"

namespace adapt::ad {

std::string shape_str(const Shape& s) {
  std::string out = "[";
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (k) out += "x";
    out += std::to_string(s[k]);
  }
  return out + "]";
}

std::size_t shape_numel(const Shape& s) {
  std::size_t n = 1;
  for (auto d : s) n *= d;
  return n;
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)), data_(shape_numel(shape_), fill) {
  if (shape_.size() > 2) throw ShapeError("rank above 2 is not supported: " + shape_str(shape_));
}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), data_(std::move(values)) {
  if (shape_.size() > 2) throw ShapeError("rank above 2 is not supported: " + shape_str(shape_));
  if (data_.size() != shape_numel(shape_))
    throw ShapeError("shape " + shape_str(shape_) + " needs " + std::to_string(shape_numel(shape_)) +
                     " values, got " + std::to_string(data_.size()));
}

double Tensor::item() const {
  if (data_.size() != 1) throw RankError("item() on tensor of shape " + shape_str(shape_));
  return data_[0];
}

void Tensor::fill(double v) {
  for (auto& x : data_) x = v;
}

void Tensor::add_(const Tensor& other, double scale) {
  if (other.shape_ != shape_)
    throw ShapeError("add_ shape mismatch " + shape_str(shape_) + " vs " + shape_str(other.shape_));
  const double* src = other.data();
  double* dst = data();
  for (std::size_t k = 0, n = data_.size(); k < n; ++k) dst[k] += scale * src[k];
}

}  // namespace adapt::ad
