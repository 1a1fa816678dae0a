#include "adapt/ad/tape.hpp"

#include "adapt/util/error.hpp"

namespace adapt::ad {

const Tensor& Var::value() const { return tape->value(id); }

Var Tape::constant(Tensor value) {
  Node n;
  n.owned = std::move(value);
  nodes_.push_back(std::move(n));
  return {this, static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Tape::leaf(const Tensor& value, std::optional<Tensor>* sink) {
  Node n;
  n.external = &value;
  n.sink = sink;
  n.requires_grad = sink != nullptr;
  nodes_.push_back(std::move(n));
  return {this, static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Var Tape::record(Tensor value, bool requires_grad, BackwardFn backward) {
  Node n;
  n.owned = std::move(value);
  n.requires_grad = requires_grad;
  if (requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return {this, static_cast<std::uint32_t>(nodes_.size() - 1)};
}

const Tensor& Tape::value(std::uint32_t id) const {
  const auto& n = nodes_[id];
  return n.external ? *n.external : n.owned;
}

Tensor& Tape::grad_buffer(std::uint32_t id) {
  auto& n = nodes_[id];
  if (!n.grad) n.grad.emplace(value(id).shape());
  return *n.grad;
}

void Tape::accumulate(std::uint32_t id, const Tensor& delta) {
  if (!nodes_[id].requires_grad) return;
  grad_buffer(id).add_(delta);
}

void Tape::backward(Var loss) {
  if (loss.tape != this) throw Error("loss belongs to a different tape");
  const auto& lv = value(loss.id);
  if (lv.numel() != 1) throw RankError("backward needs a scalar loss, got shape " + shape_str(lv.shape()));
  if (!nodes_[loss.id].requires_grad) return;
  grad_buffer(loss.id).fill(1.0);
  for (std::uint32_t id = loss.id + 1; id-- > 0;) {
    auto& n = nodes_[id];
    if (!n.requires_grad || !n.grad) continue;
    if (n.backward) n.backward(*this, id);
    if (n.sink) {
      if (!*n.sink) n.sink->emplace(value(id).shape());
      (*n.sink)->add_(*n.grad);
    }
  }
}

}  // namespace adapt::ad
