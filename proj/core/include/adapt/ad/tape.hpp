#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <vector>

#include "adapt/ad/tensor.hpp"

namespace adapt::ad {

class Tape;

/// Handle to a tensor recorded on a tape.
struct Var {
  Tape* tape{nullptr};
  std::uint32_t id{0};

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
};

/// Define-by-run record of a computation. Nodes are appended in execution
/// order and backward() visits them in exact reverse order.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::uint32_t self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Value without gradient tracking.
  Var constant(Tensor value);
  /// Leaf whose value lives outside the tape (must outlive it). Gradients are
  /// accumulated into *sink during backward().
  Var leaf(const Tensor& value, std::optional<Tensor>* sink);
  Var param(Parameter& p) { return leaf(p.value, &p.grad); }

  /// Records the result of an operation. `backward` reads grad(self) and
  /// accumulates into its inputs through accumulate().
  Var record(Tensor value, bool requires_grad, BackwardFn backward);

  const Tensor& value(std::uint32_t id) const;
  bool requires_grad(std::uint32_t id) const { return nodes_[id].requires_grad; }
  const Tensor& grad(std::uint32_t id) const { return *nodes_[id].grad; }
  /// grad(id) += delta (allocating zeros on first use). No-op when the node
  /// does not require grad.
  void accumulate(std::uint32_t id, const Tensor& delta);
  /// Mutable gradient buffer of a node, zero-initialised on first use.
  Tensor& grad_buffer(std::uint32_t id);

  /// Populates gradients of every leaf reachable from `loss`.
  /// Throws RankError unless loss holds exactly one element.
  void backward(Var loss);

  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    Tensor owned;
    const Tensor* external{nullptr};
    std::optional<Tensor> grad;
    std::optional<Tensor>* sink{nullptr};
    bool requires_grad{false};
    BackwardFn backward;
  };
  std::deque<Node> nodes_;  // stable addresses: Var::value() references survive later records
};

}  // namespace adapt::ad
