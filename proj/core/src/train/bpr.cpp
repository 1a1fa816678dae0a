#include <cmath>

#include "adapt/train/trainer.hpp"
#include "adapt/util/error.hpp"

namespace adapt {

ad::Var bpr_loss(ad::Var s_pos, ad::Var s_neg) {
  return ad::scale(ad::log_sigmoid(ad::sub(s_pos, s_neg)), -1.0);
}

ad::Var bpr_loss(std::span<const ad::Var> s_pos, std::span<const ad::Var> s_neg) {
  if (s_pos.size() != s_neg.size() || s_pos.empty())
    throw ShapeError("bpr: " + std::to_string(s_pos.size()) + " positive vs " +
                     std::to_string(s_neg.size()) + " negative scores");
  ad::Var total = bpr_loss(s_pos[0], s_neg[0]);
  for (std::size_t k = 1; k < s_pos.size(); ++k) total = ad::add(total, bpr_loss(s_pos[k], s_neg[k]));
  return total;
}

double bpr_value(double s_pos, double s_neg) {
  const double x = s_pos - s_neg;
  // -log sigmoid(x) = log(1 + e^-x), evaluated without overflow.
  return x >= 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

}  // namespace adapt
