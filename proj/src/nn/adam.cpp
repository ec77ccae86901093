#include "ptinv/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace ptinv::nn {

template <class T>
void Adam<T>::step(const std::vector<Tensor<T>*>& params, const std::vector<const Tensor<T>*>& grads) {
  if (params.size() != grads.size()) throw std::invalid_argument("adam: parameter/gradient count mismatch");
  if (m_.empty()) {
    for (const auto* p : params) {
      m_.emplace_back(p->size(), T(0));
      v_.emplace_back(p->size(), T(0));
    }
  }
  if (m_.size() != params.size()) throw std::invalid_argument("adam: parameter list changed between steps");
  ++t_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  const double step = options_.lr / c1;
  const double sqrt_c2 = std::sqrt(c2);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i]->data;
    const auto& g = grads[i]->data;
    require_same_shape("adam", params[i]->shape, grads[i]->shape);
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double gj = g[j];
      m[j] = static_cast<T>(b1 * m[j] + (1.0 - b1) * gj);
      v[j] = static_cast<T>(b2 * v[j] + (1.0 - b2) * gj * gj);
      const double denom = std::sqrt(static_cast<double>(v[j])) / sqrt_c2 + options_.eps;
      p[j] = static_cast<T>(p[j] - step * m[j] / denom);
    }
  }
}

template class Adam<float>;
template class Adam<double>;

}  // namespace ptinv::nn
