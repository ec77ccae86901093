#pragma once

#include <cstdint>
#include <vector>

#include "ptinv/nn/tensor.hpp"

namespace ptinv::nn {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias correction. Moment buffers are created lazily on the first
/// step and bound to the order of `params`.
template <class T>
class Adam {
 public:
  explicit Adam(AdamOptions options = {}) : options_(options) {}

  void step(const std::vector<Tensor<T>*>& params, const std::vector<const Tensor<T>*>& grads);

  [[nodiscard]] std::int64_t steps() const { return t_; }
  [[nodiscard]] const AdamOptions& options() const { return options_; }
  void set_lr(double lr) { options_.lr = lr; }

 private:
  AdamOptions options_;
  std::int64_t t_ = 0;
  std::vector<std::vector<T>> m_, v_;
};

}  // namespace ptinv::nn
