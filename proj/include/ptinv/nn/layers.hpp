#pragma once

#include <random>
#include <string>
#include <vector>

#include "ptinv/nn/tensor.hpp"

namespace ptinv::nn {

// Layers hold parameters only. forward() is const and keeps no state, so one
// instance can serve many threads; backward() takes the forward input again
// and accumulates parameter gradients into a same-shaped `grad` instance.

template <class T>
class Dense {
 public:
  Dense() = default;
  Dense(std::size_t in, std::size_t out);

  /// x: [B, in] -> [B, out]
  [[nodiscard]] Tensor<T> forward(const Tensor<T>& x) const;
  /// Returns dx; skipped (empty) when need_dx is false.
  Tensor<T> backward(const Tensor<T>& x, const Tensor<T>& dy, Dense& grad, bool need_dx = true) const;

  void init(std::mt19937_64& rng, double gain = 1.0);
  [[nodiscard]] std::size_t in_features() const { return weight.shape.empty() ? 0 : weight.dim(1); }
  [[nodiscard]] std::size_t out_features() const { return weight.shape.empty() ? 0 : weight.dim(0); }
  [[nodiscard]] Dense zeros_like() const;

  Tensor<T> weight;  // [out, in]
  Tensor<T> bias;    // [out]
};

template <class T>
class Conv1d {
 public:
  Conv1d() = default;
  Conv1d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel, std::size_t stride = 1,
         std::size_t padding = 0);

  [[nodiscard]] std::size_t output_length(std::size_t length) const;
  /// x: [B, Cin, L] -> [B, Cout, Lout]
  [[nodiscard]] Tensor<T> forward(const Tensor<T>& x) const;
  Tensor<T> backward(const Tensor<T>& x, const Tensor<T>& dy, Conv1d& grad, bool need_dx = true) const;

  void init(std::mt19937_64& rng, double gain = 1.0);
  [[nodiscard]] Conv1d zeros_like() const;

  Tensor<T> weight;  // [Cout, Cin, K]
  Tensor<T> bias;    // [Cout]
  std::size_t stride = 1;
  std::size_t padding = 0;
};

template <class T>
class ConvTranspose1d {
 public:
  ConvTranspose1d() = default;
  ConvTranspose1d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel, std::size_t stride = 1,
                  std::size_t padding = 0, std::size_t output_padding = 0);

  [[nodiscard]] std::size_t output_length(std::size_t length) const;
  /// x: [B, Cin, L] -> [B, Cout, (L-1)*stride - 2*padding + K + output_padding]
  [[nodiscard]] Tensor<T> forward(const Tensor<T>& x) const;
  Tensor<T> backward(const Tensor<T>& x, const Tensor<T>& dy, ConvTranspose1d& grad, bool need_dx = true) const;

  void init(std::mt19937_64& rng, double gain = 1.0);
  [[nodiscard]] ConvTranspose1d zeros_like() const;

  Tensor<T> weight;  // [Cin, Cout, K]
  Tensor<T> bias;    // [Cout]
  std::size_t stride = 1;
  std::size_t padding = 0;
  std::size_t output_padding = 0;
};

template <class T>
[[nodiscard]] Tensor<T> relu(Tensor<T> x);
/// Gradient through relu given its output y.
template <class T>
[[nodiscard]] Tensor<T> relu_backward(const Tensor<T>& y, Tensor<T> dy);

template <class T>
[[nodiscard]] Tensor<T> sigmoid(Tensor<T> x);
/// Gradient through sigmoid given its output y.
template <class T>
[[nodiscard]] Tensor<T> sigmoid_backward(const Tensor<T>& y, Tensor<T> dy);

}  // namespace ptinv::nn
