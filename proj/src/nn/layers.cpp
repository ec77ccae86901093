#include "ptinv/nn/layers.hpp"

#include <cmath>

#include <Eigen/Core>

namespace ptinv::nn {

namespace {

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class T>
using MatMap = Eigen::Map<Mat<T>>;
template <class T>
using ConstMatMap = Eigen::Map<const Mat<T>>;
template <class T>
using VecMap = Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>>;
template <class T>
using ConstVecMap = Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>>;

template <class T>
void fill_uniform(Tensor<T>& t, std::mt19937_64& rng, double bound) {
  std::uniform_real_distribution<double> u(-bound, bound);
  for (auto& v : t.data) v = static_cast<T>(u(rng));
}

void require_rank(std::string_view what, std::span<const std::size_t> shape, std::size_t rank) {
  if (shape.size() != rank) {
    throw std::invalid_argument(std::string(what) + ": expected rank " + std::to_string(rank) + " input, got " +
                                shape_string(shape));
  }
}

// Columns are ordered (b, l); row r = c*K + k reads x[b, c, l*stride - padding + k].
template <class T>
Mat<T> im2col(const Tensor<T>& x, std::size_t K, std::size_t stride, std::size_t padding, std::size_t out_len) {
  const std::size_t B = x.dim(0), C = x.dim(1), L = x.dim(2);
  Mat<T> col = Mat<T>::Zero(static_cast<Eigen::Index>(C * K), static_cast<Eigen::Index>(B * out_len));
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t k = 0; k < K; ++k) {
      T* row = col.data() + (c * K + k) * B * out_len;
      for (std::size_t b = 0; b < B; ++b) {
        const T* src = x.ptr() + (b * C + c) * L;
        T* dst = row + b * out_len;
        for (std::size_t l = 0; l < out_len; ++l) {
          const auto pos = static_cast<std::ptrdiff_t>(l * stride + k) - static_cast<std::ptrdiff_t>(padding);
          if (pos >= 0 && pos < static_cast<std::ptrdiff_t>(L)) dst[l] = src[pos];
        }
      }
    }
  }
  return col;
}

// Adjoint of im2col: scatters col back into out [B, C, L].
template <class T>
void col2im(const Mat<T>& col, Tensor<T>& out, std::size_t K, std::size_t stride, std::size_t padding,
            std::size_t in_len) {
  const std::size_t B = out.dim(0), C = out.dim(1), L = out.dim(2);
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t k = 0; k < K; ++k) {
      const T* row = col.data() + (c * K + k) * B * in_len;
      for (std::size_t b = 0; b < B; ++b) {
        T* dst = out.ptr() + (b * C + c) * L;
        const T* src = row + b * in_len;
        for (std::size_t l = 0; l < in_len; ++l) {
          const auto pos = static_cast<std::ptrdiff_t>(l * stride + k) - static_cast<std::ptrdiff_t>(padding);
          if (pos >= 0 && pos < static_cast<std::ptrdiff_t>(L)) dst[pos] += src[l];
        }
      }
    }
  }
}

// [B, C, L] <-> [C, B*L]
template <class T>
Mat<T> channels_first(const Tensor<T>& x) {
  const std::size_t B = x.dim(0), C = x.dim(1), L = x.dim(2);
  Mat<T> m(static_cast<Eigen::Index>(C), static_cast<Eigen::Index>(B * L));
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t c = 0; c < C; ++c) {
      std::copy_n(x.ptr() + (b * C + c) * L, L, m.data() + c * B * L + b * L);
    }
  }
  return m;
}

template <class T>
Tensor<T> batch_first(const Mat<T>& m, std::size_t B, std::size_t L) {
  const auto C = static_cast<std::size_t>(m.rows());
  Tensor<T> x({B, C, L});
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t c = 0; c < C; ++c) {
      std::copy_n(m.data() + c * B * L + b * L, L, x.ptr() + (b * C + c) * L);
    }
  }
  return x;
}

}  // namespace

// ---- Dense ----

template <class T>
Dense<T>::Dense(std::size_t in, std::size_t out) : weight({out, in}), bias({out}) {}

template <class T>
void Dense<T>::init(std::mt19937_64& rng, double gain) {
  fill_uniform(weight, rng, gain * std::sqrt(3.0 / static_cast<double>(in_features())));
  bias.zero();
}

template <class T>
Dense<T> Dense<T>::zeros_like() const {
  return Dense(in_features(), out_features());
}

template <class T>
Tensor<T> Dense<T>::forward(const Tensor<T>& x) const {
  require_rank("dense", x.shape, 2);
  if (x.dim(1) != in_features()) {
    throw std::invalid_argument("dense: input shape " + x.shape_str() + " does not match weight " +
                                weight.shape_str());
  }
  const auto B = static_cast<Eigen::Index>(x.dim(0));
  const auto in = static_cast<Eigen::Index>(in_features()), out = static_cast<Eigen::Index>(out_features());
  Tensor<T> y({x.dim(0), out_features()});
  MatMap<T> Y(y.ptr(), B, out);
  Y.noalias() = ConstMatMap<T>(x.ptr(), B, in) * ConstMatMap<T>(weight.ptr(), out, in).transpose();
  Y.rowwise() += ConstVecMap<T>(bias.ptr(), out).transpose();
  return y;
}

template <class T>
Tensor<T> Dense<T>::backward(const Tensor<T>& x, const Tensor<T>& dy, Dense& grad, bool need_dx) const {
  const std::vector<std::size_t> expected{x.dim(0), out_features()};
  require_same_shape("dense backward", dy.shape, expected);
  const auto B = static_cast<Eigen::Index>(x.dim(0));
  const auto in = static_cast<Eigen::Index>(in_features()), out = static_cast<Eigen::Index>(out_features());
  ConstMatMap<T> X(x.ptr(), B, in), dY(dy.ptr(), B, out);
  MatMap<T>(grad.weight.ptr(), out, in).noalias() += dY.transpose() * X;
  VecMap<T>(grad.bias.ptr(), out) += dY.colwise().sum().transpose();
  if (!need_dx) return {};
  Tensor<T> dx(x.shape);
  MatMap<T>(dx.ptr(), B, in).noalias() = dY * ConstMatMap<T>(weight.ptr(), out, in);
  return dx;
}

// ---- Conv1d ----

template <class T>
Conv1d<T>::Conv1d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel, std::size_t stride_,
                  std::size_t padding_)
    : weight({out_channels, in_channels, kernel}), bias({out_channels}), stride(stride_), padding(padding_) {
  if (kernel == 0 || stride == 0) throw std::invalid_argument("conv1d: kernel and stride must be positive");
}

template <class T>
void Conv1d<T>::init(std::mt19937_64& rng, double gain) {
  fill_uniform(weight, rng, gain * std::sqrt(3.0 / static_cast<double>(weight.dim(1) * weight.dim(2))));
  bias.zero();
}

template <class T>
Conv1d<T> Conv1d<T>::zeros_like() const {
  return Conv1d(weight.dim(1), weight.dim(0), weight.dim(2), stride, padding);
}

template <class T>
std::size_t Conv1d<T>::output_length(std::size_t length) const {
  const std::size_t K = weight.dim(2);
  if (length + 2 * padding < K) throw std::invalid_argument("conv1d: input length shorter than kernel");
  return (length + 2 * padding - K) / stride + 1;
}

template <class T>
Tensor<T> Conv1d<T>::forward(const Tensor<T>& x) const {
  require_rank("conv1d", x.shape, 3);
  if (x.dim(1) != weight.dim(1)) {
    throw std::invalid_argument("conv1d: input shape " + x.shape_str() + " does not match weight " +
                                weight.shape_str());
  }
  const std::size_t B = x.dim(0), Cout = weight.dim(0), K = weight.dim(2);
  const std::size_t Lout = output_length(x.dim(2));
  const Mat<T> col = im2col(x, K, stride, padding, Lout);
  Mat<T> out = ConstMatMap<T>(weight.ptr(), static_cast<Eigen::Index>(Cout), col.rows()) * col;
  out.colwise() += ConstVecMap<T>(bias.ptr(), static_cast<Eigen::Index>(Cout));
  return batch_first(out, B, Lout);
}

template <class T>
Tensor<T> Conv1d<T>::backward(const Tensor<T>& x, const Tensor<T>& dy, Conv1d& grad, bool need_dx) const {
  const std::size_t B = x.dim(0), Cout = weight.dim(0), K = weight.dim(2);
  const std::size_t Lout = output_length(x.dim(2));
  const std::vector<std::size_t> expected{B, Cout, Lout};
  require_same_shape("conv1d backward", dy.shape, expected);
  const Mat<T> col = im2col(x, K, stride, padding, Lout);
  const Mat<T> dout = channels_first(dy);
  MatMap<T>(grad.weight.ptr(), static_cast<Eigen::Index>(Cout), col.rows()).noalias() += dout * col.transpose();
  VecMap<T>(grad.bias.ptr(), static_cast<Eigen::Index>(Cout)) += dout.rowwise().sum();
  if (!need_dx) return {};
  const Mat<T> dcol =
      ConstMatMap<T>(weight.ptr(), static_cast<Eigen::Index>(Cout), col.rows()).transpose() * dout;
  Tensor<T> dx(x.shape);
  col2im(dcol, dx, K, stride, padding, Lout);
  return dx;
}

// ---- ConvTranspose1d ----

template <class T>
ConvTranspose1d<T>::ConvTranspose1d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel,
                                    std::size_t stride_, std::size_t padding_, std::size_t output_padding_)
    : weight({in_channels, out_channels, kernel}),
      bias({out_channels}),
      stride(stride_),
      padding(padding_),
      output_padding(output_padding_) {
  if (kernel == 0 || stride == 0) throw std::invalid_argument("conv_transpose1d: kernel and stride must be positive");
  if (output_padding >= stride) throw std::invalid_argument("conv_transpose1d: output_padding must be < stride");
}

template <class T>
void ConvTranspose1d<T>::init(std::mt19937_64& rng, double gain) {
  const double fan_in = static_cast<double>(weight.dim(0) * weight.dim(2)) / static_cast<double>(stride);
  fill_uniform(weight, rng, gain * std::sqrt(3.0 / fan_in));
  bias.zero();
}

template <class T>
ConvTranspose1d<T> ConvTranspose1d<T>::zeros_like() const {
  return ConvTranspose1d(weight.dim(0), weight.dim(1), weight.dim(2), stride, padding, output_padding);
}

template <class T>
std::size_t ConvTranspose1d<T>::output_length(std::size_t length) const {
  if (length == 0) throw std::invalid_argument("conv_transpose1d: empty input");
  const std::size_t full = (length - 1) * stride + weight.dim(2) + output_padding;
  if (full <= 2 * padding) throw std::invalid_argument("conv_transpose1d: padding consumes the whole output");
  return full - 2 * padding;
}

template <class T>
Tensor<T> ConvTranspose1d<T>::forward(const Tensor<T>& x) const {
  require_rank("conv_transpose1d", x.shape, 3);
  if (x.dim(1) != weight.dim(0)) {
    throw std::invalid_argument("conv_transpose1d: input shape " + x.shape_str() + " does not match weight " +
                                weight.shape_str());
  }
  const std::size_t B = x.dim(0), L = x.dim(2), Cin = weight.dim(0), Cout = weight.dim(1), K = weight.dim(2);
  const std::size_t Lout = output_length(L);
  const Mat<T> xm = channels_first(x);
  const Mat<T> col =
      ConstMatMap<T>(weight.ptr(), static_cast<Eigen::Index>(Cin), static_cast<Eigen::Index>(Cout * K)).transpose() *
      xm;
  Tensor<T> y({B, Cout, Lout});
  col2im(col, y, K, stride, padding, L);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t c = 0; c < Cout; ++c) {
      T* row = y.ptr() + (b * Cout + c) * Lout;
      for (std::size_t l = 0; l < Lout; ++l) row[l] += bias[c];
    }
  }
  return y;
}

template <class T>
Tensor<T> ConvTranspose1d<T>::backward(const Tensor<T>& x, const Tensor<T>& dy, ConvTranspose1d& grad,
                                       bool need_dx) const {
  const std::size_t B = x.dim(0), L = x.dim(2), Cin = weight.dim(0), Cout = weight.dim(1), K = weight.dim(2);
  const std::size_t Lout = output_length(L);
  const std::vector<std::size_t> expected{B, Cout, Lout};
  require_same_shape("conv_transpose1d backward", dy.shape, expected);
  const Mat<T> dcol = im2col(dy, K, stride, padding, L);  // [Cout*K, B*L]
  const Mat<T> xm = channels_first(x);                    // [Cin, B*L]
  const auto rows = static_cast<Eigen::Index>(Cin), cols = static_cast<Eigen::Index>(Cout * K);
  MatMap<T>(grad.weight.ptr(), rows, cols).noalias() += xm * dcol.transpose();
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t c = 0; c < Cout; ++c) {
      const T* row = dy.ptr() + (b * Cout + c) * Lout;
      T s = 0;
      for (std::size_t l = 0; l < Lout; ++l) s += row[l];
      grad.bias[c] += s;
    }
  }
  if (!need_dx) return {};
  const Mat<T> dxm = ConstMatMap<T>(weight.ptr(), rows, cols) * dcol;
  return batch_first(dxm, B, L);
}

// ---- activations ----

template <class T>
Tensor<T> relu(Tensor<T> x) {
  for (auto& v : x.data) v = v > T(0) ? v : T(0);
  return x;
}

template <class T>
Tensor<T> relu_backward(const Tensor<T>& y, Tensor<T> dy) {
  require_same_shape("relu backward", dy.shape, y.shape);
  for (std::size_t i = 0; i < dy.size(); ++i) {
    if (!(y[i] > T(0))) dy[i] = T(0);
  }
  return dy;
}

template <class T>
Tensor<T> sigmoid(Tensor<T> x) {
  for (auto& v : x.data) v = v >= T(0) ? T(1) / (T(1) + std::exp(-v)) : std::exp(v) / (T(1) + std::exp(v));
  return x;
}

template <class T>
Tensor<T> sigmoid_backward(const Tensor<T>& y, Tensor<T> dy) {
  require_same_shape("sigmoid backward", dy.shape, y.shape);
  for (std::size_t i = 0; i < dy.size(); ++i) dy[i] *= y[i] * (T(1) - y[i]);
  return dy;
}

#define PTINV_INSTANTIATE(T)                                               \
  template class Dense<T>;                                                 \
  template class Conv1d<T>;                                                \
  template class ConvTranspose1d<T>;                                       \
  template Tensor<T> relu<T>(Tensor<T>);                                   \
  template Tensor<T> relu_backward<T>(const Tensor<T>&, Tensor<T>);        \
  template Tensor<T> sigmoid<T>(Tensor<T>);                                \
  template Tensor<T> sigmoid_backward<T>(const Tensor<T>&, Tensor<T>);

PTINV_INSTANTIATE(float)
PTINV_INSTANTIATE(double)

#undef PTINV_INSTANTIATE

}  // namespace ptinv::nn
