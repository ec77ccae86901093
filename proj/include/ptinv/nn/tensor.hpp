#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <new>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ptinv::nn {

[[nodiscard]] std::string shape_string(std::span<const std::size_t> shape);

/// Cache-line aligned storage. Eigen peels unaligned heads at run time, so
/// reductions over buffers at arbitrary addresses can round differently from
/// one allocation to the next; a fixed base alignment keeps results bitwise
/// reproducible.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlign{64};

  AlignedAllocator() = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}  // NOLINT(google-explicit-constructor)

  T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), kAlign)); }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, kAlign); }

  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept {
    return true;
  }
};

template <class T>
using AlignedVector = std::vector<T, AlignedAllocator<T>>;

/// Dense row-major array. Activations use [batch, channels, length] or
/// [batch, features].
template <class T>
struct Tensor {
  std::vector<std::size_t> shape;
  AlignedVector<T> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> s, T fill = T(0)) : shape(std::move(s)), data(count(shape), fill) {}
  Tensor(std::vector<std::size_t> s, std::span<const T> values)
      : shape(std::move(s)), data(values.begin(), values.end()) {
    if (data.size() != count(shape)) {
      throw std::invalid_argument("tensor: " + std::to_string(data.size()) + " values for shape " +
                                  shape_string(shape));
    }
  }

  Tensor(std::vector<std::size_t> s, std::initializer_list<T> values)
      : Tensor(std::move(s), std::span<const T>(values.begin(), values.size())) {}

  static std::size_t count(const std::vector<std::size_t>& s) {
    return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
  }

  [[nodiscard]] std::size_t size() const { return data.size(); }
  [[nodiscard]] std::size_t rank() const { return shape.size(); }
  [[nodiscard]] std::size_t dim(std::size_t i) const { return shape.at(i); }
  [[nodiscard]] std::string shape_str() const { return shape_string(shape); }
  T* ptr() { return data.data(); }
  [[nodiscard]] const T* ptr() const { return data.data(); }
  T& operator[](std::size_t i) { return data[i]; }
  const T& operator[](std::size_t i) const { return data[i]; }

  void zero() { std::fill(data.begin(), data.end(), T(0)); }

  /// Same storage, new shape of equal element count.
  [[nodiscard]] Tensor reshaped(std::vector<std::size_t> s) const& {
    Tensor out = *this;
    return std::move(out).reshaped(std::move(s));
  }
  [[nodiscard]] Tensor reshaped(std::vector<std::size_t> s) && {
    if (count(s) != data.size()) {
      throw std::invalid_argument("reshape " + shape_str() + " -> " + shape_string(s));
    }
    shape = std::move(s);
    return std::move(*this);
  }

  template <class U>
  [[nodiscard]] Tensor<U> cast() const {
    Tensor<U> out;
    out.shape = shape;
    out.data.assign(data.begin(), data.end());
    return out;
  }

  bool operator==(const Tensor&) const = default;
};

/// Throws std::invalid_argument naming both shapes when they differ.
void require_same_shape(std::string_view what, std::span<const std::size_t> a, std::span<const std::size_t> b);

}  // namespace ptinv::nn
