#include "ptinv/nn/tensor.hpp"

#include <algorithm>

namespace ptinv::nn {

std::string shape_string(std::span<const std::size_t> shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

void require_same_shape(std::string_view what, std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (!std::equal(a.begin(), a.end(), b.begin(), b.end())) {
    throw std::invalid_argument(std::string(what) + ": shape " + shape_string(a) + " does not match " +
                                shape_string(b));
  }
}

}  // namespace ptinv::nn
