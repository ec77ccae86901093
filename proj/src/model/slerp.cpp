#include "ptinv/model/slerp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ptinv {

std::vector<double> slerp_resize(std::span<const double> v, std::size_t target_dim) {
  const std::size_t S = v.size();
  if (S < 2 || target_dim < 2) throw std::invalid_argument("slerp_resize: source and target sizes must be >= 2");
  double norm = 0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  std::vector<double> out(target_dim, 0.0);
  if (norm == 0.0) return out;

  const double scale = static_cast<double>(S - 1) / static_cast<double>(target_dim - 1);
  double out_norm = 0;
  for (std::size_t j = 0; j < target_dim; ++j) {
    const double x = static_cast<double>(j) * scale;
    const auto i = std::min(static_cast<std::size_t>(x), S - 2);
    const double f = x - static_cast<double>(i);
    out[j] = ((1.0 - f) * v[i] + f * v[i + 1]) / norm;
    out_norm += out[j] * out[j];
  }
  out_norm = std::sqrt(out_norm);
  if (out_norm == 0.0) return out;
  for (auto& x : out) x *= norm / out_norm;
  return out;
}

std::vector<float> slerp_resize(std::span<const float> v, std::size_t target_dim) {
  const std::vector<double> wide(v.begin(), v.end());
  const auto r = slerp_resize(std::span<const double>(wide), target_dim);
  return {r.begin(), r.end()};
}

}  // namespace ptinv
