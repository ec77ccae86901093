#pragma once

#include <span>
#include <vector>

namespace ptinv {

/// Resizes a vector to target_dim on the sphere of its own norm: the unit
/// direction is resampled by linear interpolation at fractional index
/// j*(S-1)/(T-1) and rescaled to the input norm. A zero vector maps to zeros.
/// Both sizes must be at least 2.
[[nodiscard]] std::vector<double> slerp_resize(std::span<const double> v, std::size_t target_dim);
[[nodiscard]] std::vector<float> slerp_resize(std::span<const float> v, std::size_t target_dim);

}  // namespace ptinv
