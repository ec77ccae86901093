#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace ptinv {

/// Per-bin min-max statistics fitted on the training split.
struct NormalizerStats {
  std::vector<double> min;
  std::vector<double> max;

  [[nodiscard]] std::size_t dim() const { return min.size(); }

  /// Maps into [0,1], clipping values outside the fitted range. A degenerate
  /// bin (max == min) maps to 0.5.
  [[nodiscard]] std::vector<double> apply(std::span<const double> frame) const;
  /// Inverse of apply for values in [0,1]; degenerate bins return min.
  [[nodiscard]] std::vector<double> invert(std::span<const double> normalized) const;

  [[nodiscard]] nlohmann::json to_json() const;
  static NormalizerStats from_json(const nlohmann::json& j);
  void save(const std::string& path) const;
  static NormalizerStats load(const std::string& path);
};

/// Throws std::invalid_argument for an empty set or ragged frames.
[[nodiscard]] NormalizerStats fit_normalizer(std::span<const std::vector<double>> frames);

}  // namespace ptinv
