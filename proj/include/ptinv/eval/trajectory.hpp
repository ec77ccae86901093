#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ptinv/model/inverter.hpp"

namespace ptinv {

struct Trajectory {
  std::array<Param, 3> dims{};
  std::vector<double> t;                     // window start, seconds
  std::vector<std::array<double, 3>> values;  // physical units

  /// Header "t,<dim1>,<dim2>,<dim3>", one row per window.
  void write_csv(const std::filesystem::path& path) const;
};

/// Throws std::invalid_argument for an unknown parameter name.
[[nodiscard]] Trajectory trajectory_export(const AudioClip& audio, const InversionModel& model,
                                           const std::array<std::string, 3>& dims);

}  // namespace ptinv
