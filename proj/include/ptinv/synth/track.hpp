#pragma once

#include <json.hpp>

#include <string>
#include <string_view>
#include <vector>

#include "ptinv/synth/params.hpp"

namespace ptinv {

enum class Interpolation { hold, linear };

[[nodiscard]] std::string_view to_string(Interpolation mode);
[[nodiscard]] Interpolation interpolation_from_string(std::string_view s);

struct Breakpoint {
  double time;  // seconds
  PTParams params;
};

/// Time-ordered articulatory trajectory. Times are strictly increasing and the
/// first breakpoint sits at t = 0. Past the last breakpoint the value is held.
class ParamTrack {
 public:
  ParamTrack(std::vector<Breakpoint> points, Interpolation mode);

  static ParamTrack constant(const PTParams& p) { return ParamTrack({{0.0, p}}, Interpolation::hold); }

  [[nodiscard]] PTParams at(double t) const;
  [[nodiscard]] const std::vector<Breakpoint>& breakpoints() const { return points_; }
  [[nodiscard]] Interpolation interpolation() const { return mode_; }
  [[nodiscard]] std::size_t size() const { return points_.size(); }

  [[nodiscard]] nlohmann::json to_json() const;
  /// Rejects malformed documents and out-of-range parameters.
  static ParamTrack from_json(const nlohmann::json& doc);

  /// Canonical text form (2-space indent, trailing newline).
  [[nodiscard]] std::string dump() const;
  void save(const std::string& path) const;
  static ParamTrack load(const std::string& path);

 private:
  std::vector<Breakpoint> points_;
  Interpolation mode_;
};

}  // namespace ptinv
