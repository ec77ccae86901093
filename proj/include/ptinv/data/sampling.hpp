#pragma once

#include <random>
#include <string_view>

#include <json.hpp>

#include "ptinv/synth/params.hpp"
#include "ptinv/synth/track.hpp"

namespace ptinv {

enum class DatasetKind { static_vowel, linear, step100ms };

[[nodiscard]] std::string_view to_string(DatasetKind kind);
[[nodiscard]] DatasetKind dataset_kind_from_string(std::string_view s);

/// Sampling distribution knobs. The tongue position follows a log-normal
/// truncated to its range; the constriction diameter's lower bound rises as
/// the tongue body narrows the tract.
struct SamplingConfig {
  double tongue_log_mu = 2.995732273553991;  // ln 20
  double tongue_log_sigma = 0.25;
  double constriction_floor = 0.3;
  double constriction_floor_slope = 0.6;

  [[nodiscard]] nlohmann::json to_json() const;
  static SamplingConfig from_json(const nlohmann::json& j);
};

/// 0.3 + 0.6 * (3.5 - tongue_diameter) / 1.45 with the default config.
[[nodiscard]] double constriction_lower_bound(double tongue_diameter, const SamplingConfig& cfg = {});

/// One independent parameter draw.
[[nodiscard]] PTParams sample_params(std::mt19937_64& rng, const SamplingConfig& cfg = {});

/// Draws the breakpoints for one file of the given kind: a single held point
/// (static), two endpoints joined linearly (linear), or a new held draw every
/// 100 ms (step100ms).
[[nodiscard]] ParamTrack sample_track(DatasetKind kind, std::mt19937_64& rng, double duration,
                                      const SamplingConfig& cfg = {});

}  // namespace ptinv
