#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptinv/data/sampling.hpp"
#include "ptinv/features/mel.hpp"
#include "ptinv/model/inverter.hpp"
#include "ptinv/synth/audio.hpp"

namespace ptinv {

/// Mean over frames of the RMS (over mel bins) of 10*(a - b), where a and b
/// are log10 mel powers. Frame counts must match. Result in dB.
[[nodiscard]] double log_spectral_distance(std::span<const std::vector<double>> a,
                                           std::span<const std::vector<double>> b);
/// Same, on the log-mel frames of two clips; the longer clip is truncated.
[[nodiscard]] double log_spectral_distance(const AudioClip& a, const AudioClip& b, const MelExtractor& mel);

struct RoundTripResult {
  std::string clip;
  double model_db = 0;     // input vs re-synthesis from predicted parameters
  double baseline_db = 0;  // input vs synthesis from one random parameter draw
};

/// Predicts parameters, re-synthesizes (seeded) and measures the distance to
/// the input. The baseline uses a static random draw from `seed`.
[[nodiscard]] RoundTripResult round_trip(const AudioClip& audio, const InversionModel& model, std::uint64_t seed,
                                         const SamplingConfig& sampling = {});

[[nodiscard]] double round_trip_distance(const AudioClip& audio, const InversionModel& model, std::uint64_t seed);

struct RoundTripReport {
  std::vector<RoundTripResult> clips;
  /// Fraction of clips where the model beats the baseline.
  [[nodiscard]] double win_rate() const;
  [[nodiscard]] nlohmann::json to_json() const;
  void write_csv(const std::filesystem::path& path) const;
};

}  // namespace ptinv
