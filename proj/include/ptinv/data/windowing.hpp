#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "ptinv/data/generate.hpp"
#include "ptinv/features/mel.hpp"
#include "ptinv/features/normalizer.hpp"
#include "ptinv/synth/audio.hpp"
#include "ptinv/synth/track.hpp"

namespace ptinv {

/// One training unit: a mel frame with the labels of its window and the one
/// before it. Parameter labels are normalized to [0,1].
struct WindowSample {
  std::vector<float> mel;
  std::array<float, kNumParams> params_t{};
  std::array<float, kNumParams> params_prev{};
  std::uint32_t file_id = 0;
  std::uint16_t window_index = 0;
};

struct DatasetSplit {
  std::vector<WindowSample> train;
  std::vector<WindowSample> validation;
  NormalizerStats stats;
  MelConfig mel_config;
  std::vector<std::uint32_t> train_files;
  std::vector<std::uint32_t> validation_files;
};

struct WindowingOptions {
  std::uint64_t split_seed = 0;
  double train_fraction = 0.8;
  std::size_t threads = 1;
};

/// Number of whole non-overlapping windows in n_samples.
[[nodiscard]] std::size_t window_count(std::size_t n_samples, const MelConfig& mel);

/// Time of the centre of window w, in seconds.
[[nodiscard]] double window_center(std::size_t w, const MelConfig& mel);

/// Log-mel frames (not yet normalized) and labels for one file.
[[nodiscard]] std::vector<WindowSample> window_file(const AudioClip& audio, const ParamTrack& track,
                                                    const MelExtractor& extractor, std::uint32_t file_id);

/// Partitions file ids 0..n_files-1 into (train, validation), both sorted.
/// round(train_fraction * n_files) files go to train.
[[nodiscard]] std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>> split_files(
    std::size_t n_files, double train_fraction, std::uint64_t seed);

/// Loads every file of the manifest, windows it, splits by file, fits the
/// normalizer on train frames and applies it to both sides, then shuffles.
[[nodiscard]] DatasetSplit window_dataset(const Manifest& manifest, const MelConfig& mel = {},
                                          const WindowingOptions& options = {});

/// Applies `stats` to every frame in place (frames hold raw log-mel values).
void normalize_frames(std::span<WindowSample> samples, const NormalizerStats& stats);

}  // namespace ptinv
