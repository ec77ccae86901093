#pragma once

#include <filesystem>
#include <memory>
#include <vector>

#include <json.hpp>

#include "ptinv/features/mel.hpp"
#include "ptinv/features/normalizer.hpp"
#include "ptinv/model/vae.hpp"
#include "ptinv/synth/audio.hpp"
#include "ptinv/synth/track.hpp"

namespace ptinv {

/// A trained network together with the feature settings it was trained on.
/// Immutable once built; predictions may run concurrently.
class InversionModel {
 public:
  InversionModel(VaeModel<float> vae, NormalizerStats stats, MelConfig mel);

  /// Header keys "normalizer" and "mel_config" are required besides "model".
  static InversionModel from_checkpoint(const nn::Checkpoint& ck);
  static InversionModel load(const std::filesystem::path& path);
  /// Adds normalizer and mel config to `header` and writes a checkpoint.
  void save(const std::filesystem::path& path, nlohmann::json header = nlohmann::json::object()) const;

  /// Normalized log-mel frames of every whole window, [n_windows, n_mels].
  /// Audio at other rates is resampled first; less than one window throws.
  [[nodiscard]] nn::Tensor<float> features(const AudioClip& audio) const;

  /// Per-window parameters in [0,1] from the posterior mean.
  [[nodiscard]] std::vector<NormalizedParams> predict_normalized(const AudioClip& audio) const;

  /// Same, on frames already normalized with stats(), [n_windows, n_mels].
  [[nodiscard]] std::vector<NormalizedParams> predict_frames(const nn::Tensor<float>& frames) const;

  /// One held breakpoint per window, at the window start, physical units.
  [[nodiscard]] ParamTrack predict(const AudioClip& audio) const;

  [[nodiscard]] const VaeModel<float>& vae() const { return vae_; }
  [[nodiscard]] const NormalizerStats& stats() const { return stats_; }
  [[nodiscard]] const MelConfig& mel_config() const { return extractor_->config(); }

 private:
  VaeModel<float> vae_;
  NormalizerStats stats_;
  std::shared_ptr<const MelExtractor> extractor_;
};

[[nodiscard]] ParamTrack predict_params(const AudioClip& audio, const InversionModel& model);

/// Builds a hold track with one breakpoint per window of `hop` seconds.
[[nodiscard]] ParamTrack track_from_windows(std::span<const NormalizedParams> windows, double hop);

}  // namespace ptinv
