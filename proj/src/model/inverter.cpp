#include "ptinv/model/inverter.hpp"

#include <stdexcept>

namespace ptinv {

InversionModel::InversionModel(VaeModel<float> vae, NormalizerStats stats, MelConfig mel)
    : vae_(std::move(vae)), stats_(std::move(stats)), extractor_(std::make_shared<const MelExtractor>(mel)) {
  if (stats_.dim() != mel.n_mels) throw std::invalid_argument("normalizer width does not match n_mels");
  if (vae_.config().input_dim != mel.n_mels) throw std::invalid_argument("model input width does not match n_mels");
}

InversionModel InversionModel::from_checkpoint(const nn::Checkpoint& ck) {
  if (!ck.header.contains("normalizer") || !ck.header.contains("mel_config")) {
    throw std::runtime_error("checkpoint lacks normalizer or mel config");
  }
  return {vae_from_checkpoint(ck), NormalizerStats::from_json(ck.header["normalizer"]),
          MelConfig::from_json(ck.header["mel_config"])};
}

InversionModel InversionModel::load(const std::filesystem::path& path) {
  try {
    return from_checkpoint(nn::Checkpoint::load(path));
  } catch (const std::exception& e) {
    const std::string what = e.what();
    if (what.find(path.string()) != std::string::npos) throw;
    throw std::runtime_error(path.string() + ": " + what);
  }
}

void InversionModel::save(const std::filesystem::path& path, nlohmann::json header) const {
  header["normalizer"] = stats_.to_json();
  header["mel_config"] = mel_config().to_json();
  VaeModel<float> copy = vae_;
  to_checkpoint(copy, std::move(header)).save(path);
}

nn::Tensor<float> InversionModel::features(const AudioClip& audio) const {
  const MelConfig& mel = mel_config();
  const AudioClip clip = audio.sample_rate == mel.sample_rate ? audio : resample(audio, mel.sample_rate);
  const std::size_t n = clip.samples.size() / mel.window_samples;
  if (n == 0) {
    throw std::invalid_argument("audio is shorter than one " + std::to_string(mel.window_samples) + "-sample window");
  }
  nn::Tensor<float> out({n, mel.n_mels});
  const std::span<const float> all(clip.samples);
  for (std::size_t w = 0; w < n; ++w) {
    const auto frame = stats_.apply(extractor_->mel_spectrum(all.subspan(w * mel.window_samples, mel.window_samples)));
    for (std::size_t m = 0; m < mel.n_mels; ++m) out[w * mel.n_mels + m] = static_cast<float>(frame[m]);
  }
  return out;
}

std::vector<NormalizedParams> InversionModel::predict_normalized(const AudioClip& audio) const {
  return predict_frames(features(audio));
}

std::vector<NormalizedParams> InversionModel::predict_frames(const nn::Tensor<float>& x) const {
  const auto [mu, logvar] = vae_.encode(x);
  const auto p = vae_.projector.forward(mu);
  std::vector<NormalizedParams> out(x.dim(0));
  for (std::size_t w = 0; w < out.size(); ++w) {
    for (std::size_t i = 0; i < kNumParams; ++i) out[w][i] = static_cast<double>(p[w * kNumParams + i]);
  }
  return out;
}

ParamTrack InversionModel::predict(const AudioClip& audio) const {
  const auto& mel = mel_config();
  return track_from_windows(predict_normalized(audio), static_cast<double>(mel.window_samples) / mel.sample_rate);
}

ParamTrack predict_params(const AudioClip& audio, const InversionModel& model) { return model.predict(audio); }

ParamTrack track_from_windows(std::span<const NormalizedParams> windows, double hop) {
  if (windows.empty()) throw std::invalid_argument("no windows to build a track from");
  std::vector<Breakpoint> points;
  points.reserve(windows.size());
  for (std::size_t w = 0; w < windows.size(); ++w) {
    points.push_back({static_cast<double>(w) * hop, PTParams::from_normalized(windows[w])});
  }
  return ParamTrack(std::move(points), Interpolation::hold);
}

}  // namespace ptinv
