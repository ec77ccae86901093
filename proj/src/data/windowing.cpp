#include "ptinv/data/windowing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "ptinv/util/parallel.hpp"
#include "ptinv/util/seed.hpp"

namespace ptinv {

std::size_t window_count(std::size_t n_samples, const MelConfig& mel) { return n_samples / mel.window_samples; }

double window_center(std::size_t w, const MelConfig& mel) {
  const double n = static_cast<double>(mel.window_samples);
  return (static_cast<double>(w) * n + 0.5 * n) / mel.sample_rate;
}

namespace {

std::array<float, kNumParams> to_float(const NormalizedParams& u) {
  std::array<float, kNumParams> out{};
  for (std::size_t i = 0; i < kNumParams; ++i) out[i] = static_cast<float>(u[i]);
  return out;
}

}  // namespace

std::vector<WindowSample> window_file(const AudioClip& audio, const ParamTrack& track,
                                      const MelExtractor& extractor, std::uint32_t file_id) {
  const MelConfig& mel = extractor.config();
  if (audio.sample_rate != mel.sample_rate) {
    throw std::invalid_argument("sample rate " + std::to_string(audio.sample_rate) + " does not match " +
                                std::to_string(mel.sample_rate));
  }
  const std::size_t n = window_count(audio.samples.size(), mel);
  if (n > 0xFFFF) throw std::invalid_argument("too many windows in one file");
  std::vector<WindowSample> out(n);
  const std::span<const float> all(audio.samples);
  for (std::size_t w = 0; w < n; ++w) {
    auto& s = out[w];
    const auto spectrum = extractor.mel_spectrum(all.subspan(w * mel.window_samples, mel.window_samples));
    s.mel.assign(spectrum.begin(), spectrum.end());
    s.params_t = to_float(track.at(window_center(w, mel)).normalized());
    s.params_prev = w == 0 ? s.params_t : out[w - 1].params_t;
    s.file_id = file_id;
    s.window_index = static_cast<std::uint16_t>(w);
  }
  return out;
}

std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>> split_files(std::size_t n_files,
                                                                              double train_fraction,
                                                                              std::uint64_t seed) {
  if (!(train_fraction >= 0.0 && train_fraction <= 1.0)) {
    throw std::invalid_argument("train_fraction must lie in [0, 1]");
  }
  std::vector<std::uint32_t> ids(n_files);
  std::iota(ids.begin(), ids.end(), 0u);
  std::mt19937_64 rng(derive_seed(seed, 0));
  std::shuffle(ids.begin(), ids.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n_files)));
  std::vector<std::uint32_t> train(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::uint32_t> validation(ids.begin() + static_cast<std::ptrdiff_t>(n_train), ids.end());
  std::sort(train.begin(), train.end());
  std::sort(validation.begin(), validation.end());
  return {std::move(train), std::move(validation)};
}

void normalize_frames(std::span<WindowSample> samples, const NormalizerStats& stats) {
  std::vector<double> frame;
  for (auto& s : samples) {
    frame.assign(s.mel.begin(), s.mel.end());
    const auto normalized = stats.apply(frame);
    std::transform(normalized.begin(), normalized.end(), s.mel.begin(),
                   [](double v) { return static_cast<float>(v); });
  }
}

DatasetSplit window_dataset(const Manifest& manifest, const MelConfig& mel, const WindowingOptions& options) {
  mel.validate();
  const MelExtractor extractor(mel);
  const std::size_t n_files = manifest.files.size();
  if (n_files > 0xFFFFFFFFu) throw std::invalid_argument("manifest has too many files");

  std::vector<std::vector<WindowSample>> per_file(n_files);
  parallel_for(n_files, options.threads, [&](std::size_t i) {
    const auto& entry = manifest.files[i];
    try {
      const AudioClip audio = read_wav(manifest.resolve(entry.wav).string());
      const ParamTrack track = ParamTrack::load(manifest.resolve(entry.track_json).string());
      per_file[i] = window_file(audio, track, extractor, static_cast<std::uint32_t>(i));
    } catch (const std::exception& e) {
      throw std::runtime_error("windowing " + entry.wav + ": " + e.what());
    }
  });

  DatasetSplit split;
  split.mel_config = mel;
  std::tie(split.train_files, split.validation_files) =
      split_files(n_files, options.train_fraction, options.split_seed);
  for (auto id : split.train_files) {
    for (auto& s : per_file[id]) split.train.push_back(std::move(s));
  }
  for (auto id : split.validation_files) {
    for (auto& s : per_file[id]) split.validation.push_back(std::move(s));
  }
  if (split.train.empty()) throw std::runtime_error("windowing produced no training windows");

  std::vector<std::vector<double>> train_frames;
  train_frames.reserve(split.train.size());
  for (const auto& s : split.train) train_frames.emplace_back(s.mel.begin(), s.mel.end());
  split.stats = fit_normalizer(train_frames);
  normalize_frames(split.train, split.stats);
  normalize_frames(split.validation, split.stats);

  std::mt19937_64 train_rng(derive_seed(options.split_seed, 1));
  std::shuffle(split.train.begin(), split.train.end(), train_rng);
  std::mt19937_64 validation_rng(derive_seed(options.split_seed, 2));
  std::shuffle(split.validation.begin(), split.validation.end(), validation_rng);
  return split;
}

}  // namespace ptinv
