#include "ptinv/eval/round_trip.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>

#include "ptinv/synth/synthesizer.hpp"
#include "ptinv/util/binary_io.hpp"
#include "ptinv/util/seed.hpp"

namespace ptinv {

double log_spectral_distance(std::span<const std::vector<double>> a, std::span<const std::vector<double>> b) {
  if (a.size() != b.size()) throw std::invalid_argument("log-spectral distance: frame counts differ");
  if (a.empty()) throw std::invalid_argument("log-spectral distance: no frames");
  double total = 0;
  for (std::size_t f = 0; f < a.size(); ++f) {
    if (a[f].size() != b[f].size() || a[f].empty()) {
      throw std::invalid_argument("log-spectral distance: frame widths differ");
    }
    double s = 0;
    for (std::size_t m = 0; m < a[f].size(); ++m) {
      const double d = 10.0 * (a[f][m] - b[f][m]);
      s += d * d;
    }
    total += std::sqrt(s / static_cast<double>(a[f].size()));
  }
  return total / static_cast<double>(a.size());
}

double log_spectral_distance(const AudioClip& a, const AudioClip& b, const MelExtractor& mel) {
  auto fa = mel.frames(a.samples);
  auto fb = mel.frames(b.samples);
  const std::size_t n = std::min(fa.size(), fb.size());
  fa.resize(n);
  fb.resize(n);
  return log_spectral_distance(fa, fb);
}

RoundTripResult round_trip(const AudioClip& audio, const InversionModel& model, std::uint64_t seed,
                           const SamplingConfig& sampling) {
  const MelExtractor mel(model.mel_config());
  const AudioClip input =
      audio.sample_rate == model.mel_config().sample_rate ? audio : resample(audio, model.mel_config().sample_rate);
  const double duration = input.duration();

  RoundTripResult r;
  const ParamTrack predicted = model.predict(input);
  const AudioClip resynth = synthesize(predicted, duration, derive_seed(seed, 1), SynthConfig{input.sample_rate});
  r.model_db = log_spectral_distance(input, resynth, mel);

  std::mt19937_64 rng(derive_seed(seed, 2));
  const ParamTrack random_track = ParamTrack::constant(sample_params(rng, sampling));
  const AudioClip baseline = synthesize(random_track, duration, derive_seed(seed, 3), SynthConfig{input.sample_rate});
  r.baseline_db = log_spectral_distance(input, baseline, mel);
  return r;
}

double round_trip_distance(const AudioClip& audio, const InversionModel& model, std::uint64_t seed) {
  return round_trip(audio, model, seed).model_db;
}

double RoundTripReport::win_rate() const {
  if (clips.empty()) return 0.0;
  std::size_t wins = 0;
  for (const auto& c : clips) wins += c.model_db < c.baseline_db ? 1 : 0;
  return static_cast<double>(wins) / static_cast<double>(clips.size());
}

nlohmann::json RoundTripReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& c : clips) rows.push_back({{"clip", c.clip}, {"model_db", c.model_db}, {"baseline_db", c.baseline_db}});
  return {{"clips", rows}, {"win_rate", win_rate()}};
}

void RoundTripReport::write_csv(const std::filesystem::path& path) const {
  std::ostringstream out;
  out << "clip,model_db,baseline_db\n";
  char line[512];
  for (const auto& c : clips) {
    std::snprintf(line, sizeof(line), "%s,%.9g,%.9g\n", c.clip.c_str(), c.model_db, c.baseline_db);
    out << line;
  }
  const std::string text = out.str();
  io::write_atomically(path, [&](std::ostream& o) { o << text; });
}

}  // namespace ptinv
