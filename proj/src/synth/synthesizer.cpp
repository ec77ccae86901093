#include "ptinv/synth/synthesizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ptinv/synth/glottis.hpp"

namespace ptinv {

AudioClip synthesize(const ParamTrack& track, double duration, std::uint64_t rng_seed,
                     const SynthConfig& config) {
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw std::invalid_argument("synthesize: duration must be positive");
  }
  if (!(config.sample_rate > 0.0) || config.control_block == 0 || config.steps_per_sample == 0) {
    throw std::invalid_argument("synthesize: invalid synth configuration");
  }
  const auto n_samples = static_cast<std::size_t>(std::llround(duration * config.sample_rate));
  const auto block = config.control_block;
  const auto steps = config.steps_per_sample;
  const auto rest = default_rest_diameters(config.n_sections);

  Glottis glottis(config.sample_rate, rng_seed);
  Tract tract(tract_shape(track.at(0.0), rest));

  AudioClip out;
  out.sample_rate = config.sample_rate;
  out.samples.resize(n_samples);
  for (std::size_t start = 0; start < n_samples; start += block) {
    const double t0 = static_cast<double>(start) / config.sample_rate;
    const double t1 = static_cast<double>(start + block) / config.sample_rate;
    const PTParams now = track.at(t0);
    glottis.set_targets(now.frequency(), now.tenseness());
    tract.set_target(tract_shape(track.at(t1), rest));

    const std::size_t end = std::min(n_samples, start + block);
    for (std::size_t s = start; s < end; ++s) {
      const double source = glottis.step();
      double acc = 0.0;
      for (std::size_t k = 0; k < steps; ++k) {
        const double frac = (static_cast<double>(s - start) + static_cast<double>(k) / static_cast<double>(steps)) /
                            static_cast<double>(block);
        acc += tract.step(source, frac);
      }
      const double y = acc * config.output_gain;
      out.samples[s] = static_cast<float>(std::clamp(y, -1.0, 1.0));
    }
  }
  return out;
}

AudioClip synthesize(const ParamTrack& track, double duration, double sample_rate, std::uint64_t rng_seed) {
  SynthConfig cfg;
  cfg.sample_rate = sample_rate;
  return synthesize(track, duration, rng_seed, cfg);
}

}  // namespace ptinv
