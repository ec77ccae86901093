#pragma once

#include <cstddef>
#include <cstdint>

#include "ptinv/synth/audio.hpp"
#include "ptinv/synth/track.hpp"
#include "ptinv/synth/tract.hpp"

namespace ptinv {

struct SynthConfig {
  double sample_rate = kSynthSampleRate;
  std::size_t control_block = 128;   // samples between tract-shape updates
  std::size_t n_sections = kDefaultSections;
  std::size_t steps_per_sample = 2;  // the reflection line runs oversampled
  double output_gain = 0.125;
};

/// Renders a parameter track. Output length is round(duration * sample_rate),
/// samples are clamped to [-1, 1], and the result depends only on
/// (track, duration, config, seed).
[[nodiscard]] AudioClip synthesize(const ParamTrack& track, double duration, std::uint64_t rng_seed,
                                   const SynthConfig& config = {});

/// Convenience overload matching the common 48 kHz use.
[[nodiscard]] AudioClip synthesize(const ParamTrack& track, double duration, double sample_rate,
                                   std::uint64_t rng_seed);

}  // namespace ptinv
