#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace ptinv {

inline constexpr double kSynthSampleRate = 48000.0;

/// Mono sample buffer with its sample rate.
struct AudioClip {
  std::vector<float> samples;
  double sample_rate = kSynthSampleRate;

  [[nodiscard]] double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
};

/// Writes RIFF/WAVE, mono, IEEE float32.
void write_wav(const std::string& path, const AudioClip& clip);

/// Reads PCM 8/16/24/32-bit or IEEE float 32/64-bit WAVE files. Multichannel
/// input is averaged down to mono.
AudioClip read_wav(const std::string& path);

/// Band-limited (windowed-sinc) sample-rate conversion.
AudioClip resample(const AudioClip& clip, double target_rate);

}  // namespace ptinv
