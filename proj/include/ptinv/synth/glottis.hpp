#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include "ptinv/synth/audio.hpp"

namespace ptinv {

/// Liljencrants-Fant shape constants for one glottal period, derived from the
/// tenseness control through the Rd parameterisation.
struct LfShape {
  double te = 0.0;  // instant of main excitation, fraction of the period
  double tp = 0.0;  // peak flow instant
  double alpha = 0.0;
  double omega = 0.0;
  double e0 = 0.0;
  double epsilon = 0.0;
  double shift = 0.0;
  double delta = 0.0;

  static LfShape from_tenseness(double tenseness);
  /// Flow-derivative value at phase t in [0,1); its minimum is -1 at t = te.
  [[nodiscard]] double at(double t) const;
};

/// Glottal excitation: periodic LF pulse train plus band-passed aspiration
/// noise. Tenseness trades pulse energy (and spectral tilt) against noise.
class Glottis {
 public:
  Glottis(double sample_rate, std::uint64_t seed);

  /// New targets take effect at the next period boundary (immediately before
  /// the first sample).
  void set_targets(double frequency, double tenseness);
  double step();

 private:
  void start_period();
  double next_noise();

  double sample_rate_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> gauss_{0.0, 1.0};

  double target_frequency_ = 140.0;
  double target_tenseness_ = 0.6;
  double frequency_ = 140.0;
  double tenseness_ = 0.6;
  double period_ = 1.0 / 140.0;
  double time_in_period_ = 0.0;
  bool started_ = false;
  LfShape shape_;

  // Aspiration band-pass biquad state (direct form I).
  double b0_ = 0, b2_ = 0, a1_ = 0, a2_ = 0;
  double x1_ = 0, x2_ = 0, y1_ = 0, y2_ = 0;
};

/// Renders `n_samples` of the isolated source, clamped to [-1, 1].
/// Throws std::invalid_argument for non-positive frequency or length, or
/// tenseness outside [0, 1].
AudioClip glottal_source(double frequency, double tenseness, std::size_t n_samples,
                         std::uint64_t rng_seed, double sample_rate = kSynthSampleRate);

}  // namespace ptinv
