#include "ptinv/synth/glottis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ptinv {

namespace {

constexpr double kAspirationCenterHz = 500.0;
constexpr double kAspirationQ = 0.5;
constexpr double kAspirationGain = 0.2;

}  // namespace

LfShape LfShape::from_tenseness(double tenseness) {
  const double rd = std::clamp(3.0 * (1.0 - tenseness), 0.5, 2.7);
  const double ra = -0.01 + 0.048 * rd;
  const double rk = 0.224 + 0.118 * rd;
  const double rg = (rk / 4.0) * (0.5 + 1.2 * rk) / (0.11 * rd - ra * (0.5 + 1.2 * rk));

  LfShape s;
  const double ta = ra;
  s.tp = 1.0 / (2.0 * rg);
  s.te = s.tp + s.tp * rk;
  s.epsilon = 1.0 / ta;
  s.shift = std::exp(-s.epsilon * (1.0 - s.te));
  s.delta = 1.0 - s.shift;

  // Choose alpha so the open-phase area cancels the return-phase area (zero net flow).
  double rhs_integral = (1.0 / s.epsilon) * (s.shift - 1.0) + (1.0 - s.te) * s.shift;
  rhs_integral /= s.delta;
  const double lower_integral = -(s.te - s.tp) / 2.0 + rhs_integral;
  const double upper_integral = -lower_integral;

  s.omega = std::numbers::pi / s.tp;
  const double sn = std::sin(s.omega * s.te);
  const double y = -std::numbers::pi * sn * upper_integral / (s.tp * 2.0);
  const double z = std::log(y);
  s.alpha = z / (s.tp / 2.0 - s.te);
  s.e0 = -1.0 / (sn * std::exp(s.alpha * s.te));
  return s;
}

double LfShape::at(double t) const {
  if (t > te) return (-std::exp(-epsilon * (t - te)) + shift) / delta;
  return e0 * std::exp(alpha * t) * std::sin(omega * t);
}

Glottis::Glottis(double sample_rate, std::uint64_t seed) : sample_rate_(sample_rate), rng_(seed) {
  const double w0 = 2.0 * std::numbers::pi * kAspirationCenterHz / sample_rate_;
  const double alpha = std::sin(w0) / (2.0 * kAspirationQ);
  const double a0 = 1.0 + alpha;
  b0_ = alpha / a0;
  b2_ = -alpha / a0;
  a1_ = -2.0 * std::cos(w0) / a0;
  a2_ = (1.0 - alpha) / a0;
  start_period();
}

void Glottis::set_targets(double frequency, double tenseness) {
  target_frequency_ = frequency;
  target_tenseness_ = tenseness;
  if (!started_) start_period();
}

void Glottis::start_period() {
  frequency_ = target_frequency_;
  tenseness_ = target_tenseness_;
  period_ = 1.0 / frequency_;
  shape_ = LfShape::from_tenseness(tenseness_);
}

double Glottis::next_noise() {
  const double x = gauss_(rng_);
  const double y = b0_ * x + b2_ * x2_ - a1_ * y1_ - a2_ * y2_;
  x2_ = x1_;
  x1_ = x;
  y2_ = y1_;
  y1_ = y;
  return y;
}

double Glottis::step() {
  started_ = true;
  const double phase = time_in_period_ / period_;
  const double loudness = std::pow(tenseness_, 0.25);
  const double pulse = shape_.at(phase) * loudness;

  const double voiced = 0.1 + 0.2 * std::max(0.0, std::sin(2.0 * std::numbers::pi * phase));
  const double modulator = tenseness_ * voiced + (1.0 - tenseness_) * 0.3;
  const double aspiration =
      (1.0 - std::sqrt(tenseness_)) * modulator * kAspirationGain * next_noise();

  time_in_period_ += 1.0 / sample_rate_;
  if (time_in_period_ >= period_) {
    time_in_period_ -= period_;
    start_period();
    // Keep phase continuity when the period shortens past the current time.
    time_in_period_ = std::fmod(time_in_period_, period_);
  }
  return pulse + aspiration;
}

AudioClip glottal_source(double frequency, double tenseness, std::size_t n_samples,
                         std::uint64_t rng_seed, double sample_rate) {
  if (!(frequency > 0.0) || !std::isfinite(frequency)) {
    throw std::invalid_argument("glottal_source: frequency must be positive");
  }
  if (n_samples == 0) throw std::invalid_argument("glottal_source: n_samples must be positive");
  if (!(tenseness >= 0.0 && tenseness <= 1.0)) {
    throw std::invalid_argument("glottal_source: tenseness outside [0, 1]");
  }
  if (!(sample_rate > 0.0)) throw std::invalid_argument("glottal_source: sample rate must be positive");

  Glottis g(sample_rate, rng_seed);
  g.set_targets(frequency, tenseness);
  AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.samples.resize(n_samples);
  for (auto& s : clip.samples) s = static_cast<float>(std::clamp(g.step(), -1.0, 1.0));
  return clip;
}

}  // namespace ptinv
