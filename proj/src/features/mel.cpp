#include "ptinv/features/mel.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ptinv {

namespace {

// The FFTW planner is not re-entrant; execution with new-array functions is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

void MelConfig::validate() const {
  if (n_mels == 0) throw std::invalid_argument("MelConfig: n_mels must be positive");
  if (window_samples == 0) throw std::invalid_argument("MelConfig: window_samples must be positive");
  if (fft_size < window_samples) throw std::invalid_argument("MelConfig: fft_size < window_samples");
  if (!(sample_rate > 0.0)) throw std::invalid_argument("MelConfig: sample_rate must be positive");
  if (!(f_min >= 0.0 && f_min < f_max)) throw std::invalid_argument("MelConfig: need 0 <= f_min < f_max");
  if (f_max > sample_rate / 2.0) throw std::invalid_argument("MelConfig: f_max above Nyquist");
  if (!(log_floor > 0.0)) throw std::invalid_argument("MelConfig: log_floor must be positive");
}

nlohmann::json MelConfig::to_json() const {
  return {{"n_mels", n_mels}, {"window_samples", window_samples}, {"fft_size", fft_size},
          {"sample_rate", sample_rate}, {"f_min", f_min}, {"f_max", f_max}, {"log_floor", log_floor}};
}

MelConfig MelConfig::from_json(const nlohmann::json& j) {
  MelConfig c;
  c.n_mels = j.value("n_mels", c.n_mels);
  c.window_samples = j.value("window_samples", c.window_samples);
  c.fft_size = j.value("fft_size", c.fft_size);
  c.sample_rate = j.value("sample_rate", c.sample_rate);
  c.f_min = j.value("f_min", c.f_min);
  c.f_max = j.value("f_max", c.f_max);
  c.log_floor = j.value("log_floor", c.log_floor);
  c.validate();
  return c;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

struct MelExtractor::Plan {
  fftw_plan plan = nullptr;
  ~Plan() {
    if (plan != nullptr) {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan);
    }
  }
};

MelExtractor::MelExtractor(MelConfig config) : config_(config), plan_(std::make_unique<Plan>()) {
  config_.validate();
  const std::size_t n = config_.window_samples;
  hann_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    hann_[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  }

  const std::size_t n_bins = config_.fft_size / 2 + 1;
  const double bin_hz = config_.sample_rate / static_cast<double>(config_.fft_size);
  const double mel_lo = hz_to_mel(config_.f_min);
  const double mel_hi = hz_to_mel(config_.f_max);
  std::vector<double> edges(config_.n_mels + 2);
  for (std::size_t m = 0; m < edges.size(); ++m) {
    edges[m] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(m) /
                                      static_cast<double>(config_.n_mels + 1));
  }

  filters_.resize(config_.n_mels);
  for (std::size_t m = 0; m < config_.n_mels; ++m) {
    auto& f = filters_[m];
    f.lower_hz = edges[m];
    f.center_hz = edges[m + 1];
    f.upper_hz = edges[m + 2];
    std::vector<double> dense(n_bins, 0.0);
    std::size_t first = n_bins, last = 0;
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double hz = static_cast<double>(k) * bin_hz;
      const double w = std::max(0.0, std::min((hz - f.lower_hz) / (f.center_hz - f.lower_hz),
                                              (f.upper_hz - hz) / (f.upper_hz - f.center_hz)));
      if (w > 0.0) {
        dense[k] = w;
        first = std::min(first, k);
        last = std::max(last, k);
      }
    }
    if (first == n_bins) {
      // Filter narrower than the bin spacing: route it to the nearest bin.
      const auto k = std::min(n_bins - 1, static_cast<std::size_t>(std::lround(f.center_hz / bin_hz)));
      dense[k] = 1.0;
      first = last = k;
    }
    f.first_bin = first;
    f.weights.assign(dense.begin() + static_cast<long>(first), dense.begin() + static_cast<long>(last) + 1);
  }

  std::vector<double> in(config_.fft_size);
  std::vector<std::complex<double>> out(n_bins);
  std::lock_guard lock(planner_mutex());
  plan_->plan = fftw_plan_dft_r2c_1d(static_cast<int>(config_.fft_size), in.data(),
                                     reinterpret_cast<fftw_complex*>(out.data()),
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (plan_->plan == nullptr) throw std::runtime_error("FFTW planning failed");
}

MelExtractor::~MelExtractor() = default;
MelExtractor::MelExtractor(MelExtractor&&) noexcept = default;
MelExtractor& MelExtractor::operator=(MelExtractor&&) noexcept = default;

std::vector<double> MelExtractor::power_from_windowed(std::vector<double>& buffer) const {
  const std::size_t n_bins = config_.fft_size / 2 + 1;
  std::vector<std::complex<double>> spec(n_bins);
  fftw_execute_dft_r2c(plan_->plan, buffer.data(), reinterpret_cast<fftw_complex*>(spec.data()));
  std::vector<double> power(n_bins);
  for (std::size_t k = 0; k < n_bins; ++k) power[k] = std::norm(spec[k]);

  std::vector<double> mel(config_.n_mels, 0.0);
  for (std::size_t m = 0; m < config_.n_mels; ++m) {
    const auto& f = filters_[m];
    double acc = 0.0;
    for (std::size_t j = 0; j < f.weights.size(); ++j) acc += f.weights[j] * power[f.first_bin + j];
    mel[m] = acc;
  }
  return mel;
}

std::vector<double> MelExtractor::mel_power(std::span<const double> window) const {
  if (window.size() != config_.window_samples) {
    throw std::invalid_argument("mel_spectrum: expected " + std::to_string(config_.window_samples) +
                                " samples, got " + std::to_string(window.size()));
  }
  std::vector<double> buffer(config_.fft_size, 0.0);
  for (std::size_t i = 0; i < window.size(); ++i) buffer[i] = window[i] * hann_[i];
  return power_from_windowed(buffer);
}

std::vector<double> MelExtractor::mel_power(std::span<const float> window) const {
  std::vector<double> tmp(window.begin(), window.end());
  return mel_power(std::span<const double>(tmp));
}

std::vector<double> MelExtractor::mel_spectrum(std::span<const double> window) const {
  auto mel = mel_power(window);
  for (auto& v : mel) v = std::log10(std::max(v, config_.log_floor));
  return mel;
}

std::vector<double> MelExtractor::mel_spectrum(std::span<const float> window) const {
  std::vector<double> tmp(window.begin(), window.end());
  return mel_spectrum(std::span<const double>(tmp));
}

std::vector<std::vector<double>> MelExtractor::frames(std::span<const float> signal) const {
  const std::size_t w = config_.window_samples;
  std::vector<std::vector<double>> out;
  out.reserve(signal.size() / w);
  for (std::size_t start = 0; start + w <= signal.size(); start += w) {
    out.push_back(mel_spectrum(signal.subspan(start, w)));
  }
  return out;
}

}  // namespace ptinv
