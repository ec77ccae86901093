#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <json.hpp>

namespace ptinv {

struct MelConfig {
  std::size_t n_mels = 128;
  std::size_t window_samples = 720;  // 15 ms at 48 kHz
  std::size_t fft_size = 1024;
  double sample_rate = 48000.0;
  double f_min = 0.0;
  double f_max = 24000.0;
  double log_floor = 1e-10;

  /// Throws std::invalid_argument when fft_size < window_samples or f_max
  /// exceeds Nyquist, among other inconsistencies.
  void validate() const;
  [[nodiscard]] nlohmann::json to_json() const;
  static MelConfig from_json(const nlohmann::json& j);
};

[[nodiscard]] double hz_to_mel(double hz);  // HTK: 2595 log10(1 + f/700)
[[nodiscard]] double mel_to_hz(double mel);

/// One triangular filter stored sparsely over FFT bins [first_bin, first_bin + weights.size()).
struct MelFilter {
  std::size_t first_bin = 0;
  std::vector<double> weights;
  double lower_hz = 0, center_hz = 0, upper_hz = 0;
};

/// Hann window -> zero-padded real FFT -> power -> triangular HTK mel
/// filterbank -> log10 with floor. Immutable after construction and safe to
/// share between threads.
class MelExtractor {
 public:
  explicit MelExtractor(MelConfig config = {});
  ~MelExtractor();
  MelExtractor(const MelExtractor&) = delete;
  MelExtractor& operator=(const MelExtractor&) = delete;
  MelExtractor(MelExtractor&&) noexcept;
  MelExtractor& operator=(MelExtractor&&) noexcept;

  [[nodiscard]] const MelConfig& config() const { return config_; }
  [[nodiscard]] const std::vector<MelFilter>& filters() const { return filters_; }

  /// Filterbank energies before the log. Throws on wrong window length.
  [[nodiscard]] std::vector<double> mel_power(std::span<const float> window) const;
  [[nodiscard]] std::vector<double> mel_power(std::span<const double> window) const;

  /// log10(max(power, log_floor)) per mel bin.
  [[nodiscard]] std::vector<double> mel_spectrum(std::span<const float> window) const;
  [[nodiscard]] std::vector<double> mel_spectrum(std::span<const double> window) const;

  /// Log-mel frames of consecutive non-overlapping windows; a trailing partial
  /// window is dropped.
  [[nodiscard]] std::vector<std::vector<double>> frames(std::span<const float> signal) const;

 private:
  std::vector<double> power_from_windowed(std::vector<double>& buffer) const;

  MelConfig config_;
  std::vector<double> hann_;
  std::vector<MelFilter> filters_;
  struct Plan;
  std::unique_ptr<Plan> plan_;
};

}  // namespace ptinv
