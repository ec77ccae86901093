#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ptinv/features/mel.hpp"
#include "ptinv/features/normalizer.hpp"

using namespace ptinv;
using Catch::Approx;

namespace {

// HTK mel scale written out independently of the library.
double htk_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
double htk_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

std::vector<double> sine(double freq, double amplitude, std::size_t n, double sr) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = amplitude * std::sin(2 * M_PI * freq * double(i) / sr);
  return x;
}

}  // namespace

TEST_CASE("silence hits the log floor", "[mel]") {
  const MelExtractor mel;
  const std::vector<double> zeros(720, 0.0);
  const auto out = mel.mel_spectrum(zeros);
  REQUIRE(out.size() == 128);
  for (double v : out) CHECK(v == Approx(-10.0).margin(1e-12));
  CHECK_THROWS_AS(mel.mel_spectrum(std::vector<double>(719, 0.0)), std::invalid_argument);
}

TEST_CASE("a sine at a filter centre peaks in that filter", "[mel]") {
  const MelConfig cfg;
  const MelExtractor mel(cfg);
  const double top = htk_mel(cfg.f_max), bottom = htk_mel(cfg.f_min);
  auto centre = [&](int k) { return htk_hz(bottom + (top - bottom) * double(k + 1) / double(cfg.n_mels + 1)); };
  const double bin_hz = cfg.sample_rate / double(cfg.fft_size);

  // Filters whose centres sit at least one FFT bin from both neighbours can be
  // told apart at this FFT size; narrower ones share bins.
  int tested = 0;
  for (int k = 1; k < int(cfg.n_mels); ++k) {
    const double right = k + 1 < int(cfg.n_mels) ? centre(k + 1) - centre(k) : 1e9;
    if (centre(k) - centre(k - 1) < bin_hz || right < bin_hz) continue;
    const auto out = mel.mel_spectrum(sine(centre(k), 0.5, cfg.window_samples, cfg.sample_rate));
    const auto arg = std::max_element(out.begin(), out.end()) - out.begin();
    INFO("filter " << k << " centre " << centre(k) << " Hz");
    CHECK(arg == k);
    ++tested;
  }
  CHECK(tested >= 95);
}

TEST_CASE("filters are positive and overlap only their neighbours", "[mel]") {
  const MelExtractor mel;
  const auto& filters = mel.filters();
  REQUIRE(filters.size() == 128);
  for (std::size_t k = 0; k < filters.size(); ++k) {
    double sum = 0;
    for (double w : filters[k].weights) {
      CHECK(w >= 0.0);
      sum += w;
    }
    CHECK(sum > 0.0);
    for (std::size_t j = k + 2; j < filters.size(); ++j) {
      const auto& a = filters[k];
      const auto& b = filters[j];
      // Non-adjacent filters must not share a bin with non-zero weight in both.
      for (std::size_t i = 0; i < a.weights.size(); ++i) {
        const std::size_t bin = a.first_bin + i;
        if (a.weights[i] == 0.0 || bin < b.first_bin || bin >= b.first_bin + b.weights.size()) continue;
        CHECK(b.weights[bin - b.first_bin] == 0.0);
      }
    }
  }
}

TEST_CASE("filterbank power grows with gain", "[mel][property]") {
  const MelExtractor mel;
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g(0, 0.1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(720);
    for (auto& v : x) v = g(rng);
    double previous = -1;
    for (double gain : {0.0, 0.1, 0.5, 1.0, 2.0, 8.0}) {
      std::vector<double> y(x);
      for (auto& v : y) v *= gain;
      const auto p = mel.mel_power(y);
      double total = 0;
      for (double v : p) total += v;
      CHECK(total >= previous);
      previous = total;
    }
  }
}

TEST_CASE("mel frames are pure", "[mel]") {
  const MelExtractor mel;
  std::mt19937_64 rng(2);
  std::vector<float> x(720 * 3 + 100);
  for (auto& v : x) v = std::uniform_real_distribution<float>(-1, 1)(rng);
  const auto a = mel.frames(x);
  const auto b = mel.frames(x);
  REQUIRE(a.size() == 3);
  CHECK(a == b);
  const auto single = mel.mel_spectrum(std::span<const float>(x).subspan(720, 720));
  CHECK(a[1] == single);
}

TEST_CASE("config validation", "[mel]") {
  MelConfig c;
  c.fft_size = 512;
  CHECK_THROWS(c.validate());
  c = MelConfig{};
  c.f_max = 30000;
  CHECK_THROWS(c.validate());
  CHECK(MelConfig::from_json(MelConfig{}.to_json()).to_json() == MelConfig{}.to_json());
}

TEST_CASE("min-max normalizer endpoints and inverse", "[mel]") {
  std::mt19937_64 rng(3);
  std::vector<std::vector<double>> frames(50, std::vector<double>(128));
  for (auto& f : frames) {
    for (auto& v : f) v = std::uniform_real_distribution<double>(-10, 2)(rng);
  }
  const auto stats = fit_normalizer(frames);
  for (double v : stats.apply(stats.min)) CHECK(v == 0.0);
  for (double v : stats.apply(stats.max)) CHECK(v == 1.0);
  for (const auto& f : frames) {
    const auto u = stats.apply(f);
    for (double v : u) REQUIRE((v >= 0.0 && v <= 1.0));
    const auto back = stats.invert(u);
    for (std::size_t i = 0; i < f.size(); ++i) REQUIRE(back[i] == Approx(f[i]).margin(1e-6));
  }
  std::vector<double> outside(128, 100.0);
  for (double v : stats.apply(outside)) CHECK(v == 1.0);
  outside.assign(128, -100.0);
  for (double v : stats.apply(outside)) CHECK(v == 0.0);
}

TEST_CASE("constant data maps to one half", "[mel]") {
  const std::vector<std::vector<double>> frames(4, std::vector<double>(128, -3.0));
  const auto stats = fit_normalizer(frames);
  for (double v : stats.apply(frames[0])) CHECK(v == 0.5);
  CHECK_THROWS_AS(fit_normalizer(std::vector<std::vector<double>>{}), std::invalid_argument);
  CHECK_THROWS_AS(fit_normalizer(std::vector<std::vector<double>>{{1.0, 2.0}, {1.0}}), std::invalid_argument);
  const auto back = NormalizerStats::from_json(stats.to_json());
  CHECK(back.min == stats.min);
  CHECK(back.max == stats.max);
}
