#include "ptinv/synth/audio.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "ptinv/util/binary_io.hpp"

namespace ptinv {

void write_wav(const std::string& path, const AudioClip& clip) {
  if (clip.sample_rate <= 0.0) throw std::invalid_argument(path + ": non-positive sample rate");
  const auto data_bytes = static_cast<std::uint32_t>(clip.samples.size() * sizeof(float));
  const auto rate = static_cast<std::uint32_t>(std::lround(clip.sample_rate));
  io::write_atomically(path, [&](std::ostream& out) {
    io::write_bytes(out, "RIFF");
    io::write_u32(out, 4 + 8 + 16 + 8 + data_bytes);
    io::write_bytes(out, "WAVE");
    io::write_bytes(out, "fmt ");
    io::write_u32(out, 16);
    io::write_u16(out, 3);  // WAVE_FORMAT_IEEE_FLOAT
    io::write_u16(out, 1);
    io::write_u32(out, rate);
    io::write_u32(out, rate * 4);
    io::write_u16(out, 4);
    io::write_u16(out, 32);
    io::write_bytes(out, "data");
    io::write_u32(out, data_bytes);
    io::write_f32_array(out, clip.samples);
  });
}

AudioClip read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  io::Reader r(in, path);
  if (r.bytes(4) != "RIFF") r.fail("not a RIFF file");
  r.u32();
  if (r.bytes(4) != "WAVE") r.fail("not a WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  while (true) {
    const std::string id = r.bytes(4);
    const std::uint32_t size = r.u32();
    if (id == "fmt ") {
      format = r.u16();
      channels = r.u16();
      rate = r.u32();
      r.u32();
      r.u16();
      bits = r.u16();
      std::uint32_t consumed = 16;
      if (format == 0xFFFE && size >= 26) {  // WAVE_FORMAT_EXTENSIBLE: take the subformat tag
        r.u16();
        r.u16();
        r.u32();
        format = r.u16();
        consumed = 26;
      }
      r.skip(size - consumed + (size & 1));
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) r.fail("data chunk before fmt chunk");
      if (channels == 0) r.fail("zero channels");
      const std::size_t bytes_per_sample = bits / 8;
      const bool is_float = format == 3;
      if (!(format == 1 || is_float) || bytes_per_sample == 0 ||
          (is_float && bits != 32 && bits != 64) || (!is_float && bits > 32)) {
        r.fail("unsupported sample format (format " + std::to_string(format) + ", " +
               std::to_string(bits) + " bits)");
      }
      const std::size_t frames = size / (bytes_per_sample * channels);
      const std::string raw = r.bytes(frames * bytes_per_sample * channels);
      const auto* p = reinterpret_cast<const unsigned char*>(raw.data());
      AudioClip clip;
      clip.sample_rate = rate;
      clip.samples.resize(frames);
      for (std::size_t f = 0; f < frames; ++f) {
        double acc = 0.0;
        for (std::size_t c = 0; c < channels; ++c, p += bytes_per_sample) {
          std::uint64_t u = 0;
          for (std::size_t b = 0; b < bytes_per_sample; ++b) u |= static_cast<std::uint64_t>(p[b]) << (8 * b);
          double v;
          if (is_float && bits == 32) {
            v = std::bit_cast<float>(static_cast<std::uint32_t>(u));
          } else if (is_float) {
            v = std::bit_cast<double>(u);
          } else if (bits == 8) {
            v = (static_cast<double>(u) - 128.0) / 128.0;
          } else {
            const int shift = 64 - static_cast<int>(bits);
            const auto s = static_cast<std::int64_t>(u << shift) >> shift;
            v = static_cast<double>(s) / std::ldexp(1.0, static_cast<int>(bits) - 1);
          }
          acc += v;
        }
        clip.samples[f] = static_cast<float>(acc / channels);
      }
      return clip;
    } else {
      r.skip(size + (size & 1));
    }
  }
}

AudioClip resample(const AudioClip& clip, double target_rate) {
  if (target_rate <= 0.0 || clip.sample_rate <= 0.0) {
    throw std::invalid_argument("resample: non-positive sample rate");
  }
  if (target_rate == clip.sample_rate) return clip;
  const double ratio = target_rate / clip.sample_rate;
  const double cutoff = std::min(1.0, ratio);  // relative to the source Nyquist
  constexpr int kHalfTaps = 32;
  const double support = kHalfTaps / cutoff;
  const auto out_len = static_cast<std::size_t>(std::llround(clip.samples.size() * ratio));
  const auto n = static_cast<long>(clip.samples.size());

  AudioClip out;
  out.sample_rate = target_rate;
  out.samples.resize(out_len);
  for (std::size_t i = 0; i < out_len; ++i) {
    const double center = static_cast<double>(i) / ratio;
    const long lo = std::max(0L, static_cast<long>(std::ceil(center - support)));
    const long hi = std::min(n - 1, static_cast<long>(std::floor(center + support)));
    double acc = 0.0;
    for (long j = lo; j <= hi; ++j) {
      const double x = (static_cast<double>(j) - center) * cutoff;
      const double sinc = x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
      const double w = 0.5 + 0.5 * std::cos(std::numbers::pi * x / kHalfTaps);
      acc += clip.samples[static_cast<std::size_t>(j)] * sinc * w;
    }
    out.samples[i] = static_cast<float>(acc * cutoff);
  }
  return out;
}

}  // namespace ptinv
