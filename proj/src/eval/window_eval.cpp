#include "ptinv/eval/window_eval.hpp"

#include <algorithm>

#include "ptinv/util/parallel.hpp"

namespace ptinv {

namespace {

constexpr std::size_t kChunk = 256;

bool same_stats(const NormalizerStats& a, const NormalizerStats& b) { return a.min == b.min && a.max == b.max; }

}  // namespace

ErrorSamples window_errors(const InversionModel& model, std::span<const WindowSample> samples,
                           const NormalizerStats& sample_stats, std::size_t threads) {
  const std::size_t dim = model.mel_config().n_mels;
  const bool remap = !same_stats(sample_stats, model.stats());
  const std::size_t n_chunks = (samples.size() + kChunk - 1) / kChunk;
  std::vector<ErrorSamples> parts(n_chunks);

  parallel_for(n_chunks, threads, [&](std::size_t c) {
    const std::size_t begin = c * kChunk, end = std::min(samples.size(), begin + kChunk);
    nn::Tensor<float> x({end - begin, dim});
    std::vector<NormalizedParams> truth(end - begin);
    std::vector<double> frame(dim);
    for (std::size_t i = begin; i < end; ++i) {
      const auto& s = samples[i];
      if (s.mel.size() != dim) throw std::invalid_argument("window frame width does not match the model");
      std::copy(s.mel.begin(), s.mel.end(), frame.begin());
      if (remap) frame = model.stats().apply(sample_stats.invert(frame));
      std::copy(frame.begin(), frame.end(), x.ptr() + (i - begin) * dim);
      std::copy(s.params_t.begin(), s.params_t.end(), truth[i - begin].begin());
    }
    parts[c] = abs_errors(model.predict_frames(x), truth);
  });

  ErrorSamples all;
  for (const auto& p : parts) append_errors(all, p);
  return all;
}

}  // namespace ptinv
