#pragma once

#include <span>

#include "ptinv/data/windowing.hpp"
#include "ptinv/eval/error_stats.hpp"
#include "ptinv/model/inverter.hpp"

namespace ptinv {

/// Absolute normalized errors of the model on labelled windows. The frames
/// were normalized with `sample_stats`; when that differs from the model's
/// own normalizer they are mapped back to log-mel and re-normalized.
[[nodiscard]] ErrorSamples window_errors(const InversionModel& model, std::span<const WindowSample> samples,
                                         const NormalizerStats& sample_stats, std::size_t threads = 1);

}  // namespace ptinv
