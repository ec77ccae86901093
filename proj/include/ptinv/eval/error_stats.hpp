#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptinv/synth/params.hpp"
#include "ptinv/synth/track.hpp"

namespace ptinv {

/// Box-plot summary. Quantiles use linear interpolation between order
/// statistics (Hyndman-Fan type 7); whiskers reach the most extreme data
/// points within 1.5 IQR of the quartiles.
struct BoxStats {
  double median = 0, q1 = 0, q3 = 0;
  double whisker_low = 0, whisker_high = 0;
  double mean = 0;
  std::size_t n = 0;

  [[nodiscard]] nlohmann::json to_json() const;
};

[[nodiscard]] double quantile_sorted(std::span<const double> sorted, double p);
/// Throws on an empty sample.
[[nodiscard]] BoxStats box_stats(std::vector<double> values);

/// Normalized absolute errors per parameter, one entry per window.
using ErrorSamples = std::array<std::vector<double>, kNumParams>;

struct ErrorReport {
  std::array<BoxStats, kNumParams> per_param;

  [[nodiscard]] nlohmann::json to_json() const;
};

[[nodiscard]] ErrorSamples abs_errors(std::span<const NormalizedParams> predicted,
                                      std::span<const NormalizedParams> truth);
void append_errors(ErrorSamples& into, const ErrorSamples& more);
[[nodiscard]] ErrorReport error_report(const ErrorSamples& errors);

/// Compares breakpoint by breakpoint; counts must match.
[[nodiscard]] ErrorReport param_error_stats(const ParamTrack& predicted, const ParamTrack& truth);

struct ErrorReportRow {
  std::string dataset;
  std::string model;
  ErrorReport report;
};

/// Long format: dataset,model,parameter,median,q1,q3,whisker_low,whisker_high,mean,n
void write_error_report_csv(const std::filesystem::path& path, std::span<const ErrorReportRow> rows);

}  // namespace ptinv
