#include "ptinv/eval/error_stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ptinv/util/binary_io.hpp"

namespace ptinv {

nlohmann::json BoxStats::to_json() const {
  return {{"median", median},           {"q1", q1},     {"q3", q3}, {"whisker_low", whisker_low},
          {"whisker_high", whisker_high}, {"mean", mean}, {"n", n}};
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

BoxStats box_stats(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("box_stats: empty sample");
  std::sort(values.begin(), values.end());
  BoxStats s;
  s.n = values.size();
  s.q1 = quantile_sorted(values, 0.25);
  s.median = quantile_sorted(values, 0.5);
  s.q3 = quantile_sorted(values, 0.75);
  const double iqr = s.q3 - s.q1;
  const double lo_fence = s.q1 - 1.5 * iqr, hi_fence = s.q3 + 1.5 * iqr;
  s.whisker_low = *std::lower_bound(values.begin(), values.end(), lo_fence);
  s.whisker_high = *(std::upper_bound(values.begin(), values.end(), hi_fence) - 1);
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  return s;
}

nlohmann::json ErrorReport::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t i = 0; i < kNumParams; ++i) j[std::string(kParamNames[i])] = per_param[i].to_json();
  return j;
}

ErrorSamples abs_errors(std::span<const NormalizedParams> predicted, std::span<const NormalizedParams> truth) {
  if (predicted.size() != truth.size()) {
    throw std::invalid_argument("error stats: " + std::to_string(predicted.size()) + " predictions for " +
                                std::to_string(truth.size()) + " reference windows");
  }
  ErrorSamples e;
  for (std::size_t w = 0; w < predicted.size(); ++w) {
    for (std::size_t i = 0; i < kNumParams; ++i) e[i].push_back(std::abs(predicted[w][i] - truth[w][i]));
  }
  return e;
}

void append_errors(ErrorSamples& into, const ErrorSamples& more) {
  for (std::size_t i = 0; i < kNumParams; ++i) into[i].insert(into[i].end(), more[i].begin(), more[i].end());
}

ErrorReport error_report(const ErrorSamples& errors) {
  ErrorReport r;
  for (std::size_t i = 0; i < kNumParams; ++i) r.per_param[i] = box_stats(errors[i]);
  return r;
}

ErrorReport param_error_stats(const ParamTrack& predicted, const ParamTrack& truth) {
  std::vector<NormalizedParams> p, t;
  for (const auto& b : predicted.breakpoints()) p.push_back(b.params.normalized());
  for (const auto& b : truth.breakpoints()) t.push_back(b.params.normalized());
  return error_report(abs_errors(p, t));
}

void write_error_report_csv(const std::filesystem::path& path, std::span<const ErrorReportRow> rows) {
  std::ostringstream out;
  out << "dataset,model,parameter,median,q1,q3,whisker_low,whisker_high,mean,n\n";
  char line[512];
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < kNumParams; ++i) {
      const auto& s = row.report.per_param[i];
      std::snprintf(line, sizeof(line), "%s,%s,%s,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%zu\n", row.dataset.c_str(),
                    row.model.c_str(), std::string(kParamNames[i]).c_str(), s.median, s.q1, s.q3, s.whisker_low,
                    s.whisker_high, s.mean, s.n);
      out << line;
    }
  }
  const std::string text = out.str();
  io::write_atomically(path, [&](std::ostream& o) { o << text; });
}

}  // namespace ptinv
