#include "ptinv/data/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ptinv {

namespace {

constexpr double kStepSeconds = 0.1;

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace

std::string_view to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::static_vowel: return "static";
    case DatasetKind::linear: return "linear";
    case DatasetKind::step100ms: return "step100ms";
  }
  return "?";
}

DatasetKind dataset_kind_from_string(std::string_view s) {
  if (s == "static") return DatasetKind::static_vowel;
  if (s == "linear") return DatasetKind::linear;
  if (s == "step100ms") return DatasetKind::step100ms;
  throw std::invalid_argument("unknown dataset kind '" + std::string(s) + "'");
}

nlohmann::json SamplingConfig::to_json() const {
  return {{"tongue_log_mu", tongue_log_mu},
          {"tongue_log_sigma", tongue_log_sigma},
          {"constriction_floor", constriction_floor},
          {"constriction_floor_slope", constriction_floor_slope}};
}

SamplingConfig SamplingConfig::from_json(const nlohmann::json& j) {
  SamplingConfig c;
  c.tongue_log_mu = j.value("tongue_log_mu", c.tongue_log_mu);
  c.tongue_log_sigma = j.value("tongue_log_sigma", c.tongue_log_sigma);
  c.constriction_floor = j.value("constriction_floor", c.constriction_floor);
  c.constriction_floor_slope = j.value("constriction_floor_slope", c.constriction_floor_slope);
  if (!(c.tongue_log_sigma > 0.0)) throw std::invalid_argument("sampling: tongue_log_sigma must be positive");
  return c;
}

double constriction_lower_bound(double tongue_diameter, const SamplingConfig& cfg) {
  const auto& td = kParamRanges[index_of(Param::tongue_diameter)];
  const auto& cd = kParamRanges[index_of(Param::constriction_diameter)];
  const double lower = cfg.constriction_floor + cfg.constriction_floor_slope * (td.hi - tongue_diameter) / td.span();
  return std::clamp(lower, cd.lo, cd.hi);
}

PTParams sample_params(std::mt19937_64& rng, const SamplingConfig& cfg) {
  auto range = [](Param p) { return kParamRanges[index_of(p)]; };

  const auto ti = range(Param::tongue_index);
  std::lognormal_distribution<double> lognormal(cfg.tongue_log_mu, cfg.tongue_log_sigma);
  double tongue_index = lognormal(rng);
  while (!ti.contains(tongue_index)) tongue_index = lognormal(rng);  // exact truncation by rejection

  const double frequency = uniform(rng, range(Param::frequency).lo, range(Param::frequency).hi);
  const double tenseness = uniform(rng, range(Param::tenseness).lo, range(Param::tenseness).hi);
  const double tongue_diameter = uniform(rng, range(Param::tongue_diameter).lo, range(Param::tongue_diameter).hi);
  const double constriction_index =
      uniform(rng, range(Param::constriction_index).lo, range(Param::constriction_index).hi);
  const double constriction_diameter =
      uniform(rng, constriction_lower_bound(tongue_diameter, cfg), range(Param::constriction_diameter).hi);
  return {frequency, tenseness, tongue_index, tongue_diameter, constriction_index, constriction_diameter};
}

ParamTrack sample_track(DatasetKind kind, std::mt19937_64& rng, double duration, const SamplingConfig& cfg) {
  if (!(duration > 0.0)) throw std::invalid_argument("sample_track: duration must be positive");
  switch (kind) {
    case DatasetKind::static_vowel:
      return ParamTrack::constant(sample_params(rng, cfg));
    case DatasetKind::linear: {
      const PTParams a = sample_params(rng, cfg);
      const PTParams b = sample_params(rng, cfg);
      return ParamTrack({{0.0, a}, {duration, b}}, Interpolation::linear);
    }
    case DatasetKind::step100ms: {
      const auto n = static_cast<std::size_t>(std::ceil(duration / kStepSeconds - 1e-9));
      std::vector<Breakpoint> points;
      for (std::size_t i = 0; i < n; ++i) points.push_back({static_cast<double>(i) * kStepSeconds, sample_params(rng, cfg)});
      return ParamTrack(std::move(points), Interpolation::hold);
    }
  }
  throw std::invalid_argument("sample_track: unknown kind");
}

}  // namespace ptinv
