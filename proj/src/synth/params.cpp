#include "ptinv/synth/params.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ptinv {

namespace {

void check_physical(const std::array<double, kNumParams>& v) {
  for (std::size_t i = 0; i < kNumParams; ++i) {
    if (!std::isfinite(v[i]) || !kParamRanges[i].contains(v[i])) {
      std::ostringstream msg;
      msg << "parameter " << kParamNames[i] << " = " << v[i] << " outside ["
          << kParamRanges[i].lo << ", " << kParamRanges[i].hi << "]";
      throw std::invalid_argument(msg.str());
    }
  }
}

}  // namespace

std::optional<Param> param_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNumParams; ++i) {
    if (kParamNames[i] == name) return static_cast<Param>(i);
  }
  return std::nullopt;
}

PTParams::PTParams() : v_{140.0, 0.6, 20.0, 2.8, 43.0, 3.5} {}

PTParams::PTParams(double frequency, double tenseness, double tongue_index,
                   double tongue_diameter, double constriction_index,
                   double constriction_diameter)
    : v_{frequency, tenseness, tongue_index, tongue_diameter, constriction_index,
         constriction_diameter} {
  check_physical(v_);
}

PTParams::PTParams(const std::array<double, kNumParams>& v, bool) : v_(v) {}

PTParams PTParams::from_array(const std::array<double, kNumParams>& values) {
  check_physical(values);
  return PTParams(values, true);
}

PTParams PTParams::from_normalized(const NormalizedParams& u) {
  std::array<double, kNumParams> v{};
  for (std::size_t i = 0; i < kNumParams; ++i) {
    if (!std::isfinite(u[i]) || u[i] < 0.0 || u[i] > 1.0) {
      std::ostringstream msg;
      msg << "normalized " << kParamNames[i] << " = " << u[i] << " outside [0, 1]";
      throw std::invalid_argument(msg.str());
    }
    v[i] = denormalize_value(static_cast<Param>(i), u[i]);
  }
  return PTParams(v, true);
}

NormalizedParams PTParams::normalized() const {
  NormalizedParams u{};
  for (std::size_t i = 0; i < kNumParams; ++i) u[i] = normalize_value(static_cast<Param>(i), v_[i]);
  return u;
}

PTParams PTParams::lerp(const PTParams& a, const PTParams& b, double w) {
  std::array<double, kNumParams> v{};
  for (std::size_t i = 0; i < kNumParams; ++i) {
    v[i] = std::clamp(a.v_[i] + (b.v_[i] - a.v_[i]) * w, kParamRanges[i].lo, kParamRanges[i].hi);
  }
  return PTParams(v, true);
}

double normalize_value(Param p, double physical) {
  const auto& r = kParamRanges[index_of(p)];
  return (physical - r.lo) / r.span();
}

double denormalize_value(Param p, double unit) {
  const auto& r = kParamRanges[index_of(p)];
  return std::clamp(r.lo + unit * r.span(), r.lo, r.hi);
}

}  // namespace ptinv
