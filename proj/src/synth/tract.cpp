#include "ptinv/synth/tract.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ptinv {

namespace {

constexpr double kPalateDiameter = 1.5;

std::size_t scale_landmark(std::size_t ref, std::size_t n) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(ref) * static_cast<double>(n) / 44.0));
}

void check_controls(const TractControls& c) {
  const double v[] = {c.tongue_index, c.tongue_diameter, c.constriction_index, c.constriction_diameter};
  for (double x : v) {
    if (!std::isfinite(x) || x < 0.0) throw std::invalid_argument("tract controls must be finite and >= 0");
  }
}

}  // namespace

TractLayout TractLayout::for_sections(std::size_t n) {
  if (n < 8) throw std::invalid_argument("tract needs at least 8 sections");
  return {n, scale_landmark(10, n), scale_landmark(32, n), scale_landmark(39, n)};
}

TractControls TractControls::from(const PTParams& p) {
  return {p.tongue_index(), p.tongue_diameter(), p.constriction_index(), p.constriction_diameter()};
}

std::vector<double> default_rest_diameters(std::size_t n_sections) {
  std::vector<double> d(n_sections);
  const auto n = static_cast<double>(n_sections);
  for (std::size_t i = 0; i < n_sections; ++i) {
    const auto x = static_cast<double>(i);
    if (x < 7.0 * n / 44.0 - 0.5) {
      d[i] = 0.6;
    } else if (x < 12.0 * n / 44.0) {
      d[i] = 1.1;
    } else {
      d[i] = kPalateDiameter;
    }
  }
  return d;
}

std::vector<double> tract_shape(const TractControls& c, std::span<const double> rest) {
  check_controls(c);
  const auto layout = TractLayout::for_sections(rest.size());
  std::vector<double> d(rest.begin(), rest.end());

  // Tongue body. tongue_diameter is the tongue's distance from the centre of
  // the oral cavity, so a larger value leaves a wider passage over it.
  const double span = static_cast<double>(layout.tip_start - layout.blade_start);
  const double body = 2.0 + (c.tongue_diameter - 2.0) / 1.5;
  const double amplitude = kPalateDiameter - body + 1.7;
  for (std::size_t i = layout.blade_start; i < layout.lip_start; ++i) {
    const double t = 1.1 * std::numbers::pi * (c.tongue_index - static_cast<double>(i)) / span;
    double curve = amplitude * std::cos(t);
    if (i == layout.lip_start - 1) curve *= 0.8;
    if (i == layout.blade_start || i == layout.lip_start - 2) curve *= 0.94;
    d[i] = std::max(0.0, kPalateDiameter - curve);
  }

  // Constriction: full depth within half a section of the centre, cosine taper out to `width`.
  const double ci = c.constriction_index;
  const double target = c.constriction_diameter;
  double width;
  if (ci < 25.0) {
    width = 10.0;
  } else if (ci >= static_cast<double>(layout.tip_start)) {
    width = 5.0;
  } else {
    width = 10.0 - 5.0 * (ci - 25.0) / (static_cast<double>(layout.tip_start) - 25.0);
  }
  const auto center = static_cast<long>(std::lround(ci));
  const auto reach = static_cast<long>(std::ceil(width)) + 1;
  const auto n = static_cast<long>(d.size());
  for (long j = std::max(0L, center - reach); j <= std::min(n - 1, center + reach); ++j) {
    const double relpos = std::abs(static_cast<double>(j) - ci) - 0.5;
    double shrink;
    if (relpos <= 0.0) {
      shrink = 0.0;
    } else if (relpos > width) {
      shrink = 1.0;
    } else {
      shrink = 0.5 * (1.0 - std::cos(std::numbers::pi * relpos / width));
    }
    auto& dj = d[static_cast<std::size_t>(j)];
    if (target < dj) dj = target + (dj - target) * shrink;
  }
  return d;
}

std::vector<double> tract_shape(const PTParams& params, std::span<const double> rest) {
  return tract_shape(TractControls::from(params), rest);
}

std::vector<double> reflection_coefficients(std::span<const double> areas) {
  if (areas.size() < 2) throw std::invalid_argument("reflection_coefficients: need at least 2 sections");
  for (std::size_t i = 0; i < areas.size(); ++i) {
    if (!(areas[i] >= 0.0)) {
      throw std::invalid_argument("reflection_coefficients: negative area at section " + std::to_string(i));
    }
  }
  std::vector<double> k(areas.size() - 1);
  for (std::size_t i = 0; i + 1 < areas.size(); ++i) {
    const double sum = areas[i] + areas[i + 1];
    k[i] = sum == 0.0 ? 0.0 : (areas[i] - areas[i + 1]) / sum;
  }
  return k;
}

Tract::Tract(std::span<const double> initial_diameters) : Tract(initial_diameters, Options{}) {}

Tract::Tract(std::span<const double> initial_diameters, Options options)
    : opt_(options),
      from_(initial_diameters.begin(), initial_diameters.end()),
      to_(from_),
      diameter_(from_),
      area_(from_.size()),
      reflection_(from_.size() > 0 ? from_.size() - 1 : 0),
      right_(from_.size(), 0.0),
      left_(from_.size(), 0.0),
      junction_right_(from_.size() + 1, 0.0),
      junction_left_(from_.size() + 1, 0.0) {
  if (from_.size() < 2) throw std::invalid_argument("tract needs at least 2 sections");
  for (double v : from_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("tract diameters must be finite and >= 0");
  }
  for (std::size_t i = 0; i < area_.size(); ++i) area_[i] = diameter_[i] * diameter_[i];
}

void Tract::set_target(std::span<const double> diameters) {
  if (diameters.size() != to_.size()) throw std::invalid_argument("tract target has wrong section count");
  from_.swap(to_);
  std::copy(diameters.begin(), diameters.end(), to_.begin());
}

double Tract::step(double glottal_input, double block_fraction) {
  const std::size_t n = right_.size();
  for (std::size_t i = 0; i < n; ++i) {
    diameter_[i] = from_[i] + (to_[i] - from_[i]) * block_fraction;
    area_[i] = diameter_[i] * diameter_[i];
  }
  if (opt_.zero_reflections) {
    std::fill(reflection_.begin(), reflection_.end(), 0.0);
  } else {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double sum = area_[i] + area_[i + 1];
      reflection_[i] = sum == 0.0 ? 0.0 : (area_[i] - area_[i + 1]) / sum;
    }
  }

  junction_right_[0] = left_[0] * opt_.glottal_reflection + glottal_input;
  junction_left_[n] = right_[n - 1] * opt_.lip_reflection;
  for (std::size_t i = 1; i < n; ++i) {
    const double w = reflection_[i - 1] * (right_[i - 1] + left_[i]);
    junction_right_[i] = right_[i - 1] - w;
    junction_left_[i] = left_[i] + w;
  }
  for (std::size_t i = 0; i < n; ++i) {
    right_[i] = junction_right_[i] * opt_.fade;
    left_[i] = junction_left_[i + 1] * opt_.fade;
  }
  return right_[n - 1];
}

}  // namespace ptinv
