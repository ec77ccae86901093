#include "ptinv/synth/track.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ptinv {

std::string_view to_string(Interpolation mode) {
  return mode == Interpolation::hold ? "hold" : "linear";
}

Interpolation interpolation_from_string(std::string_view s) {
  if (s == "hold") return Interpolation::hold;
  if (s == "linear") return Interpolation::linear;
  throw std::invalid_argument("unknown interpolation mode '" + std::string(s) + "'");
}

ParamTrack::ParamTrack(std::vector<Breakpoint> points, Interpolation mode)
    : points_(std::move(points)), mode_(mode) {
  if (points_.empty()) throw std::invalid_argument("parameter track is empty");
  if (points_.front().time != 0.0) {
    throw std::invalid_argument("parameter track must start at t = 0");
  }
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i].time) || points_[i].time <= points_[i - 1].time) {
      std::ostringstream msg;
      msg << "parameter track times must be strictly increasing (breakpoint " << i << ")";
      throw std::invalid_argument(msg.str());
    }
  }
}

PTParams ParamTrack::at(double t) const {
  // Index of the last breakpoint with time <= t.
  auto it = std::upper_bound(points_.begin(), points_.end(), t,
                             [](double v, const Breakpoint& b) { return v < b.time; });
  if (it == points_.begin()) return points_.front().params;
  const auto& left = *std::prev(it);
  if (mode_ == Interpolation::hold || it == points_.end()) return left.params;
  const double w = (t - left.time) / (it->time - left.time);
  return PTParams::lerp(left.params, it->params, w);
}

nlohmann::json ParamTrack::to_json() const {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& b : points_) {
    nlohmann::json p;
    p["t"] = b.time;
    for (std::size_t i = 0; i < kNumParams; ++i) p[std::string(kParamNames[i])] = b.params.values()[i];
    points.push_back(std::move(p));
  }
  return {{"interpolation", to_string(mode_)}, {"breakpoints", std::move(points)}};
}

ParamTrack ParamTrack::from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("breakpoints") || !doc["breakpoints"].is_array()) {
    throw std::invalid_argument("parameter track JSON needs a 'breakpoints' array");
  }
  const auto mode = interpolation_from_string(doc.value("interpolation", std::string("hold")));
  std::vector<Breakpoint> points;
  for (const auto& p : doc["breakpoints"]) {
    std::array<double, kNumParams> v{};
    for (std::size_t i = 0; i < kNumParams; ++i) {
      const std::string key(kParamNames[i]);
      if (!p.contains(key) || !p[key].is_number()) {
        throw std::invalid_argument("breakpoint missing numeric field '" + key + "'");
      }
      v[i] = p[key].get<double>();
    }
    if (!p.contains("t") || !p["t"].is_number()) {
      throw std::invalid_argument("breakpoint missing numeric field 't'");
    }
    points.push_back({p["t"].get<double>(), PTParams::from_array(v)});
  }
  return ParamTrack(std::move(points), mode);
}

std::string ParamTrack::dump() const { return to_json().dump(2) + "\n"; }

void ParamTrack::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << dump();
  if (!out) throw std::runtime_error("failed writing " + path);
}

ParamTrack ParamTrack::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

}  // namespace ptinv
