#include "ptinv/features/normalizer.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "ptinv/util/binary_io.hpp"

namespace ptinv {

NormalizerStats fit_normalizer(std::span<const std::vector<double>> frames) {
  if (frames.empty()) throw std::invalid_argument("fit_normalizer: no frames");
  const std::size_t dim = frames.front().size();
  NormalizerStats s{frames.front(), frames.front()};
  for (const auto& f : frames) {
    if (f.size() != dim) throw std::invalid_argument("fit_normalizer: ragged frames");
    for (std::size_t i = 0; i < dim; ++i) {
      s.min[i] = std::min(s.min[i], f[i]);
      s.max[i] = std::max(s.max[i], f[i]);
    }
  }
  return s;
}

std::vector<double> NormalizerStats::apply(std::span<const double> frame) const {
  if (frame.size() != dim()) throw std::invalid_argument("normalizer: frame width mismatch");
  std::vector<double> out(frame.size());
  for (std::size_t i = 0; i < frame.size(); ++i) {
    const double range = max[i] - min[i];
    out[i] = range > 0.0 ? std::clamp((frame[i] - min[i]) / range, 0.0, 1.0) : 0.5;
  }
  return out;
}

std::vector<double> NormalizerStats::invert(std::span<const double> normalized) const {
  if (normalized.size() != dim()) throw std::invalid_argument("normalizer: frame width mismatch");
  std::vector<double> out(normalized.size());
  for (std::size_t i = 0; i < normalized.size(); ++i) {
    const double range = max[i] - min[i];
    out[i] = range > 0.0 ? min[i] + normalized[i] * range : min[i];
  }
  return out;
}

nlohmann::json NormalizerStats::to_json() const { return {{"min", min}, {"max", max}}; }

NormalizerStats NormalizerStats::from_json(const nlohmann::json& j) {
  NormalizerStats s{j.at("min").get<std::vector<double>>(), j.at("max").get<std::vector<double>>()};
  if (s.min.size() != s.max.size() || s.min.empty()) {
    throw std::invalid_argument("normalizer stats: min/max length mismatch");
  }
  return s;
}

void NormalizerStats::save(const std::string& path) const {
  io::write_atomically(path, [&](std::ostream& out) { out << to_json().dump(2) << "\n"; });
}

NormalizerStats NormalizerStats::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

}  // namespace ptinv
