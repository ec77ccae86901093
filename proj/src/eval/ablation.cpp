#include "ptinv/eval/ablation.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "ptinv/util/binary_io.hpp"

namespace ptinv {

namespace {

double ratio(double split, double joint) {
  if (split == joint) return 1.0;
  return split / joint;
}

}  // namespace

AblationReport ablation_report(std::span<const EpochMetrics> joint, std::span<const EpochMetrics> split,
                               std::span<const EpochMetrics> split_vae) {
  std::size_t n = std::min(joint.size(), split.size());
  if (!split_vae.empty()) n = std::min(n, split_vae.size());
  if (n == 0) throw std::invalid_argument("ablation: empty curves");
  AblationReport r;
  for (std::size_t i = 0; i < n; ++i) {
    const double split_mse = split_vae.empty() ? split[i].mel_mse_val : split_vae[i].mel_mse_val;
    r.rows.push_back({i + 1, joint[i].param_huber_val, split[i].param_huber_val, joint[i].mel_mse_val, split_mse});
  }
  r.final_huber_ratio = ratio(r.rows.back().split_huber, r.rows.back().joint_huber);
  r.final_mse_ratio = ratio(r.rows.back().split_mse, r.rows.back().joint_mse);
  return r;
}

nlohmann::json AblationReport::to_json() const {
  return {{"epochs", rows.size()}, {"final_huber_ratio", final_huber_ratio}, {"final_mse_ratio", final_mse_ratio}};
}

void AblationReport::write_csv(const std::filesystem::path& path) const {
  std::ostringstream out;
  out << "epoch,joint_huber,split_huber,joint_mse,split_mse\n";
  char line[256];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%zu,%.9g,%.9g,%.9g,%.9g\n", r.epoch, r.joint_huber, r.split_huber,
                  r.joint_mse, r.split_mse);
    out << line;
  }
  const std::string text = out.str();
  io::write_atomically(path, [&](std::ostream& o) { o << text; });
}

}  // namespace ptinv
