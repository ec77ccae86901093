#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include <json.hpp>

#include "ptinv/model/trainer.hpp"

namespace ptinv {

struct AblationRow {
  std::size_t epoch = 0;
  double joint_huber = 0, split_huber = 0;
  double joint_mse = 0, split_mse = 0;
};

struct AblationReport {
  std::vector<AblationRow> rows;
  double final_huber_ratio = 1.0;  // split / joint at the last common epoch
  double final_mse_ratio = 1.0;

  [[nodiscard]] nlohmann::json to_json() const;
  void write_csv(const std::filesystem::path& path) const;
};

/// Lines up the validation curves of joint training and of the two-stage
/// regime, truncated to the shorter run. The split regime's mel error comes
/// from `split_vae` when given (the VAE stage), otherwise from `split`.
[[nodiscard]] AblationReport ablation_report(std::span<const EpochMetrics> joint, std::span<const EpochMetrics> split,
                                             std::span<const EpochMetrics> split_vae = {});

}  // namespace ptinv
