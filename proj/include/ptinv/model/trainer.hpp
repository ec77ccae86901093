#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ptinv/data/windowing.hpp"
#include "ptinv/model/objective.hpp"
#include "ptinv/model/vae.hpp"

namespace ptinv {

enum class TrainMode { joint, vae_only, frozen_projector };

[[nodiscard]] std::string_view to_string(TrainMode mode);
[[nodiscard]] TrainMode train_mode_from_string(std::string_view s);

struct TrainConfig {
  VaeConfig model;
  LossWeights loss;
  std::size_t epochs = 30;
  std::size_t batch_size = 64;
  double lr = 1e-3;
  std::uint64_t seed = 0;
  std::size_t threads = 1;  // results are reproducible for a fixed value

  void validate() const;
  [[nodiscard]] nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
};

/// Validation metrics after one epoch (posterior mean, no sampling).
struct EpochMetrics {
  std::size_t epoch = 0;
  double mel_mse_val = 0;
  double param_huber_val = 0;
  double param_mse_val = 0;
  double kl_val = 0;
  double train_loss = 0;
};

using EpochCallback = std::function<void(const EpochMetrics&)>;

struct TrainResult {
  VaeModel<float> model;
  std::vector<EpochMetrics> curves;
};

/// Trains on data.train and reports on data.validation every epoch.
///  joint:            all three parts, full objective.
///  vae_only:         encoder + reconstruction head, ELBO terms only.
///  frozen_projector: `init` is required; only the projector is updated, on
///                    latents sampled from the frozen encoder.
/// A non-finite loss aborts with the epoch and term named.
[[nodiscard]] TrainResult train_vae(const DatasetSplit& data, const TrainConfig& config, TrainMode mode,
                                    const VaeModel<float>* init = nullptr, const EpochCallback& on_epoch = {});

/// Objective over `samples` using the posterior mean; batch means are taken
/// over the whole set.
[[nodiscard]] LossBreakdown evaluate_vae(const VaeModel<float>& model, std::span<const WindowSample> samples,
                                         const LossWeights& weights, std::size_t threads = 1);

/// Latent inputs and labels for projector-only training. logvar may be empty,
/// in which case the inputs are used as they are.
struct ProjectorData {
  nn::Tensor<float> mu;      // [N, D]
  nn::Tensor<float> logvar;  // [N, D] or empty
  nn::Tensor<float> params_t;
  nn::Tensor<float> params_prev;
  [[nodiscard]] std::size_t size() const { return mu.shape.empty() ? 0 : mu.dim(0); }
};

struct ProjectorTrainResult {
  Projector<float> projector;
  std::vector<EpochMetrics> curves;
};

/// Parameter terms of the objective only. `fixed_mel_mse` / `fixed_kl` are
/// copied into every curve row (they do not change while the encoder is fixed).
[[nodiscard]] ProjectorTrainResult train_projector(const ProjectorData& train, const ProjectorData& validation,
                                                   Projector<float> init, const TrainConfig& config,
                                                   double fixed_mel_mse = 0.0, double fixed_kl = 0.0,
                                                   const EpochCallback& on_epoch = {});

[[nodiscard]] LossBreakdown evaluate_projector(const Projector<float>& projector, const ProjectorData& data,
                                               const LossWeights& weights);

/// Labels of `samples` as [N, 6] tensors.
[[nodiscard]] std::pair<nn::Tensor<float>, nn::Tensor<float>> label_tensors(std::span<const WindowSample> samples);
/// Mel frames of `samples` as [N, 128].
[[nodiscard]] nn::Tensor<float> mel_tensor(std::span<const WindowSample> samples);

void write_curves_csv(const std::filesystem::path& path, std::span<const EpochMetrics> curves);
[[nodiscard]] std::vector<EpochMetrics> read_curves_csv(const std::filesystem::path& path);

}  // namespace ptinv
