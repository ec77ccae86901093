#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "ptinv/data/generate.hpp"
#include "ptinv/features/mel.hpp"
#include "ptinv/model/embedding_file.hpp"
#include "ptinv/model/trainer.hpp"
#include "ptinv/nn/checkpoint.hpp"

namespace ptinv {

/// Projector inputs for one embedding file: for each analysis window the
/// embedding frame nearest its centre, resized to `dim`. Returns [n_windows, dim].
[[nodiscard]] nn::Tensor<float> embedding_inputs(const EmbeddingFile& file, std::size_t n_windows,
                                                 const MelConfig& mel, std::size_t dim);

struct EmbeddingDataset {
  ProjectorData train;
  ProjectorData validation;
  std::vector<std::uint32_t> train_files;       // indices into the embedding list
  std::vector<std::uint32_t> validation_files;
};

/// Pairs each embedding file with the manifest entry of the same stem and
/// labels every window from its track. Split 80/20 by file.
[[nodiscard]] EmbeddingDataset embedding_dataset(std::span<const std::filesystem::path> files, const Manifest& labels,
                                                 const MelConfig& mel, std::size_t dim, std::uint64_t split_seed,
                                                 double train_fraction = 0.8);

struct EmbeddingTrainResult {
  Projector<float> projector;
  std::vector<EpochMetrics> curves;
  EmbeddingModel model_tag;
};

/// Trains a fresh projector with the parameter terms of the objective only.
[[nodiscard]] EmbeddingTrainResult train_projector_on_embeddings(std::span<const std::filesystem::path> files,
                                                                 const Manifest& labels, const TrainConfig& config,
                                                                 const MelConfig& mel = {},
                                                                 const EpochCallback& on_epoch = {});

[[nodiscard]] nn::Checkpoint projector_checkpoint(Projector<float>& projector, nlohmann::json header);
[[nodiscard]] Projector<float> projector_from_checkpoint(const nn::Checkpoint& ck);

}  // namespace ptinv
