#include "ptinv/model/embedding_trainer.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>

#include "ptinv/data/windowing.hpp"
#include "ptinv/model/slerp.hpp"
#include "ptinv/util/seed.hpp"

namespace ptinv {

nn::Tensor<float> embedding_inputs(const EmbeddingFile& file, std::size_t n_windows, const MelConfig& mel,
                                   std::size_t dim) {
  nn::Tensor<float> out({n_windows, dim});
  for (std::size_t w = 0; w < n_windows; ++w) {
    const auto resized = slerp_resize(file.frame(file.nearest_frame(window_center(w, mel))), dim);
    std::copy(resized.begin(), resized.end(), out.ptr() + w * dim);
  }
  return out;
}

namespace {

struct FileRows {
  nn::Tensor<float> inputs;
  nn::Tensor<float> params_t, params_prev;
};

ProjectorData concat(const std::vector<FileRows>& rows, std::span<const std::uint32_t> ids, std::size_t dim) {
  std::size_t n = 0;
  for (auto id : ids) n += rows[id].inputs.dim(0);
  ProjectorData d;
  d.mu = nn::Tensor<float>({n, dim});
  d.params_t = nn::Tensor<float>({n, kNumParams});
  d.params_prev = nn::Tensor<float>({n, kNumParams});
  std::size_t at = 0;
  for (auto id : ids) {
    const auto& r = rows[id];
    const std::size_t k = r.inputs.dim(0);
    std::copy(r.inputs.data.begin(), r.inputs.data.end(), d.mu.ptr() + at * dim);
    std::copy(r.params_t.data.begin(), r.params_t.data.end(), d.params_t.ptr() + at * kNumParams);
    std::copy(r.params_prev.data.begin(), r.params_prev.data.end(), d.params_prev.ptr() + at * kNumParams);
    at += k;
  }
  return d;
}

}  // namespace

EmbeddingDataset embedding_dataset(std::span<const std::filesystem::path> files, const Manifest& labels,
                                   const MelConfig& mel, std::size_t dim, std::uint64_t split_seed,
                                   double train_fraction) {
  if (files.empty()) throw std::invalid_argument("no embedding files given");
  std::map<std::string, const ManifestEntry*> by_stem;
  for (const auto& e : labels.files) by_stem[std::filesystem::path(e.wav).stem().string()] = &e;

  const auto n_samples = static_cast<std::size_t>(std::llround(labels.spec.duration * mel.sample_rate));
  const std::size_t n_windows = window_count(n_samples, mel);
  if (n_windows == 0) throw std::invalid_argument("labelled clips are shorter than one window");

  std::vector<FileRows> rows(files.size());
  std::optional<EmbeddingModel> tag;
  for (std::size_t f = 0; f < files.size(); ++f) {
    const auto& path = files[f];
    const EmbeddingFile emb = EmbeddingFile::load(path);
    if (tag && *tag != emb.model) {
      throw std::invalid_argument(path.string() + ": mixes " + std::string(to_string(emb.model)) + " with " +
                                  std::string(to_string(*tag)) + " embeddings");
    }
    tag = emb.model;
    const auto it = by_stem.find(path.stem().string());
    if (it == by_stem.end()) throw std::invalid_argument(path.string() + ": no manifest entry with this stem");
    const ParamTrack track = ParamTrack::load(labels.resolve(it->second->track_json).string());

    FileRows& r = rows[f];
    r.inputs = embedding_inputs(emb, n_windows, mel, dim);
    r.params_t = nn::Tensor<float>({n_windows, kNumParams});
    r.params_prev = nn::Tensor<float>({n_windows, kNumParams});
    for (std::size_t w = 0; w < n_windows; ++w) {
      const auto u = track.at(window_center(w, mel)).normalized();
      for (std::size_t i = 0; i < kNumParams; ++i) r.params_t[w * kNumParams + i] = static_cast<float>(u[i]);
    }
    for (std::size_t w = 0; w < n_windows; ++w) {
      const std::size_t src = w == 0 ? 0 : w - 1;
      std::copy_n(r.params_t.ptr() + src * kNumParams, kNumParams, r.params_prev.ptr() + w * kNumParams);
    }
  }

  EmbeddingDataset d;
  std::tie(d.train_files, d.validation_files) = split_files(files.size(), train_fraction, split_seed);
  d.train = concat(rows, d.train_files, dim);
  d.validation = concat(rows, d.validation_files, dim);
  return d;
}

EmbeddingTrainResult train_projector_on_embeddings(std::span<const std::filesystem::path> files,
                                                   const Manifest& labels, const TrainConfig& config,
                                                   const MelConfig& mel, const EpochCallback& on_epoch) {
  config.validate();
  const ProjectorConfig pc = config.model.projector;
  const EmbeddingModel tag = EmbeddingFile::load(files.front()).model;
  const EmbeddingDataset data = embedding_dataset(files, labels, mel, pc.input_dim, config.seed);
  Projector<float> init(pc);
  std::mt19937_64 rng(derive_seed(config.seed, 0));
  init.init(rng);
  auto trained = train_projector(data.train, data.validation, std::move(init), config, 0.0, 0.0, on_epoch);
  return {std::move(trained.projector), std::move(trained.curves), tag};
}

nn::Checkpoint projector_checkpoint(Projector<float>& projector, nlohmann::json header) {
  nn::Checkpoint ck;
  header["projector"] = projector.config().to_json();
  ck.header = std::move(header);
  for (auto& [name, t] : projector.named_params(kProjectorPrefix)) ck.add(name, *t);
  return ck;
}

Projector<float> projector_from_checkpoint(const nn::Checkpoint& ck) {
  if (!ck.header.contains("projector")) throw std::runtime_error("checkpoint has no projector description");
  Projector<float> p(ProjectorConfig::from_json(ck.header["projector"]));
  for (auto& [name, t] : p.named_params(kProjectorPrefix)) {
    const auto& stored = ck.get(name);
    nn::require_same_shape(name, stored.shape, t->shape);
    *t = stored;
  }
  return p;
}

}  // namespace ptinv
