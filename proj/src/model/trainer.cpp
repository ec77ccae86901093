#include "ptinv/model/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "ptinv/nn/adam.hpp"
#include "ptinv/util/binary_io.hpp"
#include "ptinv/util/parallel.hpp"
#include "ptinv/util/seed.hpp"

namespace ptinv {

namespace {

constexpr std::size_t kEvalChunk = 256;

using Tensor = nn::Tensor<float>;

Tensor gather_rows(const Tensor& src, std::span<const std::size_t> rows) {
  const std::size_t width = src.size() / src.dim(0);
  Tensor out({rows.size(), width});
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::copy_n(src.ptr() + rows[r] * width, width, out.ptr() + r * width);
  }
  return out;
}

Tensor slice_rows(const Tensor& src, std::size_t begin, std::size_t end) {
  const std::size_t width = src.size() / src.dim(0);
  Tensor out({end - begin, width});
  std::copy(src.ptr() + begin * width, src.ptr() + end * width, out.ptr());
  return out;
}

Tensor normal_tensor(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::normal_distribution<double> normal;
  Tensor t({rows, cols});
  for (auto& v : t.data) v = static_cast<float>(normal(rng));
  return t;
}

void check_finite(const LossBreakdown& b, std::size_t epoch) {
  const std::pair<const char*, double> terms[] = {{"mel reconstruction", b.elbo_recon},
                                                  {"KL", b.elbo_kl},
                                                  {"current-parameter", b.param_t},
                                                  {"previous-parameter Huber", b.param_prev}};
  for (const auto& [name, v] : terms) {
    if (!std::isfinite(v)) {
      throw std::runtime_error("epoch " + std::to_string(epoch) + ": non-finite " + name + " loss");
    }
  }
}

std::vector<std::pair<std::size_t, std::size_t>> shard_ranges(std::size_t n, std::size_t shards) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t s = 0; s < shards; ++s) out.emplace_back(n * s / shards, n * (s + 1) / shards);
  return out;
}

std::vector<nn::Tensor<float>*> params_of(VaeModel<float>& m, std::span<const ParamGroup> groups) {
  std::vector<nn::Tensor<float>*> out;
  for (auto g : groups) {
    for (auto& [name, t] : m.named_params(g)) out.push_back(t);
  }
  return out;
}

EpochMetrics metrics_from(const LossBreakdown& b, std::size_t epoch, double train_loss) {
  return {epoch, b.mel_mse, b.param_huber, b.param_mse, b.kl, train_loss};
}

}  // namespace

std::string_view to_string(TrainMode mode) {
  switch (mode) {
    case TrainMode::joint: return "joint";
    case TrainMode::vae_only: return "vae_only";
    case TrainMode::frozen_projector: return "frozen_projector";
  }
  return "?";
}

TrainMode train_mode_from_string(std::string_view s) {
  if (s == "joint") return TrainMode::joint;
  if (s == "vae_only") return TrainMode::vae_only;
  if (s == "frozen_projector") return TrainMode::frozen_projector;
  throw std::invalid_argument("unknown training mode '" + std::string(s) + "'");
}

void TrainConfig::validate() const {
  model.validate();
  loss.validate();
  if (epochs == 0) throw std::invalid_argument("train config: epochs must be positive");
  if (batch_size == 0) throw std::invalid_argument("train config: batch_size must be positive");
  if (!(lr > 0.0)) throw std::invalid_argument("train config: lr must be positive");
}

nlohmann::json TrainConfig::to_json() const {
  return {{"model", model.to_json()}, {"loss", loss.to_json()}, {"epochs", epochs},  {"batch_size", batch_size},
          {"lr", lr},                 {"seed", seed},           {"threads", threads}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  TrainConfig c;
  if (j.contains("model")) c.model = VaeConfig::from_json(j["model"]);
  if (j.contains("loss")) c.loss = LossWeights::from_json(j["loss"]);
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.lr = j.value("lr", c.lr);
  c.seed = j.value("seed", c.seed);
  c.threads = j.value("threads", c.threads);
  c.validate();
  return c;
}

std::pair<Tensor, Tensor> label_tensors(std::span<const WindowSample> samples) {
  Tensor pt({samples.size(), kNumParams}), pp({samples.size(), kNumParams});
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::copy(samples[i].params_t.begin(), samples[i].params_t.end(), pt.ptr() + i * kNumParams);
    std::copy(samples[i].params_prev.begin(), samples[i].params_prev.end(), pp.ptr() + i * kNumParams);
  }
  return {std::move(pt), std::move(pp)};
}

Tensor mel_tensor(std::span<const WindowSample> samples) {
  if (samples.empty()) return Tensor({0, 0});
  const std::size_t M = samples.front().mel.size();
  Tensor mel({samples.size(), M});
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].mel.size() != M) throw std::invalid_argument("ragged mel frames");
    std::copy(samples[i].mel.begin(), samples[i].mel.end(), mel.ptr() + i * M);
  }
  return mel;
}

LossBreakdown evaluate_vae(const VaeModel<float>& model, std::span<const WindowSample> samples,
                           const LossWeights& weights, std::size_t threads) {
  if (samples.empty()) return {};
  const std::size_t n_chunks = (samples.size() + kEvalChunk - 1) / kEvalChunk;
  std::vector<LossBreakdown> parts(n_chunks);
  parallel_for(n_chunks, threads, [&](std::size_t c) {
    const auto chunk = samples.subspan(c * kEvalChunk, std::min(kEvalChunk, samples.size() - c * kEvalChunk));
    const Tensor mel = mel_tensor(chunk);
    const auto [pt, pp] = label_tensors(chunk);
    const auto [mu, logvar] = model.encode(mel);
    const Tensor recon = model.reconstruct(mu);
    const Tensor params_hat = model.projector.forward(mu);
    ObjectiveInputs<float> in{&mel, &recon, &mu, &logvar, &params_hat, &pt, &pp, samples.size()};
    parts[c] = evaluate_objective<float>(in, weights, nullptr);
  });
  LossBreakdown total;
  for (const auto& p : parts) total += p;
  return total;
}

LossBreakdown evaluate_projector(const Projector<float>& projector, const ProjectorData& data,
                                 const LossWeights& weights) {
  if (data.size() == 0) return {};
  const Tensor params_hat = projector.forward(data.mu);
  ObjectiveInputs<float> in;
  in.params_hat = &params_hat;
  in.params_t = &data.params_t;
  in.params_prev = &data.params_prev;
  return evaluate_objective<float>(in, weights, nullptr);
}

namespace {

ProjectorData encode_samples(const VaeModel<float>& model, std::span<const WindowSample> samples,
                             std::size_t threads) {
  ProjectorData d;
  const std::size_t D = model.config().latent_dim;
  d.mu = Tensor({samples.size(), D});
  d.logvar = Tensor({samples.size(), D});
  std::tie(d.params_t, d.params_prev) = label_tensors(samples);
  const std::size_t n_chunks = (samples.size() + kEvalChunk - 1) / kEvalChunk;
  parallel_for(n_chunks, threads, [&](std::size_t c) {
    const std::size_t begin = c * kEvalChunk;
    const auto chunk = samples.subspan(begin, std::min(kEvalChunk, samples.size() - begin));
    const auto [mu, logvar] = model.encode(mel_tensor(chunk));
    std::copy(mu.data.begin(), mu.data.end(), d.mu.ptr() + begin * D);
    std::copy(logvar.data.begin(), logvar.data.end(), d.logvar.ptr() + begin * D);
  });
  return d;
}

}  // namespace

ProjectorTrainResult train_projector(const ProjectorData& train, const ProjectorData& validation,
                                     Projector<float> init, const TrainConfig& config, double fixed_mel_mse,
                                     double fixed_kl, const EpochCallback& on_epoch) {
  config.validate();
  const std::size_t N = train.size();
  if (N == 0) throw std::invalid_argument("train_projector: empty training set");
  if (train.mu.dim(1) != init.config().input_dim) {
    throw std::invalid_argument("train_projector: inputs have width " + std::to_string(train.mu.dim(1)) +
                                ", projector expects " + std::to_string(init.config().input_dim));
  }
  const bool sample = !train.logvar.data.empty();
  if (sample) nn::require_same_shape("train_projector logvar", train.logvar.shape, train.mu.shape);

  ProjectorTrainResult result{std::move(init), {}};
  Projector<float>& proj = result.projector;
  Projector<float> grad = proj.zeros_like();
  std::vector<nn::Tensor<float>*> params, grad_params;
  for (auto& [n, t] : proj.named_params("")) params.push_back(t);
  for (auto& [n, t] : grad.named_params("")) grad_params.push_back(t);
  const std::vector<const nn::Tensor<float>*> grads_const(grad_params.begin(), grad_params.end());

  nn::Adam<float> adam({config.lr});
  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 shuffle_rng(derive_seed(config.seed, 1));
  std::mt19937_64 eps_rng(derive_seed(config.seed, 2));
  const std::size_t D = train.mu.dim(1);

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double train_loss = 0;
    for (std::size_t start = 0; start < N; start += config.batch_size) {
      const std::span<const std::size_t> rows(order.data() + start, std::min(config.batch_size, N - start));
      Tensor z = gather_rows(train.mu, rows);
      if (sample) {
        const Tensor lv = gather_rows(train.logvar, rows);
        const Tensor eps = normal_tensor(eps_rng, rows.size(), D);
        for (std::size_t i = 0; i < z.size(); ++i) z[i] += std::exp(0.5f * lv[i]) * eps[i];
      }
      const Tensor pt = gather_rows(train.params_t, rows), pp = gather_rows(train.params_prev, rows);
      const auto trace = proj.forward_trace(std::move(z));
      ObjectiveInputs<float> in;
      in.params_hat = &trace.out[3];
      in.params_t = &pt;
      in.params_prev = &pp;
      ObjectiveGrads<float> g;
      const LossBreakdown b = evaluate_objective<float>(in, config.loss, &g);
      check_finite(b, epoch);
      train_loss += b.total * static_cast<double>(rows.size());
      for (auto* t : grad_params) t->zero();
      proj.backward(trace, g.params_hat, grad, false);
      adam.step(params, grads_const);
    }
    LossBreakdown val = evaluate_projector(proj, validation.size() ? validation : train, config.loss);
    val.mel_mse = fixed_mel_mse;
    val.kl = fixed_kl;
    result.curves.push_back(metrics_from(val, epoch, train_loss / static_cast<double>(N)));
    if (on_epoch) on_epoch(result.curves.back());
  }
  return result;
}

TrainResult train_vae(const DatasetSplit& data, const TrainConfig& config, TrainMode mode,
                      const VaeModel<float>* init, const EpochCallback& on_epoch) {
  config.validate();
  if (data.train.empty()) throw std::invalid_argument("train: empty training split");
  const std::span<const WindowSample> validation =
      data.validation.empty() ? std::span<const WindowSample>(data.train) : std::span<const WindowSample>(data.validation);

  if (mode == TrainMode::frozen_projector) {
    if (init == nullptr) throw std::invalid_argument("frozen_projector mode needs a trained VAE to start from");
    TrainResult result{*init, {}};
    const ProjectorData train_latents = encode_samples(*init, data.train, config.threads);
    ProjectorData val_latents = encode_samples(*init, validation, config.threads);
    val_latents.logvar = {};
    const LossBreakdown fixed = evaluate_vae(*init, validation, config.loss, config.threads);
    Projector<float> fresh = VaeModel<float>::create(init->config(), derive_seed(config.seed, 0)).projector;
    auto proj = train_projector(train_latents, val_latents, std::move(fresh), config, fixed.mel_mse, fixed.kl,
                                on_epoch);
    result.model.projector = std::move(proj.projector);
    result.curves = std::move(proj.curves);
    return result;
  }

  TrainResult result{init ? *init : VaeModel<float>::create(config.model, derive_seed(config.seed, 0)), {}};
  VaeModel<float>& model = result.model;
  if (data.train.front().mel.size() != model.config().input_dim) {
    throw std::invalid_argument("train: mel frames have " + std::to_string(data.train.front().mel.size()) +
                                " bins, model expects " + std::to_string(model.config().input_dim));
  }

  LossWeights weights = config.loss;
  std::vector<ParamGroup> groups{ParamGroup::encoder, ParamGroup::reconstruction, ParamGroup::projector};
  if (mode == TrainMode::vae_only) {
    weights.beta_t.fill(0.0);
    weights.beta_prev.fill(0.0);
    groups.pop_back();
  }

  const std::size_t workers = std::max<std::size_t>(1, std::min(config.threads, config.batch_size));
  std::vector<VaeModel<float>> grads;
  std::vector<std::vector<nn::Tensor<float>*>> grad_params;
  for (std::size_t w = 0; w < workers; ++w) grads.push_back(model.zeros_like());
  for (auto& g : grads) grad_params.push_back(params_of(g, groups));
  const std::vector<nn::Tensor<float>*> params = params_of(model, groups);
  const std::vector<const nn::Tensor<float>*> grads_const(grad_params[0].begin(), grad_params[0].end());

  const Tensor mel_all = mel_tensor(data.train);
  const auto [pt_all, pp_all] = label_tensors(data.train);
  const std::size_t N = data.train.size(), D = model.config().latent_dim;

  nn::Adam<float> adam({config.lr});
  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 shuffle_rng(derive_seed(config.seed, 1));
  std::mt19937_64 eps_rng(derive_seed(config.seed, 2));

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double train_loss = 0;
    for (std::size_t start = 0; start < N; start += config.batch_size) {
      const std::span<const std::size_t> rows(order.data() + start, std::min(config.batch_size, N - start));
      const std::size_t B = rows.size();
      const Tensor mel = gather_rows(mel_all, rows);
      const Tensor pt = gather_rows(pt_all, rows), pp = gather_rows(pp_all, rows);
      const Tensor eps = normal_tensor(eps_rng, B, D);

      const auto ranges = shard_ranges(B, std::min(workers, B));
      std::vector<LossBreakdown> parts(ranges.size());
      parallel_for(ranges.size(), workers, [&](std::size_t s) {
        const auto [b0, b1] = ranges[s];
        for (auto* t : grad_params[s]) t->zero();
        const Tensor x = slice_rows(mel, b0, b1), e = slice_rows(eps, b0, b1);
        const Tensor st = slice_rows(pt, b0, b1), sp = slice_rows(pp, b0, b1);
        const auto trace = model.forward(x, &e);
        const Tensor recon = trace.dec.back().reshaped({b1 - b0, model.config().input_dim});
        const ObjectiveInputs<float> in{&x, &recon, &trace.mu, &trace.logvar, &trace.projector.out[3], &st, &sp, B};
        ObjectiveGrads<float> g;
        parts[s] = evaluate_objective<float>(in, weights, &g);
        check_finite(parts[s], epoch);
        typename VaeModel<float>::OutputGrads og{std::move(g.recon), std::move(g.params_hat), std::move(g.mu),
                                                 std::move(g.logvar)};
        model.backward(trace, og, grads[s], groups);
      });
      for (std::size_t s = 1; s < ranges.size(); ++s) {
        for (std::size_t j = 0; j < grad_params[0].size(); ++j) {
          auto& dst = grad_params[0][j]->data;
          const auto& src = grad_params[s][j]->data;
          for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
        }
      }
      for (const auto& p : parts) train_loss += p.total * static_cast<double>(B);
      adam.step(params, grads_const);
    }
    const LossBreakdown val = evaluate_vae(model, validation, weights, config.threads);
    check_finite(val, epoch);
    result.curves.push_back(metrics_from(val, epoch, train_loss / static_cast<double>(N)));
    if (on_epoch) on_epoch(result.curves.back());
  }
  return result;
}

void write_curves_csv(const std::filesystem::path& path, std::span<const EpochMetrics> curves) {
  std::ostringstream out;
  out << "epoch,mel_mse_val,param_huber_val,param_mse_val,kl_val\n";
  char line[256];
  for (const auto& m : curves) {
    std::snprintf(line, sizeof(line), "%zu,%.9g,%.9g,%.9g,%.9g\n", m.epoch, m.mel_mse_val, m.param_huber_val,
                  m.param_mse_val, m.kl_val);
    out << line;
  }
  const std::string text = out.str();
  io::write_atomically(path, [&](std::ostream& o) { o << text; });
}

std::vector<EpochMetrics> read_curves_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("epoch,mel_mse_val", 0) != 0) {
    throw std::runtime_error(path.string() + ": not a curves file");
  }
  std::vector<EpochMetrics> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    EpochMetrics m;
    if (std::sscanf(line.c_str(), "%zu,%lf,%lf,%lf,%lf", &m.epoch, &m.mel_mse_val, &m.param_huber_val,
                    &m.param_mse_val, &m.kl_val) != 5) {
      throw std::runtime_error(path.string() + ": malformed row '" + line + "'");
    }
    out.push_back(m);
  }
  return out;
}

}  // namespace ptinv
