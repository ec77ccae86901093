#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "grad_suites.hpp"
#include "loss_checks.hpp"
#include "ptinv/data/generate.hpp"
#include "ptinv/model/embedding_file.hpp"
#include "ptinv/model/embedding_trainer.hpp"
#include "ptinv/model/inverter.hpp"
#include "ptinv/model/objective.hpp"
#include "ptinv/model/slerp.hpp"
#include "ptinv/model/trainer.hpp"
#include "ptinv/model/vae.hpp"
#include "ptinv/synth/synthesizer.hpp"

using namespace ptinv;
namespace fs = std::filesystem;
using Catch::Approx;
using TD = nn::Tensor<double>;
using TF = nn::Tensor<float>;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "ptinv_test_model" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Synthetic windows whose labels are simple functions of the frame, so a
// model can learn them quickly.
DatasetSplit toy_split(std::size_t n_train, std::size_t n_val, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0, 1);
  DatasetSplit d;
  auto make = [&](std::size_t n, std::uint32_t file0) {
    std::vector<WindowSample> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto& s = out[i];
      std::array<float, kNumParams> p{};
      for (auto& v : p) v = u(rng);
      s.mel.resize(128);
      for (std::size_t b = 0; b < 128; ++b) {
        const float bump = p[b % kNumParams] * std::exp(-float((b / 21) % 3));
        s.mel[b] = std::clamp(0.5f * bump + 0.3f + 0.05f * u(rng), 0.0f, 1.0f);
      }
      s.params_t = p;
      s.params_prev = p;
      s.file_id = file0 + static_cast<std::uint32_t>(i / 66);
      s.window_index = static_cast<std::uint16_t>(i % 66);
    }
    return out;
  };
  d.train = make(n_train, 0);
  d.validation = make(n_val, 1000);
  d.stats.min.assign(128, -10.0);
  d.stats.max.assign(128, 0.0);
  return d;
}

TrainConfig quick_config(std::size_t epochs) {
  TrainConfig c;
  c.epochs = epochs;
  c.batch_size = 32;
  c.seed = 5;
  return c;
}

bool same_bytes(const std::vector<std::pair<std::string, nn::Tensor<float>*>>& a,
                const std::vector<std::pair<std::string, nn::Tensor<float>*>>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a[i].second->data;
    const auto& y = b[i].second->data;
    if (x.size() != y.size() || std::memcmp(x.data(), y.data(), x.size() * sizeof(float)) != 0) return false;
  }
  return true;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("default architecture shapes", "[model]") {
  const VaeConfig cfg;
  CHECK(cfg.lengths() == std::vector<std::size_t>{128, 64, 32, 16});
  auto model = VaeModel<float>::create(cfg, 1);
  std::mt19937_64 rng(2);
  TF mel({5, 128});
  for (auto& v : mel.data) v = std::uniform_real_distribution<float>(0, 1)(rng);
  TF eps({5, 64});
  for (auto& v : eps.data) v = std::normal_distribution<float>(0, 1)(rng);
  const auto t = model.forward(mel, &eps);
  CHECK(t.mu.shape == std::vector<std::size_t>{5, 64});
  CHECK(t.dec.back().size() == mel.size());
  for (float p : t.projector.out[3].data) {
    CHECK(p > 0.0f);
    CHECK(p < 1.0f);
  }
  const auto again = model.forward(mel, &eps);
  CHECK(again.projector.out[3] == t.projector.out[3]);
  CHECK(again.dec.back() == t.dec.back());

  VaeConfig odd;
  odd.input_dim = 100;  // odd lengths are mirrored with output padding
  CHECK_NOTHROW(odd.validate());
  VaeConfig bad;
  bad.latent_dim = 32;  // projector still expects 64
  CHECK_THROWS(bad.validate());
  VaeConfig no_stride;
  no_stride.stride = 0;
  CHECK_THROWS(no_stride.validate());
  CHECK_THROWS(model.forward(TF({2, 127}), nullptr));
}

TEST_CASE("objective zero point and ELBO-only value", "[model]") {
  const std::size_t B = 3, M = 16, D = 4;
  std::mt19937_64 rng(3);
  TD mel = gradcheck::random_tensor({B, M}, rng, 0, 1);
  TD p = gradcheck::random_tensor({B, 6}, rng, 0, 1);
  TD zeros({B, D}, 0.0);
  const ObjectiveInputs<double> perfect{&mel, &mel, &zeros, &zeros, &p, &p, &p, 0};
  ObjectiveGrads<double> g;
  const auto b = evaluate_objective(perfect, LossWeights{}, &g);
  CHECK(b.total == 0.0);
  for (double v : g.recon.data) CHECK(v == 0.0);
  for (double v : g.params_hat.data) CHECK(v == 0.0);

  TD recon = gradcheck::random_tensor({B, M}, rng, 0, 1);
  TD mu = gradcheck::random_tensor({B, D}, rng, -1, 1), lv = gradcheck::random_tensor({B, D}, rng, -1, 1);
  TD ph = gradcheck::random_tensor({B, 6}, rng, 0, 1);
  LossWeights w;
  w.beta_t.fill(0.0);
  w.beta_prev.fill(0.0);
  w.beta_kl = 0.01;
  const ObjectiveInputs<double> in{&mel, &recon, &mu, &lv, &ph, &p, &p, 0};
  const auto e = evaluate_objective<double>(in, w, nullptr);

  // Plain beta-VAE ELBO, batch-averaged: mean squared error + beta * KL.
  double mse = 0, kl = 0;
  for (std::size_t i = 0; i < B * M; ++i) mse += (recon[i] - mel[i]) * (recon[i] - mel[i]);
  for (std::size_t i = 0; i < B * D; ++i) kl += -0.5 * (1 + lv[i] - mu[i] * mu[i] - std::exp(lv[i]));
  const double elbo = mse / double(B * M) + w.beta_kl * kl / double(B);
  CHECK(e.total == Approx(elbo).epsilon(1e-12));
  CHECK(e.param_t == 0.0);
  CHECK(e.param_prev == 0.0);
  CHECK(e.total == Approx(e.elbo_recon + e.elbo_kl + e.param_t + e.param_prev).epsilon(1e-12));
}

TEST_CASE("objective and model gradients match finite differences", "[model]") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto a = grad_suites::objective_case(seed);
    const auto m = grad_suites::model_case(seed);
    INFO("seed " << seed << " objective worst " << a.worst << " model worst " << m.worst);
    CHECK(a.max_rel_error < gradcheck::kTolerance);
    CHECK(m.max_rel_error < gradcheck::kTolerance);
  }
}

TEST_CASE("term ablations zero the matching head gradients", "[model]") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto r = loss_checks::head_ablation(seed);
    INFO("seed " << seed);
    CHECK(r.projector_without_param_terms.max_abs == 0.0);
    CHECK(r.recon_without_elbo.max_abs == 0.0);
    CHECK(r.recon_without_param_terms.max_abs > 0.0);
    CHECK(r.projector_without_elbo.max_abs > 0.0);
  }
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto z = loss_checks::zero_point(seed);
    CHECK(z.total == 0.0);
    CHECK(z.max_abs_grad == 0.0);
  }
}

TEST_CASE("training modes, freezing and curves", "[model]") {
  const auto data = toy_split(256, 64, 1);
  auto cfg = quick_config(3);

  auto vae = train_vae(data, cfg, TrainMode::vae_only);
  REQUIRE(vae.curves.size() == 3);
  auto frozen_input = vae.model;
  auto split = train_vae(data, cfg, TrainMode::frozen_projector, &frozen_input);
  CHECK(same_bytes(split.model.named_params(ParamGroup::encoder), frozen_input.named_params(ParamGroup::encoder)));
  CHECK(same_bytes(split.model.named_params(ParamGroup::reconstruction),
                   frozen_input.named_params(ParamGroup::reconstruction)));
  CHECK_FALSE(same_bytes(split.model.named_params(ParamGroup::projector),
                         frozen_input.named_params(ParamGroup::projector)));
  CHECK_THROWS(train_vae(data, cfg, TrainMode::frozen_projector, nullptr));

  const auto path = scratch("curves") / "c.csv";
  write_curves_csv(path, split.curves);
  std::ifstream in(path);
  std::string header, line;
  std::getline(in, header);
  CHECK(header == "epoch,mel_mse_val,param_huber_val,param_mse_val,kl_val");
  int rows = 0;
  while (std::getline(in, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == 4);
    ++rows;
  }
  CHECK(rows == 3);
  const auto back = read_curves_csv(path);
  REQUIRE(back.size() == 3);
  CHECK(back[2].param_mse_val == Approx(split.curves[2].param_mse_val).epsilon(1e-8));
}

TEST_CASE("training is reproducible for a fixed seed and thread count", "[model]") {
  const auto data = toy_split(200, 40, 2);
  auto cfg = quick_config(2);
  cfg.threads = 2;
  auto a = train_vae(data, cfg, TrainMode::joint);
  auto b = train_vae(data, cfg, TrainMode::joint);
  CHECK(same_bytes(a.model.named_params(), b.model.named_params()));
  cfg.seed = 6;
  auto c = train_vae(data, cfg, TrainMode::joint);
  CHECK_FALSE(same_bytes(a.model.named_params(), c.model.named_params()));
}

TEST_CASE("a non-finite loss names the epoch and term", "[model]") {
  auto data = toy_split(64, 16, 3);
  data.train[5].mel[7] = std::numeric_limits<float>::quiet_NaN();
  try {
    (void)train_vae(data, quick_config(2), TrainMode::joint);
    FAIL("expected a throw");
  } catch (const std::runtime_error& e) {
    const std::string what = e.what();
    CHECK(what.find("epoch 1") != std::string::npos);
    CHECK(what.find("non-finite") != std::string::npos);
  }
}

TEST_CASE("joint training learns the toy mapping", "[model]") {
  const auto data = toy_split(1024, 256, 4);
  auto cfg = quick_config(15);
  const auto r = train_vae(data, cfg, TrainMode::joint);
  double best = 1e9;
  for (const auto& m : r.curves) best = std::min(best, m.param_mse_val);
  INFO("epoch 1 " << r.curves.front().param_mse_val << " best " << best);
  CHECK(best < 0.5 * r.curves.front().param_mse_val);
}

TEST_CASE("inference model save, load and predict", "[model]") {
  const auto data = toy_split(128, 32, 5);
  auto trained = train_vae(data, quick_config(1), TrainMode::joint);
  const InversionModel model(trained.model, data.stats, MelConfig{});
  const auto path = scratch("infer") / "m.ptck";
  model.save(path, {{"note", 1}});
  const auto loaded = InversionModel::load(path);

  const auto clip = synthesize(ParamTrack::constant(PTParams()), 1.0, 48000.0, 1);
  const auto a = model.predict(clip);
  const auto b = loaded.predict(clip);
  REQUIRE(a.size() == 66);
  CHECK(a.dump() == b.dump());
  CHECK(predict_params(clip, loaded).dump() == a.dump());
  CHECK(a.breakpoints()[1].time == Approx(0.015));
  for (const auto& bp : a.breakpoints()) {
    for (std::size_t i = 0; i < kNumParams; ++i) CHECK(kParamRanges[i].contains(bp.params.values()[i]));
  }

  CHECK(resample(clip, 16000.0).samples.size() == 16000);
  CHECK(model.predict(resample(clip, 16000.0)).size() == 66);
  AudioClip shorty = clip;
  shorty.samples.resize(700);
  CHECK_THROWS_AS(model.predict(shorty), std::invalid_argument);

  nn::Checkpoint no_stats = nn::Checkpoint::load(path);
  no_stats.header.erase("normalizer");
  CHECK_THROWS(InversionModel::from_checkpoint(no_stats));
}

TEST_CASE("slerp resize contracts", "[model]") {
  std::mt19937_64 rng(7);
  std::vector<double> v(12);
  for (auto& x : v) x = std::normal_distribution<double>(0, 1)(rng);
  const auto same = slerp_resize(v, 12);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(same[i] == Approx(v[i]).margin(1e-12));

  double norm = 0;
  for (double x : v) norm += x * x;
  for (std::size_t t : {2u, 5u, 64u, 300u}) {
    const auto r = slerp_resize(v, t);
    REQUIRE(r.size() == t);
    double n2 = 0;
    for (double x : r) n2 += x * x;
    CHECK(std::sqrt(n2) == Approx(std::sqrt(norm)).margin(1e-9));
    const auto scaled = slerp_resize(std::vector<double>(v.begin(), v.end()), t);
    std::vector<double> v3(v);
    for (auto& x : v3) x *= 3.5;
    const auto r3 = slerp_resize(v3, t);
    for (std::size_t i = 0; i < t; ++i) CHECK(r3[i] == Approx(3.5 * scaled[i]).margin(1e-9));
  }

  const auto ones = slerp_resize(std::vector<double>(8, 1.0), 4);
  for (double x : ones) CHECK(x == Approx(std::sqrt(2.0)).margin(1e-12));
  for (double x : slerp_resize(std::vector<double>(5, 0.0), 3)) CHECK(x == 0.0);
  CHECK_THROWS(slerp_resize(std::vector<double>{1.0}, 4));
  CHECK_THROWS(slerp_resize(std::vector<double>{1.0, 2.0}, 1));
}

TEST_CASE("embedding file format", "[model]") {
  const auto dir = scratch("pteb");
  EmbeddingFile e;
  e.model = EmbeddingModel::encodec;
  e.source_dim = 128;
  e.frame_hop = 1.0 / 75.0;
  e.n_frames = 3;
  e.data.resize(3 * 128);
  for (std::size_t i = 0; i < e.data.size(); ++i) e.data[i] = float(i) * 0.01f;
  e.save(dir / "a.pteb");
  const auto back = EmbeddingFile::load(dir / "a.pteb");
  CHECK(back.source_dim == 128);
  CHECK(back.data == e.data);
  CHECK(slurp(dir / "a.pteb").substr(0, 4) == "PTEB");
  CHECK(expected_source_dim(EmbeddingModel::wav2vec) == 768);
  CHECK(expected_source_dim(EmbeddingModel::encodec) == 128);
  CHECK(back.nearest_frame(0.0) == 0);
  CHECK(back.nearest_frame(0.02) == 1);
  CHECK(back.nearest_frame(10.0) == 2);

  EmbeddingFile w = e;
  w.model = EmbeddingModel::wav2vec;
  CHECK_THROWS(w.validate());
  w.source_dim = 768;
  w.data.assign(3 * 768, 0.0f);
  w.save(dir / "w.pteb");
  CHECK(EmbeddingFile::load(dir / "w.pteb").source_dim == 768);

  // Header claims more frames than the body holds.
  auto bytes = slurp(dir / "a.pteb");
  bytes.resize(bytes.size() - 4);
  std::ofstream(dir / "short.pteb", std::ios::binary) << bytes;
  try {
    (void)EmbeddingFile::load(dir / "short.pteb");
    FAIL("expected a throw");
  } catch (const std::exception& ex) {
    CHECK(std::string(ex.what()).find("short.pteb") != std::string::npos);
  }
}

TEST_CASE("projector trains on synthetic embedding fixtures", "[model]") {
  const auto dir = scratch("embed");
  DatasetSpec spec;
  spec.kind = DatasetKind::static_vowel;
  spec.n_files = 10;
  spec.seed = 3;
  const auto manifest = generate_dataset(spec, dir / "data");

  // Fake encoder output: 50 frames/s whose leading entries encode the labels.
  std::mt19937_64 rng(1);
  std::vector<fs::path> files;
  for (const auto& entry : manifest.files) {
    const auto track = ParamTrack::load(manifest.resolve(entry.track_json).string());
    EmbeddingFile e;
    e.model = EmbeddingModel::encodec;
    e.source_dim = 128;
    e.frame_hop = 0.02;
    e.n_frames = 50;
    e.data.resize(50 * 128);
    for (std::size_t f = 0; f < 50; ++f) {
      const auto u = track.at(f * 0.02).normalized();
      for (std::size_t d = 0; d < 128; ++d) {
        e.data[f * 128 + d] = float(u[d % kNumParams] + 0.5 + 0.01 * std::normal_distribution<double>(0, 1)(rng));
      }
    }
    files.push_back(dir / (fs::path(entry.wav).stem().string() + ".pteb"));
    e.save(files.back());
  }

  auto cfg = quick_config(20);
  const auto r = train_projector_on_embeddings(files, manifest, cfg);
  CHECK(r.model_tag == EmbeddingModel::encodec);
  REQUIRE(r.curves.size() == 20);
  CHECK(r.curves.back().param_mse_val < r.curves.front().param_mse_val);

  auto projector = r.projector;
  const auto ck = projector_checkpoint(projector, {{"embedding_model", "encodec"}});
  const auto back = projector_from_checkpoint(ck);
  TF x({1, 64}, 0.3f);
  CHECK(back.forward(x) == r.projector.forward(x));

  // A wav2vec file mixed in is rejected, as is a file without a matching clip.
  EmbeddingFile w;
  w.model = EmbeddingModel::wav2vec;
  w.source_dim = 768;
  w.frame_hop = 0.02;
  w.n_frames = 2;
  w.data.assign(2 * 768, 0.1f);
  fs::create_directories(dir / "w2v");
  auto mixed = files;
  mixed.push_back(dir / "w2v" / "static_00001.pteb");
  w.save(mixed.back());
  CHECK_THROWS(train_projector_on_embeddings(mixed, manifest, cfg));
  auto orphan = std::vector<fs::path>{files[0], dir / "nobody.pteb"};
  EmbeddingFile o = EmbeddingFile::load(files[0]);
  o.save(orphan[1]);
  CHECK_THROWS(train_projector_on_embeddings(orphan, manifest, cfg));
}
