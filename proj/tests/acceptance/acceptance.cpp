// Acceptance run: one PASS/FAIL line per criterion.
//
// The process exits 0 once every criterion has been evaluated, whatever the
// verdicts; --strict turns any FAIL into exit code 1. A crash or exception is
// always a non-zero exit.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dsp_checks.hpp"
#include "grad_suites.hpp"
#include "loss_checks.hpp"
#include "ptinv/data/generate.hpp"
#include "ptinv/data/windowing.hpp"
#include "ptinv/eval/ablation.hpp"
#include "ptinv/eval/error_stats.hpp"
#include "ptinv/eval/round_trip.hpp"
#include "ptinv/eval/window_eval.hpp"
#include "ptinv/model/inverter.hpp"
#include "ptinv/model/trainer.hpp"
#include "ptinv/synth/audio.hpp"
#include "ptinv/util/parallel.hpp"
#include "ptinv/util/seed.hpp"

using namespace ptinv;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Options {
  fs::path work;
  std::size_t files = 500;
  std::size_t epochs = 15;
  double lr = 1e-4;
  std::size_t batch = 64;
  std::size_t threads = 1;
  std::uint64_t seed = 2024;
  std::size_t clips = 50;
  bool strict = false;
};

TrainConfig train_config(const Options& o) {
  TrainConfig c;
  c.epochs = o.epochs;
  c.lr = o.lr;
  c.batch_size = o.batch;
  c.threads = o.threads;
  c.seed = derive_seed(o.seed, 100);
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return quantile_sorted(v, 0.5);
}

// One corpus kind, generated, windowed and trained jointly once and shared by
// the criteria that need it.
struct KindRun {
  DatasetKind kind{};
  Manifest manifest;
  DatasetSplit data;
  TrainResult joint;
  ErrorSamples errors;
  std::array<double, kNumParams> medians{};
  double pooled_median = 0;
  double seconds = 0;
};

KindRun run_kind(const Options& o, DatasetKind kind, std::uint64_t stream) {
  const auto t0 = Clock::now();
  KindRun r;
  r.kind = kind;
  DatasetSpec spec;
  spec.kind = kind;
  spec.n_files = o.files;
  spec.seed = derive_seed(o.seed, stream);
  const fs::path dir = o.work / std::string(to_string(kind));
  fs::remove_all(dir);
  r.manifest = generate_dataset(spec, dir, o.threads);
  WindowingOptions w;
  w.split_seed = derive_seed(o.seed, stream + 1);
  w.threads = o.threads;
  r.data = window_dataset(r.manifest, MelConfig{}, w);
  r.joint = train_vae(r.data, train_config(o), TrainMode::joint);
  const InversionModel model(r.joint.model, r.data.stats, r.data.mel_config);
  r.errors = window_errors(model, r.data.validation, r.data.stats, o.threads);
  std::vector<double> pooled;
  for (std::size_t p = 0; p < kNumParams; ++p) {
    r.medians[p] = median_of(r.errors[p]);
    pooled.insert(pooled.end(), r.errors[p].begin(), r.errors[p].end());
  }
  r.pooled_median = median_of(pooled);
  r.seconds = seconds_since(t0);
  std::fprintf(stderr, "[%s] %zu files, %zu epochs, %.0f s; pooled median %.4f\n", std::string(to_string(kind)).c_str(),
               o.files, o.epochs, r.seconds, r.pooled_median);
  return r;
}

Verdict dsp_correctness() {
  const double refl = dsp_checks::reflection_max_error(1);
  double bypass = 0;
  for (std::uint64_t s : {1u, 2u, 3u}) bypass = std::max(bypass, dsp_checks::bypass_max_deviation(s));
  const auto f0 = dsp_checks::f0_random_vowels(99);
  const auto f1 = dsp_checks::f1_open_vs_close();
  const bool ok = refl < 1e-12 && bypass < 1e-9 && f0.max_rel_error < 0.01 && f1.close_f1 > 0 && f1.open_f1 > f1.close_f1;
  return {ok, fmt("reflection err %.1e, bypass dev %.1e, f0 worst rel err %.4f, F1 open %.0f Hz > close %.0f Hz", refl,
                  bypass, f0.max_rel_error, f1.open_f1, f1.close_f1)};
}

Verdict gradient_integrity() {
  gradcheck::Result worst;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    for (const auto& r : {grad_suites::dense_case(seed), grad_suites::conv_case(seed),
                          grad_suites::conv_transpose_case(seed), grad_suites::activation_case(seed),
                          grad_suites::loss_primitives_case(seed), grad_suites::objective_case(seed),
                          grad_suites::model_case(seed)}) {
      gradcheck::merge(worst, r);
    }
  }
  return {worst.max_rel_error < gradcheck::kTolerance,
          fmt("20 seeds, worst rel err %.2e (%s)", worst.max_rel_error, worst.worst.c_str())};
}

Verdict loss_semantics() {
  bool ok = true;
  double zero_total = 0, zero_grad = 0, ablated = 0, live = 1e300;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto z = loss_checks::zero_point(seed);
    zero_total = std::max(zero_total, std::abs(z.total));
    zero_grad = std::max(zero_grad, z.max_abs_grad);
    const auto h = loss_checks::head_ablation(seed);
    ablated = std::max({ablated, h.projector_without_param_terms.max_abs, h.recon_without_elbo.max_abs});
    live = std::min({live, h.recon_without_param_terms.max_abs, h.projector_without_elbo.max_abs});
  }
  ok = zero_total == 0.0 && zero_grad == 0.0 && ablated == 0.0 && live > 0.0;
  const auto kl = loss_checks::kl_monte_carlo(12);
  const double z = std::abs(kl.mean - kl.closed) / kl.standard_error;
  ok = ok && z < 3.0;
  return {ok, fmt("zero point loss %.1e grad %.1e; ablated head grad %.1e (other heads >= %.1e); KL MC %.1f SE", zero_total,
                  zero_grad, ablated, live, z)};
}

Verdict desk_inversion(const KindRun& s, double budget_seconds) {
  const auto& m = s.medians;
  bool ok = s.seconds < budget_seconds;
  std::string d;
  for (std::size_t p = 0; p < kNumParams; ++p) {
    ok = ok && m[p] < 0.15;
    d += fmt("%s %.3f, ", std::string(kParamNames[p]).c_str(), m[p]);
  }
  const bool tongue = m[index_of(Param::tongue_diameter)] < m[index_of(Param::tongue_index)];
  const bool constr = m[index_of(Param::constriction_diameter)] < m[index_of(Param::constriction_index)];
  ok = ok && tongue && constr;
  d += fmt("diameter<index tongue %s constriction %s; %.0f s", tongue ? "yes" : "no", constr ? "yes" : "no", s.seconds);
  return {ok, d};
}

Verdict difficulty(const KindRun& st, const KindRun& li, const KindRun& sp) {
  const bool ok = st.pooled_median <= li.pooled_median && li.pooled_median <= sp.pooled_median + 0.02;
  return {ok, fmt("pooled medians static %.4f, linear %.4f, step100ms %.4f", st.pooled_median, li.pooled_median,
                  sp.pooled_median)};
}

Verdict ablation(const Options& o, const KindRun& s) {
  const auto cfg = train_config(o);
  const auto vae = train_vae(s.data, cfg, TrainMode::vae_only);
  const auto split = train_vae(s.data, cfg, TrainMode::frozen_projector, &vae.model);
  const auto report = ablation_report(s.joint.curves, split.curves, vae.curves);
  const double joint = s.joint.curves.back().param_huber_val, frozen = split.curves.back().param_huber_val;
  const double rel = std::abs(frozen - joint) / joint;
  return {rel <= 0.2, fmt("final param huber joint %.5f, frozen projector %.5f (%.1f%% apart, ratio %.3f)", joint, frozen,
                          100.0 * rel, report.final_huber_ratio)};
}

Verdict round_trip_superiority(const Options& o, const KindRun& s) {
  const InversionModel model(s.joint.model, s.data.stats, s.data.mel_config);
  std::vector<std::uint32_t> ids = s.data.validation_files;
  ids.resize(std::min(ids.size(), o.clips));
  RoundTripReport rep;
  rep.clips.resize(ids.size());
  parallel_for(ids.size(), o.threads, [&](std::size_t i) {
    const auto& e = s.manifest.files.at(ids[i]);
    rep.clips[i] = round_trip(read_wav(s.manifest.resolve(e.wav).string()), model, derive_seed(o.seed, 500 + ids[i]),
                              s.manifest.spec.sampling);
  });
  std::vector<double> m, b;
  for (const auto& c : rep.clips) {
    m.push_back(c.model_db);
    b.push_back(c.baseline_db);
  }
  const bool ok = ids.size() == o.clips && rep.win_rate() >= 0.9;
  return {ok, fmt("model beats baseline on %.0f%% of %zu clips (median %.2f dB vs %.2f dB)", 100.0 * rep.win_rate(),
                  ids.size(), median_of(m), median_of(b))};
}

Verdict speed(const KindRun& s) {
  const InversionModel model(s.joint.model, s.data.stats, s.data.mel_config);
  const auto clip = synthesize(ParamTrack::constant(PTParams()), 1.0, 48000.0, 1);
  double worst = 0;
  for (int k = 0; k < 5; ++k) {
    const auto t0 = Clock::now();
    const auto track = predict_params(clip, model);
    worst = std::max(worst, seconds_since(t0));
    if (track.size() != 66) return {false, fmt("predicted %zu windows", track.size())};
  }
  return {worst < 1.0, fmt("predict_params on 1 s: worst of 5 runs %.3f s", worst)};
}

Verdict determinism(const Options& o) {
  const fs::path dir = o.work / "determinism";
  fs::remove_all(dir);
  DatasetSpec spec;
  spec.kind = DatasetKind::step100ms;
  spec.n_files = 12;
  spec.seed = derive_seed(o.seed, 900);
  const auto ma = generate_dataset(spec, dir / "a", 1);
  const auto mb = generate_dataset(spec, dir / "b", 2);
  bool data_same = ma.dump() == mb.dump();
  for (const auto& e : ma.files) {
    data_same = data_same && slurp(ma.resolve(e.wav)) == slurp(mb.resolve(e.wav)) &&
                slurp(ma.resolve(e.track_json)) == slurp(mb.resolve(e.track_json));
  }

  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.seed = 7;
  cfg.threads = o.threads;
  const auto da = window_dataset(ma), db = window_dataset(mb);
  auto ta = train_vae(da, cfg, TrainMode::joint);
  auto tb = train_vae(db, cfg, TrainMode::joint);
  const InversionModel a(ta.model, da.stats, da.mel_config), b(tb.model, db.stats, db.mel_config);
  a.save(dir / "a.ptck");
  b.save(dir / "b.ptck");
  const bool model_same = slurp(dir / "a.ptck") == slurp(dir / "b.ptck");

  const auto clip = read_wav(ma.resolve(ma.files[0].wav).string());
  const bool infer_same = predict_params(clip, a).dump() == predict_params(clip, a).dump() &&
                          predict_params(clip, a).dump() == predict_params(clip, b).dump();
  return {data_same && model_same && infer_same,
          fmt("dataset files %s, checkpoints %s, predictions %s", data_same ? "identical" : "DIFFER",
              model_same ? "identical" : "DIFFER", infer_same ? "identical" : "DIFFER")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  Options o;
  std::string work = "acceptance_work", report;
  app.add_option("--work", work, "Scratch directory for generated corpora");
  app.add_option("--files", o.files, "Files per corpus");
  app.add_option("--epochs", o.epochs, "Training epochs per model");
  app.add_option("--lr", o.lr, "Adam learning rate");
  app.add_option("--batch", o.batch, "Batch size");
  app.add_option("--threads", o.threads, "Worker threads");
  app.add_option("--seed", o.seed, "Root seed");
  app.add_option("--clips", o.clips, "Round-trip clips");
  app.add_option("--report", report, "Also write the verdict lines here");
  app.add_flag("--strict", o.strict, "Exit 1 when any criterion fails");
  CLI11_PARSE(app, argc, argv);
  o.work = work;
  fs::create_directories(o.work);

  std::vector<std::pair<std::string, Verdict>> verdicts;
  auto record = [&](const std::string& name, const std::function<Verdict()>& f) {
    const auto t0 = Clock::now();
    Verdict v = f();
    v.detail += fmt(" [%.0f s]", seconds_since(t0));
    std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str());
    std::fflush(stdout);
    verdicts.emplace_back(name, v);
  };

  record("dsp-correctness", dsp_correctness);
  record("gradient-integrity", gradient_integrity);
  record("loss-semantics", loss_semantics);

  const KindRun st = run_kind(o, DatasetKind::static_vowel, 10);
  record("desk-scale-inversion", [&] { return desk_inversion(st, 30 * 60.0); });
  const KindRun li = run_kind(o, DatasetKind::linear, 20);
  const KindRun sp = run_kind(o, DatasetKind::step100ms, 30);
  record("dataset-difficulty-ordering", [&] { return difficulty(st, li, sp); });
  record("ablation-convergence", [&] { return ablation(o, st); });
  record("round-trip-superiority", [&] { return round_trip_superiority(o, st); });
  record("inference-speed", [&] { return speed(st); });
  record("determinism", [&] { return determinism(o); });

  std::size_t passed = 0;
  for (const auto& [name, v] : verdicts) passed += v.pass ? 1 : 0;
  std::printf("acceptance: %zu/%zu criteria passed\n", passed, verdicts.size());
  if (!report.empty()) {
    std::ofstream out(report);
    for (const auto& [name, v] : verdicts) out << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail << "\n";
    out << "acceptance: " << passed << "/" << verdicts.size() << " criteria passed\n";
  }
  return o.strict && passed != verdicts.size() ? 1 : 0;
}
