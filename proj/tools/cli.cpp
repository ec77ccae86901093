#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "ptinv/data/generate.hpp"
#include "ptinv/data/ptds.hpp"
#include "ptinv/data/windowing.hpp"
#include "ptinv/eval/ablation.hpp"
#include "ptinv/eval/error_stats.hpp"
#include "ptinv/eval/round_trip.hpp"
#include "ptinv/eval/trajectory.hpp"
#include "ptinv/eval/window_eval.hpp"
#include "ptinv/model/embedding_trainer.hpp"
#include "ptinv/model/inverter.hpp"
#include "ptinv/model/trainer.hpp"
#include "ptinv/synth/synthesizer.hpp"
#include "ptinv/util/parallel.hpp"
#include "ptinv/util/seed.hpp"

namespace ptinv::cli {

namespace fs = std::filesystem;
using nlohmann::json;

json default_config() {
  DatasetSpec dataset;
  return {
      {"version", kConfigVersion},
      {"seed", 0},
      {"threads", 1},
      {"synth", {{"duration", 1.0}, {"sample_rate", kSynthSampleRate}}},
      {"dataset",
       {{"duration", dataset.duration}, {"sample_rate", dataset.sample_rate}, {"sampling", dataset.sampling.to_json()}}},
      {"mel", MelConfig{}.to_json()},
      {"windowing", {{"train_fraction", 0.8}}},
      {"train", TrainConfig{}.to_json()},
      {"eval", {{"clips", 50}}},
  };
}

void merge_config(json& base, const json& overlay, const std::string& where) {
  if (!overlay.is_object()) throw UsageError("config" + (where.empty() ? "" : " key " + where) + " must be an object");
  for (const auto& [key, value] : overlay.items()) {
    const std::string path = where.empty() ? key : where + "." + key;
    if (!base.contains(key)) throw UsageError("unknown config key '" + path + "'");
    auto& slot = base[key];
    if (slot.is_object()) {
      merge_config(slot, value, path);
    } else {
      slot = value;
    }
  }
}

void apply_assignment(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError("--set expects key=value, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  // Build {"a": {"b": value}} and merge, so unknown keys are caught the same way.
  json patch = value;
  std::string rest = key;
  std::vector<std::string> parts;
  for (std::size_t dot; (dot = rest.find('.')) != std::string::npos; rest = rest.substr(dot + 1)) {
    parts.push_back(rest.substr(0, dot));
  }
  parts.push_back(rest);
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
    if (it->empty()) throw UsageError("empty component in config key '" + key + "'");
    patch = json{{*it, patch}};
  }
  merge_config(config, patch);
}

namespace {

struct Globals {
  std::optional<std::string> config_file;
  std::vector<std::string> assignments;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
};

json load_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw UsageError(path.string() + ": not valid JSON");
  return j;
}

json resolve_config(const Globals& g, const std::string& command) {
  json config = default_config();
  if (g.config_file) {
    json file = load_json_file(*g.config_file);
    if (file.value("version", kConfigVersion) != kConfigVersion) {
      throw UsageError(*g.config_file + ": unsupported config version " + file["version"].dump());
    }
    merge_config(config, file);
  }
  for (const auto& a : g.assignments) apply_assignment(config, a);
  if (g.seed) config["seed"] = *g.seed;
  if (g.threads) config["threads"] = *g.threads;
  if (config["threads"].get<long long>() < 1) throw UsageError("threads must be at least 1");
  std::cerr << "ptinv " << command << ": config " << config.dump() << "\n";
  return config;
}

std::uint64_t seed_of(const json& c) { return c.at("seed").get<std::uint64_t>(); }
std::size_t threads_of(const json& c) { return c.at("threads").get<std::size_t>(); }

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

TrainConfig train_config(const json& c) {
  json t = c.at("train");
  t["seed"] = seed_of(c);
  t["threads"] = threads_of(c);
  return TrainConfig::from_json(t);
}

void log_epoch(const EpochMetrics& m) {
  std::fprintf(stderr, "epoch %zu  train %.6g  val mel_mse %.6g  param_huber %.6g  param_mse %.6g  kl %.6g\n",
               m.epoch, m.train_loss, m.mel_mse_val, m.param_huber_val, m.param_mse_val, m.kl_val);
}

// ---- subcommands -----------------------------------------------------------

struct SynthArgs {
  std::string track, out;
  std::optional<double> duration;
};

void run_synth(const SynthArgs& a, const json& c) {
  const auto track = ParamTrack::load(a.track);
  const double duration = a.duration.value_or(c["synth"]["duration"].get<double>());
  const auto clip = synthesize(track, duration, c["synth"]["sample_rate"].get<double>(), seed_of(c));
  write_wav(a.out, clip);
  std::cerr << "wrote " << a.out << " (" << clip.samples.size() << " samples)\n";
}

struct DatasetArgs {
  std::string kind, out;
  std::size_t n = 500;
};

void run_dataset(const DatasetArgs& a, const json& c) {
  json j = c["dataset"];
  j["kind"] = a.kind;
  j["n_files"] = a.n;
  j["seed"] = seed_of(c);
  const auto spec = DatasetSpec::from_json(j);
  const auto manifest = generate_dataset(spec, a.out, threads_of(c));
  std::cerr << "wrote " << manifest.files.size() << " files to " << a.out << "\n";
}

struct FeaturesArgs {
  std::string manifest, out;
};

void run_features(const FeaturesArgs& a, const json& c) {
  const auto manifest = Manifest::load(a.manifest);
  const auto mel = MelConfig::from_json(c["mel"]);
  WindowingOptions opt;
  opt.split_seed = seed_of(c);
  opt.train_fraction = c["windowing"]["train_fraction"].get<double>();
  opt.threads = threads_of(c);
  const auto split = window_dataset(manifest, mel, opt);
  json extra = {{"manifest", fs::absolute(a.manifest).lexically_normal().string()},
                {"dataset", manifest.spec.to_json()},
                {"split_seed", opt.split_seed},
                {"train_fraction", opt.train_fraction}};
  save_ptds(a.out, split, extra);
  std::cerr << "wrote " << a.out << ": " << split.train.size() << " train / " << split.validation.size()
            << " validation windows\n";
}

struct TrainArgs {
  std::string data, mode = "joint", out;
  std::optional<std::string> init;
};

void run_train(const TrainArgs& a, const json& c) {
  const auto mode = train_mode_from_string(a.mode);
  if (mode == TrainMode::frozen_projector && !a.init) throw UsageError("--mode frozen_projector needs --init");
  const auto cfg = train_config(c);
  const auto data = load_ptds(a.data);
  std::optional<InversionModel> init;
  if (a.init) init = InversionModel::load(*a.init);
  const auto result = train_vae(data, cfg, mode, init ? &init->vae() : nullptr, log_epoch);

  const InversionModel model(result.model, data.stats, data.mel_config);
  json header = {{"train", cfg.to_json()}, {"mode", a.mode}, {"data", a.data}};
  if (a.init) header["init"] = *a.init;
  model.save(a.out, header);
  write_curves_csv(a.out + ".curves.csv", result.curves);
  std::cerr << "wrote " << a.out << " and " << a.out << ".curves.csv\n";
}

struct InvertArgs {
  std::string model, in, out;
};

void run_invert(const InvertArgs& a, const json&) {
  const auto model = InversionModel::load(a.model);
  const auto track = predict_params(read_wav(a.in), model);
  track.save(a.out);
  std::cerr << "wrote " << a.out << " (" << track.size() << " windows)\n";
}

struct EvalArgs {
  std::string model, data, report;
  std::optional<std::size_t> clips;
  std::optional<std::string> joint_curves, split_curves, split_vae_curves;
  std::optional<std::string> trajectory;
  std::vector<std::string> dims{"tongue_index", "tongue_diameter", "frequency"};
};

void run_eval(const EvalArgs& a, const json& c) {
  if (a.dims.size() != 3) throw UsageError("--dims takes exactly three parameter names");
  if (a.joint_curves.has_value() != a.split_curves.has_value()) {
    throw UsageError("--joint-curves and --split-curves go together");
  }
  const auto model = InversionModel::load(a.model);
  const auto data = load_ptds(a.data);
  const fs::path dir = a.report;
  fs::create_directories(dir);
  const std::size_t threads = threads_of(c);
  json summary = {{"model", a.model}, {"data", a.data}};

  const auto& samples = data.validation.empty() ? data.train : data.validation;
  const auto report = error_report(window_errors(model, samples, data.stats, threads));
  const auto dataset_name = fs::path(a.data).stem().string();
  const auto model_name = fs::path(a.model).stem().string();
  const std::vector<ErrorReportRow> rows{{dataset_name, model_name, report}};
  write_error_report_csv(dir / "error_report.csv", rows);
  write_text(dir / "error_report.json", report.to_json().dump(2) + "\n");
  summary["error_report"] = report.to_json();

  // Round trip over validation clips, which needs the audio behind the windows.
  const json meta = load_json_file(ptds_meta_path(a.data));
  const std::size_t want = a.clips.value_or(c["eval"]["clips"].get<std::size_t>());
  if (want > 0 && meta.contains("manifest")) {
    const auto manifest = Manifest::load(meta["manifest"].get<std::string>());
    const auto sampling = manifest.spec.sampling;
    std::vector<std::uint32_t> ids = data.validation_files.empty() ? data.train_files : data.validation_files;
    ids.resize(std::min(ids.size(), want));
    RoundTripReport rt;
    rt.clips.resize(ids.size());
    parallel_for(ids.size(), threads, [&](std::size_t i) {
      const auto& entry = manifest.files.at(ids[i]);
      rt.clips[i] = round_trip(read_wav(manifest.resolve(entry.wav).string()), model,
                               derive_seed(seed_of(c), ids[i]), sampling);
      rt.clips[i].clip = entry.wav;
    });
    rt.write_csv(dir / "round_trip.csv");
    write_text(dir / "round_trip.json", rt.to_json().dump(2) + "\n");
    summary["round_trip_win_rate"] = rt.win_rate();
    std::cerr << "round trip: model beats baseline on " << rt.win_rate() * 100.0 << "% of " << rt.clips.size()
              << " clips\n";
  } else if (want > 0) {
    std::cerr << "round trip skipped: " << ptds_meta_path(a.data).string() << " names no manifest\n";
  }

  if (a.joint_curves) {
    const auto joint = read_curves_csv(*a.joint_curves);
    const auto split = read_curves_csv(*a.split_curves);
    std::vector<EpochMetrics> split_vae;
    if (a.split_vae_curves) split_vae = read_curves_csv(*a.split_vae_curves);
    const auto ab = ablation_report(joint, split, split_vae);
    ab.write_csv(dir / "ablation.csv");
    write_text(dir / "ablation.json", ab.to_json().dump(2) + "\n");
    summary["ablation"] = ab.to_json();
  }

  if (a.trajectory) {
    const auto traj = trajectory_export(read_wav(*a.trajectory), model, {a.dims[0], a.dims[1], a.dims[2]});
    traj.write_csv(dir / "trajectory.csv");
  }

  write_text(dir / "summary.json", summary.dump(2) + "\n");
  for (std::size_t i = 0; i < kNumParams; ++i) {
    std::fprintf(stderr, "%-22s median %.4f  q1 %.4f  q3 %.4f\n", std::string(kParamNames[i]).c_str(),
                 report.per_param[i].median, report.per_param[i].q1, report.per_param[i].q3);
  }
  std::cerr << "wrote report to " << dir.string() << "\n";
}

struct EmbedArgs {
  std::vector<std::string> embeddings;
  std::string labels, out;
};

void run_embed_train(const EmbedArgs& a, const json& c) {
  std::vector<fs::path> files(a.embeddings.begin(), a.embeddings.end());
  std::sort(files.begin(), files.end());
  const auto manifest = Manifest::load(a.labels);
  const auto cfg = train_config(c);
  const auto mel = MelConfig::from_json(c["mel"]);
  auto result = train_projector_on_embeddings(files, manifest, cfg, mel, log_epoch);
  json header = {{"train", cfg.to_json()},
                 {"embedding_model", std::string(to_string(result.model_tag))},
                 {"labels", a.labels},
                 {"n_files", files.size()}};
  projector_checkpoint(result.projector, header).save(a.out);
  write_curves_csv(a.out + ".curves.csv", result.curves);
  std::cerr << "wrote " << a.out << " and " << a.out << ".curves.csv\n";
}

}  // namespace

int dispatch(int argc, const char* const* argv) {
  CLI::App app{"Articulatory inversion for a vocal-tract synthesizer"};
  app.name("ptinv");
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand

  Globals g;
  std::string config_file;
  app.add_option("--config", config_file, "JSON config file layered over the defaults")->check(CLI::ExistingFile);
  app.add_option("--set", g.assignments, "Config override key=value (repeatable)")
      ->expected(1)
      ->take_all();
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  auto* seed_opt = app.add_option("--seed", seed, "Root random seed");
  auto* threads_opt = app.add_option("--threads", threads, "Worker thread cap");
  bool print_config = false;
  app.add_flag("--print-config", print_config, "Print the default config and exit");

  SynthArgs synth;
  auto* s_synth = app.add_subcommand("synth", "Render a parameter track to WAV");
  s_synth->add_option("--track", synth.track, "Track JSON")->required()->check(CLI::ExistingFile);
  s_synth->add_option("--out", synth.out, "Output WAV")->required();
  s_synth->add_option("--duration", synth.duration, "Seconds (default from config)");

  DatasetArgs dataset;
  auto* s_dataset = app.add_subcommand("dataset", "Generate a synthetic corpus");
  s_dataset->add_option("--kind", dataset.kind, "static | linear | step100ms")
      ->required()
      ->check(CLI::IsMember({"static", "linear", "step100ms"}));
  s_dataset->add_option("--n", dataset.n, "Number of files")->check(CLI::PositiveNumber);
  s_dataset->add_option("--out", dataset.out, "Output directory")->required();

  FeaturesArgs features;
  auto* s_features = app.add_subcommand("features", "Window, split and normalize a corpus");
  s_features->add_option("--manifest", features.manifest, "manifest.json")->required()->check(CLI::ExistingFile);
  s_features->add_option("--out", features.out, "Output .ptds")->required();

  TrainArgs train;
  auto* s_train = app.add_subcommand("train", "Train an inversion model");
  s_train->add_option("--data", train.data, "Input .ptds")->required()->check(CLI::ExistingFile);
  s_train->add_option("--mode", train.mode, "joint | vae_only | frozen_projector")
      ->check(CLI::IsMember({"joint", "vae_only", "frozen_projector"}));
  s_train->add_option("--out", train.out, "Output checkpoint")->required();
  s_train->add_option("--init", train.init, "Checkpoint to start from")->check(CLI::ExistingFile);

  InvertArgs invert;
  auto* s_invert = app.add_subcommand("invert", "Predict a parameter track for a recording");
  s_invert->add_option("--model", invert.model, "Checkpoint")->required()->check(CLI::ExistingFile);
  s_invert->add_option("--in", invert.in, "Input WAV")->required()->check(CLI::ExistingFile);
  s_invert->add_option("--out", invert.out, "Output params JSON")->required();

  EvalArgs eval;
  auto* s_eval = app.add_subcommand("eval", "Error statistics and round-trip report");
  s_eval->add_option("--model", eval.model, "Checkpoint")->required()->check(CLI::ExistingFile);
  s_eval->add_option("--data", eval.data, "Labelled .ptds")->required()->check(CLI::ExistingFile);
  s_eval->add_option("--report", eval.report, "Report directory")->required();
  s_eval->add_option("--clips", eval.clips, "Round-trip clip count (0 to skip)");
  s_eval->add_option("--joint-curves", eval.joint_curves, "Curves CSV of joint training")->check(CLI::ExistingFile);
  s_eval->add_option("--split-curves", eval.split_curves, "Curves CSV of the frozen-projector stage")
      ->check(CLI::ExistingFile);
  s_eval->add_option("--split-vae-curves", eval.split_vae_curves, "Curves CSV of the vae_only stage")
      ->check(CLI::ExistingFile);
  s_eval->add_option("--trajectory", eval.trajectory, "WAV to export a 3-D trajectory for")
      ->check(CLI::ExistingFile);
  s_eval->add_option("--dims", eval.dims, "Three parameter names")->delimiter(',');

  EmbedArgs embed;
  auto* s_embed = app.add_subcommand("embed-train", "Train a projector on external embeddings");
  s_embed->add_option("--embeddings", embed.embeddings, "PTEB files")->required()->check(CLI::ExistingFile);
  s_embed->add_option("--labels", embed.labels, "Manifest whose tracks label the audio")
      ->required()
      ->check(CLI::ExistingFile);
  s_embed->add_option("--out", embed.out, "Output checkpoint")->required();

  std::string command = "?";
  try {
    if (argc > 1 && std::string_view(argv[1]) == "--print-config") {
      std::cout << default_config().dump(2) << "\n";
      return kExitOk;
    }
    app.parse(argc, argv);
    if (!config_file.empty()) g.config_file = config_file;
    if (seed_opt->count() > 0) g.seed = seed;
    if (threads_opt->count() > 0) g.threads = threads;
    command = app.get_subcommands().front()->get_name();
    const json c = resolve_config(g, command);

    if (s_synth->parsed()) run_synth(synth, c);
    if (s_dataset->parsed()) run_dataset(dataset, c);
    if (s_features->parsed()) run_features(features, c);
    if (s_train->parsed()) run_train(train, c);
    if (s_invert->parsed()) run_invert(invert, c);
    if (s_eval->parsed()) run_eval(eval, c);
    if (s_embed->parsed()) run_embed_train(embed, c);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "ptinv " << command << ": usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "ptinv " << command << ": error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int dispatch(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"ptinv"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return dispatch(static_cast<int>(argv.size()), argv.data());
}

}  // namespace ptinv::cli
