#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>

#include <json.hpp>

#include "cli.hpp"
#include "ptinv/synth/audio.hpp"
#include "ptinv/synth/synthesizer.hpp"
#include "ptinv/synth/track.hpp"

using namespace ptinv;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "ptinv_test_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run(std::vector<std::string> args) { return cli::dispatch(args); }

// Contents of every regular file below `dir`, keyed by relative path.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = slurp(e.path());
  }
  return out;
}

}  // namespace

TEST_CASE("config layering", "[cli]") {
  auto c = cli::default_config();
  CHECK(c["version"] == cli::kConfigVersion);
  cli::apply_assignment(c, "train.epochs=3");
  cli::apply_assignment(c, "train.lr=0.0001");
  cli::apply_assignment(c, "dataset.sampling.tongue_log_sigma=0.3");
  CHECK(c["train"]["epochs"] == 3);
  CHECK(c["train"]["lr"].get<double>() == 1e-4);
  CHECK(c["dataset"]["sampling"]["tongue_log_sigma"].get<double>() == 0.3);
  CHECK_THROWS_AS(cli::apply_assignment(c, "train.nope=1"), cli::UsageError);
  CHECK_THROWS_AS(cli::apply_assignment(c, "no_equals_sign"), cli::UsageError);

  auto base = cli::default_config();
  cli::merge_config(base, json{{"seed", 7}, {"train", {{"batch_size", 16}}}});
  CHECK(base["seed"] == 7);
  CHECK(base["train"]["batch_size"] == 16);
  CHECK(base["train"]["epochs"] == cli::default_config()["train"]["epochs"]);
  CHECK_THROWS_AS(cli::merge_config(base, json{{"mystery", 1}}), cli::UsageError);
}

TEST_CASE("exit codes", "[cli]") {
  const auto dir = scratch("codes");
  CHECK(run({}) == cli::kExitUsage);
  CHECK(run({"dataset", "--bogus"}) == cli::kExitUsage);
  CHECK(run({"dataset", "--out", (dir / "d").string(), "--set", "train.nope=1"}) == cli::kExitUsage);
  CHECK(run({"dataset", "--out", (dir / "d").string(), "--kind", "wobbly"}) == cli::kExitUsage);
  std::ofstream(dir / "bad.json") << R"({"unknown_section": {}})";
  CHECK(run({"--config", (dir / "bad.json").string(), "dataset", "--out", (dir / "d").string()}) ==
        cli::kExitUsage);
  CHECK(run({"--help"}) == cli::kExitOk);
  CHECK(run({"--print-config"}) == cli::kExitOk);

  // A well-formed command that fails while running.
  std::ofstream(dir / "garbage.wav") << "not a wave file";
  std::ofstream(dir / "garbage.ptck") << "not a checkpoint";
  CHECK(run({"invert", "--model", (dir / "garbage.ptck").string(), "--in", (dir / "garbage.wav").string(), "--out",
             (dir / "o.json").string()}) == cli::kExitRuntime);
}

TEST_CASE("dataset generation through the CLI is reproducible", "[cli]") {
  const auto dir = scratch("dataset");
  for (const char* sub : {"a", "b"}) {
    REQUIRE(run({"dataset", "--kind", "static", "--n", "3", "--seed", "1", "--out", (dir / sub).string()}) == 0);
  }
  CHECK(slurp(dir / "a" / "manifest.json") == slurp(dir / "b" / "manifest.json"));
  CHECK(slurp(dir / "a" / "static_00002.wav") == slurp(dir / "b" / "static_00002.wav"));
  REQUIRE(run({"dataset", "--kind", "static", "--n", "3", "--seed", "2", "--out", (dir / "c").string()}) == 0);
  CHECK(slurp(dir / "a" / "static_00000.wav") != slurp(dir / "c" / "static_00000.wav"));
}

TEST_CASE("end-to-end pipeline", "[cli]") {
  const auto start = std::chrono::steady_clock::now();
  const auto dir = scratch("pipeline");
  const auto data = dir / "data", ptds = dir / "ds.ptds";
  REQUIRE(run({"dataset", "--kind", "static", "--n", "10", "--seed", "3", "--out", data.string()}) == 0);
  const auto corpus = snapshot(data);

  REQUIRE(run({"features", "--manifest", (data / "manifest.json").string(), "--out", ptds.string(), "--seed",
               "3"}) == 0);
  CHECK(snapshot(data) == corpus);
  const auto ptds_bytes = slurp(ptds);

  const std::vector<std::string> quick{"--set", "train.epochs=2", "--set", "train.batch_size=32"};
  auto with = [&](std::vector<std::string> a) {
    a.insert(a.end(), quick.begin(), quick.end());
    return run(a);
  };
  REQUIRE(with({"train", "--data", ptds.string(), "--mode", "joint", "--out", (dir / "joint.ptck").string()}) == 0);
  REQUIRE(with({"train", "--data", ptds.string(), "--mode", "vae_only", "--out", (dir / "vae.ptck").string()}) == 0);
  const auto vae_bytes = slurp(dir / "vae.ptck");
  REQUIRE(with({"train", "--data", ptds.string(), "--mode", "frozen_projector", "--init",
                (dir / "vae.ptck").string(), "--out", (dir / "split.ptck").string()}) == 0);
  CHECK(slurp(dir / "vae.ptck") == vae_bytes);
  CHECK(with({"train", "--data", ptds.string(), "--mode", "frozen_projector", "--out",
              (dir / "x.ptck").string()}) == cli::kExitUsage);
  CHECK(slurp(ptds) == ptds_bytes);

  // Curves: header plus one row per epoch.
  std::ifstream curves(dir / "joint.ptck.curves.csv");
  std::string line;
  int rows = -1;
  while (std::getline(curves, line)) ++rows;
  CHECK(rows == 2);

  // Invert a 1 s recording at another rate.
  const auto wav = dir / "in.wav";
  write_wav(wav.string(), resample(synthesize(ParamTrack::constant(PTParams()), 1.0, 48000.0, 5), 16000.0));
  const auto wav_bytes = slurp(wav);
  REQUIRE(run({"invert", "--model", (dir / "joint.ptck").string(), "--in", wav.string(), "--out",
               (dir / "pred.json").string()}) == 0);
  CHECK(slurp(wav) == wav_bytes);
  const auto track = ParamTrack::load((dir / "pred.json").string());
  CHECK(track.size() == 66);

  const auto report = dir / "report";
  REQUIRE(run({"eval", "--model", (dir / "joint.ptck").string(), "--data", ptds.string(), "--report",
               report.string(), "--clips", "2", "--joint-curves", (dir / "joint.ptck.curves.csv").string(),
               "--split-curves", (dir / "split.ptck.curves.csv").string(), "--split-vae-curves",
               (dir / "vae.ptck.curves.csv").string(), "--trajectory", wav.string()}) == 0);
  for (const char* f : {"error_report.csv", "error_report.json", "round_trip.csv", "round_trip.json", "ablation.csv",
                        "ablation.json", "trajectory.csv", "summary.json"}) {
    INFO(f);
    CHECK(fs::exists(report / f));
  }
  CHECK(snapshot(data) == corpus);

  const auto minutes =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / 60.0;
  CHECK(minutes < 30.0);
}
