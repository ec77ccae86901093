#include "ptinv/data/generate.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "ptinv/util/binary_io.hpp"
#include "ptinv/util/parallel.hpp"
#include "ptinv/util/seed.hpp"

namespace ptinv {

void DatasetSpec::validate() const {
  if (n_files == 0) throw std::invalid_argument("dataset spec: n_files must be positive");
  if (!(duration > 0.0)) throw std::invalid_argument("dataset spec: duration must be positive");
  if (!(sample_rate > 0.0)) throw std::invalid_argument("dataset spec: sample_rate must be positive");
}

nlohmann::json DatasetSpec::to_json() const {
  return {{"kind", to_string(kind)}, {"n_files", n_files},      {"duration", duration},
          {"sample_rate", sample_rate}, {"seed", seed}, {"sampling", sampling.to_json()}};
}

DatasetSpec DatasetSpec::from_json(const nlohmann::json& j) {
  DatasetSpec s;
  s.kind = dataset_kind_from_string(j.at("kind").get<std::string>());
  s.n_files = j.at("n_files").get<std::size_t>();
  s.duration = j.value("duration", s.duration);
  s.sample_rate = j.value("sample_rate", s.sample_rate);
  s.seed = j.value("seed", s.seed);
  if (j.contains("sampling")) s.sampling = SamplingConfig::from_json(j["sampling"]);
  s.validate();
  return s;
}

nlohmann::json Manifest::to_json() const {
  nlohmann::json files_json = nlohmann::json::array();
  for (const auto& f : files) {
    files_json.push_back({{"wav", f.wav}, {"track_json", f.track_json}, {"seed", f.seed}});
  }
  return {{"spec", spec.to_json()}, {"files", std::move(files_json)}};
}

std::string Manifest::dump() const { return to_json().dump(2) + "\n"; }

void Manifest::save(const std::filesystem::path& path) const {
  const std::string text = dump();
  io::write_atomically(path, [&](std::ostream& out) { out << text; });
}

Manifest Manifest::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest " + path.string());
  try {
    const auto j = nlohmann::json::parse(in);
    Manifest m;
    m.spec = DatasetSpec::from_json(j.at("spec"));
    for (const auto& f : j.at("files")) {
      m.files.push_back({f.at("wav").get<std::string>(), f.at("track_json").get<std::string>(),
                         f.at("seed").get<std::uint64_t>()});
    }
    m.root = path.parent_path();
    return m;
  } catch (const std::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

Manifest generate_dataset(const DatasetSpec& spec, const std::filesystem::path& out_dir, std::size_t threads) {
  spec.validate();
  std::filesystem::create_directories(out_dir);

  Manifest manifest;
  manifest.spec = spec;
  manifest.root = out_dir;
  manifest.files.resize(spec.n_files);
  const std::string stem = std::string(to_string(spec.kind)) + "_";
  for (std::size_t i = 0; i < spec.n_files; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "%05zu", i);
    manifest.files[i] = {stem + name + ".wav", stem + name + ".json", derive_seed(spec.seed, i)};
  }

  SynthConfig synth;
  synth.sample_rate = spec.sample_rate;
  parallel_for(spec.n_files, threads, [&](std::size_t i) {
    const auto& entry = manifest.files[i];
    try {
      std::mt19937_64 rng(entry.seed);
      const ParamTrack track = sample_track(spec.kind, rng, spec.duration, spec.sampling);
      const AudioClip audio = synthesize(track, spec.duration, derive_seed(entry.seed, 1), synth);
      write_wav(manifest.resolve(entry.wav).string(), audio);
      const std::string text = track.dump();
      io::write_atomically(manifest.resolve(entry.track_json), [&](std::ostream& out) { out << text; });
    } catch (const std::exception& e) {
      throw std::runtime_error("generating " + entry.wav + ": " + e.what());
    }
  });

  manifest.save(out_dir / kManifestName);
  return manifest;
}

}  // namespace ptinv
