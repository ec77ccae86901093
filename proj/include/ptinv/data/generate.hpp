#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptinv/data/sampling.hpp"
#include "ptinv/synth/synthesizer.hpp"

namespace ptinv {

struct DatasetSpec {
  DatasetKind kind = DatasetKind::static_vowel;
  std::size_t n_files = 500;
  double duration = 1.0;
  double sample_rate = kSynthSampleRate;
  std::uint64_t seed = 0;
  SamplingConfig sampling;

  void validate() const;
  [[nodiscard]] nlohmann::json to_json() const;
  static DatasetSpec from_json(const nlohmann::json& j);
};

struct ManifestEntry {
  std::string wav;         // relative to the manifest directory
  std::string track_json;  // relative to the manifest directory
  std::uint64_t seed = 0;
};

struct Manifest {
  DatasetSpec spec;
  std::vector<ManifestEntry> files;
  std::filesystem::path root;  // directory the relative paths resolve against

  [[nodiscard]] std::filesystem::path resolve(const std::string& relative) const { return root / relative; }
  [[nodiscard]] nlohmann::json to_json() const;
  [[nodiscard]] std::string dump() const;
  void save(const std::filesystem::path& path) const;
  static Manifest load(const std::filesystem::path& path);
};

inline constexpr const char* kManifestName = "manifest.json";

/// Renders spec.n_files WAV + track pairs into out_dir and writes
/// out_dir/manifest.json. Each file is derived from its own child seed, so the
/// output does not depend on `threads`. Files appear atomically; a failure
/// names the file it happened on.
Manifest generate_dataset(const DatasetSpec& spec, const std::filesystem::path& out_dir,
                          std::size_t threads = 1);

}  // namespace ptinv
