#include "ptinv/data/ptds.hpp"

#include <fstream>
#include <stdexcept>

#include "ptinv/util/binary_io.hpp"

namespace ptinv {

namespace {

constexpr std::uint32_t kMelDim = 128;

void write_record(std::ostream& out, const WindowSample& s) {
  io::write_f32_array(out, s.mel);
  io::write_f32_array(out, s.params_t);
  io::write_f32_array(out, s.params_prev);
  io::write_u32(out, s.file_id);
  io::write_u16(out, s.window_index);
}

WindowSample read_record(io::Reader& in) {
  WindowSample s;
  s.mel.resize(kMelDim);
  in.f32_array(s.mel);
  in.f32_array(s.params_t);
  in.f32_array(s.params_prev);
  s.file_id = in.u32();
  s.window_index = in.u16();
  return s;
}

}  // namespace

std::filesystem::path ptds_meta_path(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".meta.json");
}

void save_ptds(const std::filesystem::path& path, const DatasetSplit& split, const nlohmann::json& extra) {
  if (split.mel_config.n_mels != kMelDim) throw std::invalid_argument("PTDS stores 128 mel bins only");
  const std::size_t n = split.train.size() + split.validation.size();
  if (n > 0xFFFFFFFFu) throw std::invalid_argument("too many records for PTDS");
  for (const auto* side : {&split.train, &split.validation}) {
    for (const auto& s : *side) {
      if (s.mel.size() != kMelDim) throw std::invalid_argument("PTDS record with wrong mel length");
    }
  }

  io::write_atomically(path, [&](std::ostream& out) {
    io::write_bytes(out, "PTDS");
    io::write_u32(out, kPtdsVersion);
    io::write_u32(out, static_cast<std::uint32_t>(n));
    io::write_u32(out, kMelDim);
    io::write_u32(out, static_cast<std::uint32_t>(kNumParams));
    for (const auto& s : split.train) write_record(out, s);
    for (const auto& s : split.validation) write_record(out, s);
  });

  nlohmann::json meta = extra;
  meta["n_train"] = split.train.size();
  meta["n_validation"] = split.validation.size();
  meta["normalizer"] = split.stats.to_json();
  meta["mel_config"] = split.mel_config.to_json();
  meta["train_files"] = split.train_files;
  meta["validation_files"] = split.validation_files;
  const std::string text = meta.dump(2) + "\n";
  io::write_atomically(ptds_meta_path(path), [&](std::ostream& out) { out << text; });
}

DatasetSplit load_ptds(const std::filesystem::path& path) {
  const auto meta_path = ptds_meta_path(path);
  nlohmann::json meta;
  {
    std::ifstream in(meta_path);
    if (!in) throw std::runtime_error("cannot open " + meta_path.string());
    try {
      meta = nlohmann::json::parse(in);
    } catch (const std::exception& e) {
      throw std::runtime_error(meta_path.string() + ": " + e.what());
    }
  }

  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path.string());
  io::Reader in(file, path.string());
  if (in.bytes(4) != "PTDS") in.fail("bad magic");
  if (const auto v = in.u32(); v != kPtdsVersion) in.fail("unsupported version " + std::to_string(v));
  const std::uint32_t n = in.u32();
  if (in.u32() != kMelDim) in.fail("mel_dim must be 128");
  if (in.u32() != kNumParams) in.fail("n_params must be 6");

  DatasetSplit split;
  try {
    const auto n_train = meta.at("n_train").get<std::size_t>();
    const auto n_validation = meta.at("n_validation").get<std::size_t>();
    if (n_train + n_validation != n) in.fail("record count disagrees with " + meta_path.string());
    split.stats = NormalizerStats::from_json(meta.at("normalizer"));
    split.mel_config = MelConfig::from_json(meta.at("mel_config"));
    split.train_files = meta.value("train_files", std::vector<std::uint32_t>{});
    split.validation_files = meta.value("validation_files", std::vector<std::uint32_t>{});
    split.train.reserve(n_train);
    split.validation.reserve(n_validation);
    for (std::size_t i = 0; i < n_train; ++i) split.train.push_back(read_record(in));
    for (std::size_t i = 0; i < n_validation; ++i) split.validation.push_back(read_record(in));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(meta_path.string() + ": " + e.what());
  }
  if (!in.at_end()) in.fail("trailing bytes after last record");
  return split;
}

}  // namespace ptinv
