#include "ptinv/model/embedding_file.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ptinv/util/binary_io.hpp"

namespace ptinv {

std::string_view to_string(EmbeddingModel m) {
  switch (m) {
    case EmbeddingModel::wav2vec: return "wav2vec";
    case EmbeddingModel::encodec: return "encodec";
  }
  return "?";
}

EmbeddingModel embedding_model_from_string(std::string_view s) {
  if (s == "wav2vec") return EmbeddingModel::wav2vec;
  if (s == "encodec") return EmbeddingModel::encodec;
  throw std::invalid_argument("unknown embedding model '" + std::string(s) + "'");
}

std::uint32_t expected_source_dim(EmbeddingModel m) { return m == EmbeddingModel::wav2vec ? 768 : 128; }

void EmbeddingFile::validate() const {
  if (model != EmbeddingModel::wav2vec && model != EmbeddingModel::encodec) {
    throw std::invalid_argument("unknown model tag " + std::to_string(static_cast<std::uint32_t>(model)));
  }
  if (source_dim != expected_source_dim(model)) {
    throw std::invalid_argument(std::string(to_string(model)) + " embeddings must have source_dim " +
                                std::to_string(expected_source_dim(model)) + ", header says " +
                                std::to_string(source_dim));
  }
  if (!(frame_hop > 0.0) || !std::isfinite(frame_hop)) throw std::invalid_argument("frame_hop must be positive");
  if (data.size() != static_cast<std::size_t>(n_frames) * source_dim) {
    throw std::invalid_argument("body holds " + std::to_string(data.size()) + " values, header implies " +
                                std::to_string(static_cast<std::size_t>(n_frames) * source_dim));
  }
}

std::span<const float> EmbeddingFile::frame(std::size_t i) const {
  if (i >= n_frames) throw std::out_of_range("embedding frame " + std::to_string(i) + " out of range");
  return std::span<const float>(data).subspan(i * source_dim, source_dim);
}

std::size_t EmbeddingFile::nearest_frame(double t) const {
  if (n_frames == 0) throw std::out_of_range("embedding file has no frames");
  const double idx = std::floor(t / frame_hop);  // centre (i+0.5)*hop is nearest for this i
  if (idx <= 0.0) return 0;
  return std::min(static_cast<std::size_t>(idx), static_cast<std::size_t>(n_frames - 1));
}

void EmbeddingFile::save(const std::filesystem::path& path) const {
  validate();
  io::write_atomically(path, [&](std::ostream& out) {
    io::write_bytes(out, "PTEB");
    io::write_u32(out, kPtebVersion);
    io::write_u32(out, static_cast<std::uint32_t>(model));
    io::write_u32(out, source_dim);
    io::write_f64(out, frame_hop);
    io::write_u32(out, n_frames);
    io::write_f32_array(out, data);
  });
}

EmbeddingFile EmbeddingFile::load(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << file.rdbuf();
  const std::string bytes = buffer.str();
  constexpr std::size_t kHeader = 4 + 4 + 4 + 4 + 8 + 4;

  std::istringstream in_stream(bytes);
  io::Reader in(in_stream, path.string());
  if (bytes.size() < kHeader) in.fail("truncated header");
  if (in.bytes(4) != "PTEB") in.fail("not a PTEB file (bad magic)");
  if (const auto v = in.u32(); v != kPtebVersion) in.fail("unsupported version " + std::to_string(v));
  EmbeddingFile f;
  const std::uint32_t tag = in.u32();
  if (tag > 1) in.fail("unknown model tag " + std::to_string(tag));
  f.model = static_cast<EmbeddingModel>(tag);
  f.source_dim = in.u32();
  f.frame_hop = in.f64();
  f.n_frames = in.u32();
  const std::size_t expected = static_cast<std::size_t>(f.n_frames) * f.source_dim * 4;
  if (bytes.size() - kHeader != expected) {
    in.fail("header implies a " + std::to_string(expected) + "-byte body, found " +
            std::to_string(bytes.size() - kHeader) + " bytes");
  }
  f.data.resize(static_cast<std::size_t>(f.n_frames) * f.source_dim);
  in.f32_array(f.data);
  try {
    f.validate();
  } catch (const std::exception& e) {
    in.fail(e.what());
  }
  return f;
}

}  // namespace ptinv
