#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace ptinv {

enum class EmbeddingModel : std::uint32_t { wav2vec = 0, encodec = 1 };

[[nodiscard]] std::string_view to_string(EmbeddingModel m);
[[nodiscard]] EmbeddingModel embedding_model_from_string(std::string_view s);
/// 768 for wav2vec, 128 for encodec.
[[nodiscard]] std::uint32_t expected_source_dim(EmbeddingModel m);

inline constexpr std::uint32_t kPtebVersion = 1;

/// Frame embeddings exported by an external encoder.
///
/// Layout (little-endian): "PTEB", u32 version, u32 model tag (0 wav2vec,
/// 1 encodec), u32 source_dim, f64 frame_hop (seconds), u32 n_frames, then
/// n_frames * source_dim float32 values, frame-major. Frame i covers
/// [i*hop, (i+1)*hop).
struct EmbeddingFile {
  EmbeddingModel model = EmbeddingModel::encodec;
  std::uint32_t source_dim = 128;
  double frame_hop = 0.0;
  std::uint32_t n_frames = 0;
  std::vector<float> data;

  void validate() const;
  [[nodiscard]] std::span<const float> frame(std::size_t i) const;
  /// Index of the frame whose centre is nearest to time t (clamped).
  [[nodiscard]] std::size_t nearest_frame(double t) const;

  void save(const std::filesystem::path& path) const;
  static EmbeddingFile load(const std::filesystem::path& path);
};

}  // namespace ptinv
