#pragma once

#include <filesystem>

#include <json.hpp>

#include "ptinv/data/windowing.hpp"

namespace ptinv {

inline constexpr std::uint32_t kPtdsVersion = 1;
inline constexpr std::size_t kPtdsRecordBytes = 128 * 4 + 2 * kNumParams * 4 + 4 + 2;

/// Writes `path` (flat little-endian records, train first, then validation)
/// and `path`.meta.json holding the split sizes, normalizer and mel config.
/// `extra` is merged into the sidecar.
void save_ptds(const std::filesystem::path& path, const DatasetSplit& split,
               const nlohmann::json& extra = nlohmann::json::object());

/// Reads both files back. Errors name the offending file.
[[nodiscard]] DatasetSplit load_ptds(const std::filesystem::path& path);

[[nodiscard]] std::filesystem::path ptds_meta_path(const std::filesystem::path& path);

}  // namespace ptinv
