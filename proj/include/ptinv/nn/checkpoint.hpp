#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ptinv/nn/tensor.hpp"

namespace ptinv::nn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Named float32 tensors plus a free-form JSON header.
///
/// Layout (little-endian): "PTCK", u32 version, u32 header length, header
/// JSON bytes, u32 tensor count, then per tensor: u32 name length, name,
/// u32 rank, u32 dims[rank], f32 values.
struct Checkpoint {
  nlohmann::json header = nlohmann::json::object();
  std::vector<std::pair<std::string, Tensor<float>>> tensors;

  void add(std::string name, Tensor<float> t);
  [[nodiscard]] const Tensor<float>& get(const std::string& name) const;
  [[nodiscard]] bool contains(const std::string& name) const;

  void save(const std::filesystem::path& path) const;
  static Checkpoint load(const std::filesystem::path& path);
};

}  // namespace ptinv::nn
