#pragma once

#include <array>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ptinv/nn/layers.hpp"
#include "ptinv/synth/params.hpp"

namespace ptinv {

struct ProjectorConfig {
  std::size_t input_dim = 64;
  std::array<std::size_t, 3> hidden{128, 128, 64};
  std::size_t output_dim = kNumParams;

  [[nodiscard]] nlohmann::json to_json() const;
  static ProjectorConfig from_json(const nlohmann::json& j);
};

/// Four dense layers: ReLU after the first three, sigmoid on the output.
template <class T>
class Projector {
 public:
  struct Trace {
    nn::Tensor<T> input;
    std::array<nn::Tensor<T>, 4> out;  // post-activation outputs of each layer
  };

  Projector() = default;
  explicit Projector(const ProjectorConfig& config);

  void init(std::mt19937_64& rng);
  [[nodiscard]] Projector zeros_like() const;

  /// x: [B, input_dim] -> [B, output_dim] in (0,1)
  [[nodiscard]] nn::Tensor<T> forward(const nn::Tensor<T>& x) const;
  [[nodiscard]] Trace forward_trace(nn::Tensor<T> x) const;
  /// Accumulates into grad; returns d loss / d input unless need_dx is false.
  nn::Tensor<T> backward(const Trace& trace, const nn::Tensor<T>& d_out, Projector& grad, bool need_dx = true) const;

  [[nodiscard]] const ProjectorConfig& config() const { return config_; }
  [[nodiscard]] std::vector<std::pair<std::string, nn::Tensor<T>*>> named_params(const std::string& prefix);
  [[nodiscard]] std::vector<std::pair<std::string, const nn::Tensor<T>*>> named_params(const std::string& prefix) const;

  std::array<nn::Dense<T>, 4> layers;

 private:
  ProjectorConfig config_;
};

}  // namespace ptinv
