#pragma once

#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ptinv/model/projector.hpp"
#include "ptinv/nn/checkpoint.hpp"
#include "ptinv/nn/layers.hpp"

namespace ptinv {

struct VaeConfig {
  std::size_t input_dim = 128;
  std::vector<std::size_t> channels{32, 64, 128};
  std::size_t kernel = 5;
  std::size_t stride = 2;
  std::size_t latent_dim = 64;
  ProjectorConfig projector;

  /// Checks that the encoder stack can be mirrored exactly by the decoder.
  void validate() const;
  /// Sequence lengths after each encoder layer, starting with input_dim.
  [[nodiscard]] std::vector<std::size_t> lengths() const;
  [[nodiscard]] nlohmann::json to_json() const;
  static VaeConfig from_json(const nlohmann::json& j);
};

enum class ParamGroup { encoder, reconstruction, projector };

/// Encoder (conv stack -> dense mu / logvar), reconstruction head (dense ->
/// transposed conv stack -> sigmoid) and projector head. Both heads read the
/// same latent vector.
template <class T>
class VaeModel {
 public:
  struct Trace {
    nn::Tensor<T> x;                       // [B, 1, input_dim]
    std::vector<nn::Tensor<T>> enc;        // post-ReLU encoder outputs
    nn::Tensor<T> flat;                    // [B, C*L]
    nn::Tensor<T> mu, logvar, eps, z;      // [B, latent]
    nn::Tensor<T> dec_in;                  // post-ReLU, [B, C, L]
    std::vector<nn::Tensor<T>> dec;        // decoder layer outputs; last one is the sigmoid output
    typename Projector<T>::Trace projector;
    bool sampled = false;
  };

  VaeModel() = default;
  explicit VaeModel(const VaeConfig& config);
  static VaeModel create(const VaeConfig& config, std::uint64_t seed);
  [[nodiscard]] VaeModel zeros_like() const;

  /// mel: [B, input_dim]. With eps ([B, latent]) z = mu + exp(logvar/2)*eps,
  /// otherwise z = mu.
  [[nodiscard]] Trace forward(const nn::Tensor<T>& mel, const nn::Tensor<T>* eps) const;

  /// Gradients of the loss w.r.t. the model outputs and the latent statistics.
  struct OutputGrads {
    nn::Tensor<T> recon;       // [B, input_dim]
    nn::Tensor<T> params_hat;  // [B, 6]
    nn::Tensor<T> mu;          // direct terms (KL), [B, latent]
    nn::Tensor<T> logvar;
  };
  /// Backpropagates into grad. Groups not listed in `train` receive nothing
  /// and, when the encoder is excluded, no gradient is propagated below z.
  void backward(const Trace& trace, const OutputGrads& g, VaeModel& grad,
                std::span<const ParamGroup> train) const;

  /// Encoder only: (mu, logvar), each [B, latent].
  [[nodiscard]] std::pair<nn::Tensor<T>, nn::Tensor<T>> encode(const nn::Tensor<T>& mel) const;
  [[nodiscard]] nn::Tensor<T> reconstruct(const nn::Tensor<T>& z) const;

  [[nodiscard]] const VaeConfig& config() const { return config_; }
  [[nodiscard]] std::vector<std::pair<std::string, nn::Tensor<T>*>> named_params(ParamGroup group);
  [[nodiscard]] std::vector<std::pair<std::string, nn::Tensor<T>*>> named_params();

  std::vector<nn::Conv1d<T>> encoder;
  nn::Dense<T> mu_head, logvar_head;
  nn::Dense<T> decoder_in;
  std::vector<nn::ConvTranspose1d<T>> decoder;
  Projector<T> projector;

 private:
  VaeConfig config_;
};

inline constexpr const char* kProjectorPrefix = "projector.";

/// Stores all weights under stable names; `header` is attached as is.
[[nodiscard]] nn::Checkpoint to_checkpoint(VaeModel<float>& model, nlohmann::json header);
/// Rebuilds the model described by header["model"] and fills every tensor.
[[nodiscard]] VaeModel<float> vae_from_checkpoint(const nn::Checkpoint& ck);

}  // namespace ptinv
