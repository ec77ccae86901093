#pragma once

#include <array>

#include <json.hpp>

#include "ptinv/nn/tensor.hpp"
#include "ptinv/synth/params.hpp"

namespace ptinv {

struct LossWeights {
  double elbo = 1.0;  // scales mel reconstruction + beta_kl * KL together
  double beta_kl = 1e-3;
  std::array<double, kNumParams> beta_t{1, 1, 1, 1, 1, 1};
  std::array<double, kNumParams> beta_prev{0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
  double huber_delta = 1.0;

  void validate() const;
  [[nodiscard]] nlohmann::json to_json() const;
  static LossWeights from_json(const nlohmann::json& j);
};

/// Batch means of each addend of the objective, plus unweighted metrics.
struct LossBreakdown {
  double total = 0;
  double elbo_recon = 0;  // elbo * mel_mse
  double elbo_kl = 0;     // elbo * beta_kl * kl
  double param_t = 0;     // sum_i beta_t[i] (p_hat - p_t)^2
  double param_prev = 0;  // sum_i beta_prev[i] huber(p_hat, p_prev)

  double mel_mse = 0;      // mean over bins
  double kl = 0;           // summed over latent dims
  double param_mse = 0;    // mean over parameters of (p_hat - p_t)^2
  double param_huber = 0;  // mean over parameters of huber(p_hat, p_t)

  LossBreakdown& operator+=(const LossBreakdown& o);
  LossBreakdown& operator*=(double s);
};

/// d loss / d (each model output); tensors are left empty when a term is off.
template <class T>
struct ObjectiveGrads {
  nn::Tensor<T> recon, mu, logvar, params_hat;
};

/// Inputs for one batch. recon / mu / logvar may be empty, which drops the
/// ELBO terms (used when only the projector exists). `denominator` is the
/// batch size the means are taken over; shards of a larger batch pass the
/// full size so their gradients sum to the batch gradient.
template <class T>
struct ObjectiveInputs {
  const nn::Tensor<T>* mel = nullptr;         // [B, 128]
  const nn::Tensor<T>* recon = nullptr;       // [B, 128]
  const nn::Tensor<T>* mu = nullptr;          // [B, latent]
  const nn::Tensor<T>* logvar = nullptr;      // [B, latent]
  const nn::Tensor<T>* params_hat = nullptr;  // [B, 6]
  const nn::Tensor<T>* params_t = nullptr;    // [B, 6]
  const nn::Tensor<T>* params_prev = nullptr; // [B, 6]
  std::size_t denominator = 0;                // 0 -> B
};

/// Evaluates the objective. When `grads` is non-null it receives the
/// gradients of breakdown.total.
template <class T>
LossBreakdown evaluate_objective(const ObjectiveInputs<T>& in, const LossWeights& w, ObjectiveGrads<T>* grads);

}  // namespace ptinv
