#include "ptinv/model/objective.hpp"

#include <cmath>
#include <stdexcept>

#include "ptinv/nn/losses.hpp"

namespace ptinv {

void LossWeights::validate() const {
  auto ok = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!ok(elbo) || !ok(beta_kl)) throw std::invalid_argument("loss weights must be finite and non-negative");
  for (std::size_t i = 0; i < kNumParams; ++i) {
    if (!ok(beta_t[i]) || !ok(beta_prev[i])) throw std::invalid_argument("loss weights must be finite and non-negative");
  }
  if (!(huber_delta > 0.0)) throw std::invalid_argument("huber_delta must be positive");
}

nlohmann::json LossWeights::to_json() const {
  return {{"elbo", elbo},           {"beta_kl", beta_kl},     {"beta_t", beta_t},
          {"beta_prev", beta_prev}, {"huber_delta", huber_delta}};
}

LossWeights LossWeights::from_json(const nlohmann::json& j) {
  LossWeights w;
  w.elbo = j.value("elbo", w.elbo);
  w.beta_kl = j.value("beta_kl", w.beta_kl);
  // A scalar applies to all six parameters.
  auto read6 = [&](const char* key, std::array<double, kNumParams>& dst) {
    if (!j.contains(key)) return;
    if (j[key].is_number()) {
      dst.fill(j[key].get<double>());
    } else {
      dst = j[key].get<std::array<double, kNumParams>>();
    }
  };
  read6("beta_t", w.beta_t);
  read6("beta_prev", w.beta_prev);
  w.huber_delta = j.value("huber_delta", w.huber_delta);
  w.validate();
  return w;
}

LossBreakdown& LossBreakdown::operator+=(const LossBreakdown& o) {
  total += o.total;
  elbo_recon += o.elbo_recon;
  elbo_kl += o.elbo_kl;
  param_t += o.param_t;
  param_prev += o.param_prev;
  mel_mse += o.mel_mse;
  kl += o.kl;
  param_mse += o.param_mse;
  param_huber += o.param_huber;
  return *this;
}

LossBreakdown& LossBreakdown::operator*=(double s) {
  total *= s;
  elbo_recon *= s;
  elbo_kl *= s;
  param_t *= s;
  param_prev *= s;
  mel_mse *= s;
  kl *= s;
  param_mse *= s;
  param_huber *= s;
  return *this;
}

template <class T>
LossBreakdown evaluate_objective(const ObjectiveInputs<T>& in, const LossWeights& w, ObjectiveGrads<T>* grads) {
  if (in.params_hat == nullptr || in.params_t == nullptr || in.params_prev == nullptr) {
    throw std::invalid_argument("objective: parameter tensors are required");
  }
  const std::size_t B = in.params_hat->dim(0);
  nn::require_same_shape("objective params_t", in.params_t->shape, in.params_hat->shape);
  nn::require_same_shape("objective params_prev", in.params_prev->shape, in.params_hat->shape);
  if (in.params_hat->dim(1) != kNumParams) throw std::invalid_argument("objective: expected 6 parameters");
  const double denom = static_cast<double>(in.denominator ? in.denominator : B);
  const double inv = 1.0 / denom;
  LossBreakdown out;

  const bool has_elbo = in.recon != nullptr && in.mu != nullptr && in.logvar != nullptr && in.mel != nullptr;
  if (has_elbo) {
    nn::require_same_shape("objective recon", in.recon->shape, in.mel->shape);
    nn::require_same_shape("objective logvar", in.logvar->shape, in.mu->shape);
    const std::size_t M = in.mel->dim(1), D = in.mu->dim(1);
    if (grads) {
      grads->recon = nn::Tensor<T>(in.recon->shape);
      grads->mu = nn::Tensor<T>(in.mu->shape);
      grads->logvar = nn::Tensor<T>(in.logvar->shape);
    }
    double mse_sum = 0, kl_sum = 0;
    for (std::size_t b = 0; b < B; ++b) {
      const T* r = in.recon->ptr() + b * M;
      const T* x = in.mel->ptr() + b * M;
      double s = 0;
      for (std::size_t m = 0; m < M; ++m) s += static_cast<double>((r[m] - x[m]) * (r[m] - x[m]));
      mse_sum += s / static_cast<double>(M);
      const std::span<const T> mu(in.mu->ptr() + b * D, D), lv(in.logvar->ptr() + b * D, D);
      kl_sum += static_cast<double>(nn::kl_gaussian<T>(mu, lv));
      if (grads) {
        const T g_mse = static_cast<T>(w.elbo * 2.0 * inv / static_cast<double>(M));
        T* dr = grads->recon.ptr() + b * M;
        for (std::size_t m = 0; m < M; ++m) dr[m] = g_mse * (r[m] - x[m]);
        nn::kl_gaussian_grad<T>(mu, lv, static_cast<T>(w.elbo * w.beta_kl * inv),
                                std::span<T>(grads->mu.ptr() + b * D, D),
                                std::span<T>(grads->logvar.ptr() + b * D, D));
      }
    }
    out.mel_mse = mse_sum * inv;
    out.kl = kl_sum * inv;
    out.elbo_recon = w.elbo * out.mel_mse;
    out.elbo_kl = w.elbo * w.beta_kl * out.kl;
  }

  if (grads) grads->params_hat = nn::Tensor<T>(in.params_hat->shape);
  const T delta = static_cast<T>(w.huber_delta);
  double pt = 0, pp = 0, mse = 0, hub = 0;
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t i = 0; i < kNumParams; ++i) {
      const std::size_t k = b * kNumParams + i;
      const T p = (*in.params_hat)[k], t = (*in.params_t)[k], q = (*in.params_prev)[k];
      const double sq = static_cast<double>((p - t) * (p - t));
      const double h_prev = static_cast<double>(nn::huber<T>(p, q, delta));
      pt += w.beta_t[i] * sq;
      pp += w.beta_prev[i] * h_prev;
      mse += sq;
      hub += static_cast<double>(nn::huber<T>(p, t, delta));
      if (grads) {
        grads->params_hat[k] = static_cast<T>(inv * (w.beta_t[i] * 2.0 * static_cast<double>(p - t) +
                                                     w.beta_prev[i] * static_cast<double>(nn::huber_grad<T>(p, q, delta))));
      }
    }
  }
  out.param_t = pt * inv;
  out.param_prev = pp * inv;
  out.param_mse = mse * inv / kNumParams;
  out.param_huber = hub * inv / kNumParams;
  out.total = out.elbo_recon + out.elbo_kl + out.param_t + out.param_prev;
  return out;
}

template LossBreakdown evaluate_objective<float>(const ObjectiveInputs<float>&, const LossWeights&,
                                                 ObjectiveGrads<float>*);
template LossBreakdown evaluate_objective<double>(const ObjectiveInputs<double>&, const LossWeights&,
                                                  ObjectiveGrads<double>*);

}  // namespace ptinv
