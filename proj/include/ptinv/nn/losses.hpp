#pragma once

#include <cmath>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "ptinv/nn/tensor.hpp"

namespace ptinv::nn {

/// KL(N(mu, exp(logvar)) || N(0, I)) = -1/2 sum(1 + logvar - mu^2 - exp(logvar)).
template <class T>
[[nodiscard]] T kl_gaussian(std::span<const T> mu, std::span<const T> logvar) {
  if (mu.size() != logvar.size()) throw std::invalid_argument("kl_gaussian: mu and logvar lengths differ");
  T s = 0;
  for (std::size_t i = 0; i < mu.size(); ++i) s += T(1) + logvar[i] - mu[i] * mu[i] - std::exp(logvar[i]);
  return T(-0.5) * s;
}

/// Adds d KL / d mu and d KL / d logvar, scaled by `scale`.
template <class T>
void kl_gaussian_grad(std::span<const T> mu, std::span<const T> logvar, T scale, std::span<T> dmu,
                      std::span<T> dlogvar) {
  for (std::size_t i = 0; i < mu.size(); ++i) {
    dmu[i] += scale * mu[i];
    dlogvar[i] += scale * T(0.5) * (std::exp(logvar[i]) - T(1));
  }
}

/// z = mu + exp(logvar / 2) * eps.
template <class T>
[[nodiscard]] std::vector<T> reparameterize(std::span<const T> mu, std::span<const T> logvar,
                                            std::span<const T> eps) {
  if (mu.size() != logvar.size() || mu.size() != eps.size()) {
    throw std::invalid_argument("reparameterize: length mismatch");
  }
  std::vector<T> z(mu.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = mu[i] + std::exp(T(0.5) * logvar[i]) * eps[i];
  return z;
}

/// Draws eps ~ N(0, I) from rng, then as above.
template <class T>
[[nodiscard]] std::vector<T> reparameterize(std::span<const T> mu, std::span<const T> logvar,
                                            std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::vector<T> eps(mu.size());
  for (auto& e : eps) e = static_cast<T>(normal(rng));
  return reparameterize<T>(mu, logvar, eps);
}

/// Gradient of z w.r.t. mu is dz; w.r.t. logvar is dz * exp(logvar/2) * eps / 2.
template <class T>
void reparameterize_grad(std::span<const T> logvar, std::span<const T> eps, std::span<const T> dz,
                         std::span<T> dmu, std::span<T> dlogvar) {
  for (std::size_t i = 0; i < dz.size(); ++i) {
    dmu[i] += dz[i];
    dlogvar[i] += dz[i] * T(0.5) * std::exp(T(0.5) * logvar[i]) * eps[i];
  }
}

template <class T>
[[nodiscard]] T huber(T pred, T target, T delta) {
  const T d = pred - target;
  const T a = std::abs(d);
  return a <= delta ? T(0.5) * d * d : delta * (a - T(0.5) * delta);
}

/// d huber / d pred.
template <class T>
[[nodiscard]] T huber_grad(T pred, T target, T delta) {
  const T d = pred - target;
  if (std::abs(d) <= delta) return d;
  return d > T(0) ? delta : -delta;
}

template <class T>
[[nodiscard]] T mse(std::span<const T> pred, std::span<const T> target) {
  if (pred.size() != target.size() || pred.empty()) throw std::invalid_argument("mse: length mismatch");
  T s = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += (pred[i] - target[i]) * (pred[i] - target[i]);
  return s / static_cast<T>(pred.size());
}

}  // namespace ptinv::nn
