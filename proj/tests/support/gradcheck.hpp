#pragma once

// Central finite-difference checks for double-precision layers and models.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "ptinv/nn/tensor.hpp"

namespace gradcheck {

using Tensor = ptinv::nn::Tensor<double>;

inline constexpr double kEps = 1e-4;
inline constexpr double kTolerance = 1e-4;
// Gradients below this size are compared absolutely (eps^2 truncation noise).
inline constexpr double kFloor = 1e-6;

struct Result {
  double max_rel_error = 0;
  std::string worst;  // "<name>[index] analytic vs numeric"
};

inline void merge(Result& into, const Result& r) {
  if (r.max_rel_error > into.max_rel_error) into = r;
}

/// Compares `analytic` (d loss / d target) against central differences of
/// `loss` while perturbing `target` in place. At most `max_checks` entries are
/// probed, chosen with `rng` when the tensor is larger.
inline Result check(const std::string& name, Tensor& target, const Tensor& analytic,
                    const std::function<double()>& loss, std::mt19937_64& rng, std::size_t max_checks = 256) {
  Result r;
  std::vector<std::size_t> idx(target.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  if (idx.size() > max_checks) {
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(max_checks);
  }
  for (std::size_t i : idx) {
    const double keep = target[i];
    target[i] = keep + kEps;
    const double up = loss();
    target[i] = keep - kEps;
    const double down = loss();
    target[i] = keep;
    const double numeric = (up - down) / (2 * kEps);
    const double e = oracle::rel_error(analytic[i], numeric, kFloor);
    if (e > r.max_rel_error) {
      r.max_rel_error = e;
      r.worst = name + "[" + std::to_string(i) + "] " + std::to_string(analytic[i]) + " vs " + std::to_string(numeric);
    }
  }
  return r;
}

inline Tensor random_tensor(std::vector<std::size_t> shape, std::mt19937_64& rng, double lo = -1, double hi = 1) {
  Tensor t(std::move(shape));
  std::uniform_real_distribution<double> u(lo, hi);
  for (auto& v : t.data) v = u(rng);
  return t;
}

inline double dot(const Tensor& a, const Tensor& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace gradcheck
