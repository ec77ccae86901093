#pragma once

// Objective semantics shared by the unit tests and the acceptance run.

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "gradcheck.hpp"
#include "grad_suites.hpp"
#include "ptinv/model/objective.hpp"
#include "ptinv/model/vae.hpp"
#include "ptinv/nn/losses.hpp"

namespace loss_checks {

using gradcheck::Tensor;

struct ZeroPoint {
  double total = 1;
  double max_abs_grad = 1;
};

/// Perfect reconstruction, p_hat = p_t = p_prev, standard-normal posterior.
inline ZeroPoint zero_point(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t B = 3, M = 16, D = 4;
  const Tensor mel = gradcheck::random_tensor({B, M}, rng, 0, 1);
  const Tensor p = gradcheck::random_tensor({B, 6}, rng, 0, 1);
  const Tensor zeros({B, D}, 0.0);
  const ptinv::ObjectiveInputs<double> in{&mel, &mel, &zeros, &zeros, &p, &p, &p, 0};
  ptinv::ObjectiveGrads<double> g;
  ZeroPoint r;
  r.total = ptinv::evaluate_objective(in, grad_suites::random_weights(rng), &g).total;
  r.max_abs_grad = 0;
  for (const Tensor* t : {&g.recon, &g.mu, &g.logvar, &g.params_hat}) {
    for (double v : t->data) r.max_abs_grad = std::max(r.max_abs_grad, std::abs(v));
  }
  return r;
}

/// Largest |gradient| over one parameter group.
struct GroupGrad {
  double max_abs = 0;
};

struct HeadAblation {
  GroupGrad projector_without_param_terms;   // must be exactly 0
  GroupGrad recon_without_elbo;              // must be exactly 0
  GroupGrad recon_without_param_terms;       // should be non-zero
  GroupGrad projector_without_elbo;          // should be non-zero
};

inline HeadAblation head_ablation(std::uint64_t seed) {
  const auto cfg = grad_suites::small_config();
  auto model = ptinv::VaeModel<double>::create(cfg, seed);
  std::mt19937_64 rng(seed);
  const std::size_t B = 4;
  const Tensor mel = gradcheck::random_tensor({B, cfg.input_dim}, rng, 0, 1);
  const Tensor eps = gradcheck::random_tensor({B, cfg.latent_dim}, rng, -1, 1);
  const Tensor pt = gradcheck::random_tensor({B, 6}, rng, 0, 1), pp = gradcheck::random_tensor({B, 6}, rng, 0, 1);
  const std::array groups{ptinv::ParamGroup::encoder, ptinv::ParamGroup::reconstruction,
                          ptinv::ParamGroup::projector};

  auto grads_for = [&](const ptinv::LossWeights& w) {
    const auto trace = model.forward(mel, &eps);
    const Tensor recon = trace.dec.back().reshaped({B, cfg.input_dim});
    const ptinv::ObjectiveInputs<double> in{&mel, &recon, &trace.mu, &trace.logvar, &trace.projector.out[3],
                                            &pt, &pp, 0};
    ptinv::ObjectiveGrads<double> g;
    (void)ptinv::evaluate_objective(in, w, &g);
    auto grad = model.zeros_like();
    model.backward(trace, {g.recon, g.params_hat, g.mu, g.logvar}, grad, groups);
    return grad;
  };
  auto largest = [](auto params) {
    GroupGrad r;
    for (auto& [name, t] : params) {
      for (double v : t->data) r.max_abs = std::max(r.max_abs, std::abs(v));
    }
    return r;
  };

  ptinv::LossWeights no_params = grad_suites::random_weights(rng);
  no_params.beta_t.fill(0.0);
  no_params.beta_prev.fill(0.0);
  ptinv::LossWeights no_elbo = grad_suites::random_weights(rng);
  no_elbo.elbo = 0.0;

  HeadAblation r;
  auto g1 = grads_for(no_params);
  r.projector_without_param_terms = largest(g1.named_params(ptinv::ParamGroup::projector));
  r.recon_without_param_terms = largest(g1.named_params(ptinv::ParamGroup::reconstruction));
  auto g2 = grads_for(no_elbo);
  r.recon_without_elbo = largest(g2.named_params(ptinv::ParamGroup::reconstruction));
  r.projector_without_elbo = largest(g2.named_params(ptinv::ParamGroup::projector));
  return r;
}

struct KlMonteCarlo {
  double closed = 0, mean = 0, standard_error = 0;
};

/// KL(q||p) = E_q[log q(z) - log p(z)], estimated per sample and summed over
/// dimensions, against the closed form.
inline KlMonteCarlo kl_monte_carlo(std::uint64_t seed, int n = 100000) {
  const std::vector<double> mu{0.7, -1.2, 0.1}, lv{-0.5, 0.8, 0.0};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01(0, 1);
  double sum = 0, sum2 = 0;
  for (int s = 0; s < n; ++s) {
    double term = 0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      const double sd = std::exp(0.5 * lv[i]);
      const double e = n01(rng);
      const double z = mu[i] + sd * e;
      term += (-0.5 * e * e - std::log(sd)) - (-0.5 * z * z);
    }
    sum += term;
    sum2 += term * term;
  }
  KlMonteCarlo r;
  r.closed = ptinv::nn::kl_gaussian<double>(mu, lv);
  r.mean = sum / n;
  r.standard_error = std::sqrt((sum2 / n - r.mean * r.mean) / n);
  return r;
}

}  // namespace loss_checks
