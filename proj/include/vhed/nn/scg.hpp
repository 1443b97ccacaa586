#pragma once

#include <functional>

#include "vhed/common.hpp"

namespace vhed::nn {

// Moller's scaled conjugate gradient, full batch. Follows the Netlab formulation.
struct ScgConfig {
  int max_iterations = 300;
  double sigma0 = 1e-4;
  double lambda_min = 1e-15;
  double lambda_max = 1e100;
  double grad_tol = 1e-10;
  double step_tol = 1e-12;
  double loss_tol = 1e-12;
};

struct ScgResult {
  Vec x;
  double f = 0;
  int iterations = 0;
  std::vector<double> history;  // best-so-far loss per iteration
};

template <typename F, typename G>
ScgResult scg_minimize(Vec x, F&& func, G&& grad, const ScgConfig& cfg = {}) {
  const auto n = x.size();
  double f_old = func(x);
  if (!std::isfinite(f_old)) throw numerical_error("scg: non-finite initial loss");
  double f_now = f_old;
  Vec grad_new = grad(x);
  Vec grad_old = grad_new;
  Vec direction = -grad_new;

  double lambda = 1.0;
  bool success = true;
  int n_success = 0;
  double mu = 0, kappa = 0, theta = 0;

  ScgResult res;
  res.history.reserve(cfg.max_iterations);

  for (int it = 1; it <= cfg.max_iterations; ++it) {
    if (success) {
      mu = direction.dot(grad_new);
      if (mu >= 0) {
        direction = -grad_new;
        mu = direction.dot(grad_new);
      }
      kappa = direction.squaredNorm();
      if (kappa < cfg.grad_tol * cfg.grad_tol) break;
      double sigma = cfg.sigma0 / std::sqrt(kappa);
      Vec g_plus = grad(x + sigma * direction);
      theta = direction.dot(g_plus - grad_new) / sigma;
    }

    double delta = theta + lambda * kappa;
    if (delta <= 0) {
      delta = lambda * kappa;
      lambda = lambda - theta / kappa;
    }
    double alpha = -mu / delta;

    Vec x_new = x + alpha * direction;
    double f_new = func(x_new);
    if (!std::isfinite(f_new))
      throw numerical_error("scg: non-finite loss during line search");
    double comparison = 2.0 * (f_new - f_old) / (alpha * mu);

    if (comparison >= 0) {
      success = true;
      ++n_success;
      x = x_new;
      f_now = f_new;
    } else {
      success = false;
      f_now = f_old;
    }
    res.history.push_back(f_now);

    if (success) {
      if (std::abs(alpha) * direction.cwiseAbs().maxCoeff() < cfg.step_tol &&
          std::abs(f_new - f_old) < cfg.loss_tol) {
        res.x = x;
        res.f = f_new;
        res.iterations = it;
        return res;
      }
      f_old = f_new;
      grad_old = grad_new;
      grad_new = grad(x);
      if (grad_new.squaredNorm() < cfg.grad_tol * cfg.grad_tol) break;
    }

    if (comparison < 0.25) lambda = std::min(4.0 * lambda, cfg.lambda_max);
    if (comparison > 0.75) lambda = std::max(0.5 * lambda, cfg.lambda_min);

    if (n_success == n) {
      direction = -grad_new;
      n_success = 0;
    } else if (success) {
      double gamma = (grad_old - grad_new).dot(grad_new) / mu;
      direction = gamma * direction - grad_new;
    }
    res.iterations = it;
  }

  res.x = x;
  res.f = f_now;
  return res;
}

}  // namespace vhed::nn
