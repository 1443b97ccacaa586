#pragma once

#include "vhed/common.hpp"

namespace vhed::nn {

struct AdamConfig {
  double alpha = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// one first/second-moment state per flat parameter vector
struct AdamState {
  Vec m, v;
  long t = 0;
  AdamConfig cfg;

  explicit AdamState(Eigen::Index n = 0, AdamConfig c = {})
      : m(Vec::Zero(n)), v(Vec::Zero(n)), cfg(c) {}

  void step(Vec& params, const Vec& grad) {
    require(params.size() == m.size() && grad.size() == m.size(), "adam: size mismatch");
    ++t;
    m = cfg.beta1 * m + (1 - cfg.beta1) * grad;
    v = cfg.beta2 * v + (1 - cfg.beta2) * grad.cwiseProduct(grad);
    double bc1 = 1 - std::pow(cfg.beta1, t);
    double bc2 = 1 - std::pow(cfg.beta2, t);
    params -= (cfg.alpha / bc1) * m.cwiseQuotient(((v / bc2).cwiseSqrt().array() + cfg.eps).matrix());
  }
};

}  // namespace vhed::nn
