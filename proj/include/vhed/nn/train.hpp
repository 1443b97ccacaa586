#pragma once

#include <optional>

#include "vhed/nn/adam.hpp"
#include "vhed/nn/fcnn.hpp"
#include "vhed/nn/scg.hpp"

namespace vhed::nn {

enum class Optimizer { scg, adam };

struct FcnnTrainConfig {
  int hidden = 30;
  Optimizer optimizer = Optimizer::scg;
  int max_epochs = 300;        // SCG iterations / Adam epochs
  std::uint64_t seed = 1;
  double validation_fraction = 0.0;  // >0: return the lowest-validation-loss parameters
  bool standardize_inputs = true;    // per-feature affine map fitted on the training set
  AdamConfig adam;
  int adam_batch = 60;
};

// trained model: parameters plus the input standardization fitted at training time
struct FcnnModel {
  FcnnParams params;
  Vec feat_shift, feat_scale;  // x' = (x - shift) * scale

  Mat apply_standardization(const Mat& x) const {
    if (feat_shift.size() == 0) return x;
    return (x.rowwise() - feat_shift.transpose()).array().rowwise() *
           feat_scale.transpose().array();
  }
  Vec predict_proba(const Mat& x) const {
    return fcnn_forward_batch(params, apply_standardization(x));
  }
  std::vector<int> predict(const Mat& x, double threshold = 0.5) const {
    Vec p = predict_proba(x);
    std::vector<int> out(p.size());
    for (int i = 0; i < p.size(); ++i) out[i] = p[i] > threshold ? 1 : 0;
    return out;
  }
};

struct FcnnTrainResult {
  FcnnModel model;
  std::vector<double> loss_history;  // best-so-far training loss
  int iterations = 0;
  double final_loss = 0;
};

inline FcnnTrainResult train_fcnn(const Mat& x_raw, const Vec& y, const FcnnTrainConfig& cfg = {}) {
  require(x_raw.rows() == y.size(), "train_fcnn: sample count mismatch");
  require(x_raw.rows() >= 1, "train_fcnn: empty training set");

  FcnnModel model;
  if (cfg.standardize_inputs) {
    model.feat_shift = x_raw.colwise().mean();
    Vec var = (x_raw.rowwise() - model.feat_shift.transpose()).array().square().colwise().mean();
    model.feat_scale = (var.array() + 1e-12).rsqrt();
  }
  Mat x = model.apply_standardization(x_raw);

  // optional validation split: deterministic shuffled tail
  Mat x_tr = x;
  Vec y_tr = y;
  Mat x_val;
  Vec y_val;
  if (cfg.validation_fraction > 0 && x.rows() >= 4) {
    std::vector<int> idx(x.rows());
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(derive_seed(cfg.seed, 0x5a1));
    std::shuffle(idx.begin(), idx.end(), rng);
    int n_val = std::max<int>(1, static_cast<int>(cfg.validation_fraction * x.rows()));
    int n_tr = static_cast<int>(x.rows()) - n_val;
    x_tr.resize(n_tr, x.cols());
    y_tr.resize(n_tr);
    x_val.resize(n_val, x.cols());
    y_val.resize(n_val);
    for (int i = 0; i < n_tr; ++i) {
      x_tr.row(i) = x.row(idx[i]);
      y_tr[i] = y[idx[i]];
    }
    for (int i = 0; i < n_val; ++i) {
      x_val.row(i) = x.row(idx[n_tr + i]);
      y_val[i] = y[idx[n_tr + i]];
    }
  }

  const int in_dim = static_cast<int>(x.cols());
  FcnnParams init = FcnnParams::random_init(in_dim, cfg.hidden, cfg.seed);
  FcnnTrainResult res;

  if (cfg.max_epochs == 0) {
    res.model = model;
    res.model.params = init;
    res.final_loss = fcnn_loss(init, x_tr, y_tr);
    return res;
  }

  double best_val = std::numeric_limits<double>::infinity();
  FcnnParams best_params = init;
  auto track_validation = [&](const FcnnParams& p) {
    if (y_val.size() == 0) return;
    double v = fcnn_loss(p, x_val, y_val);
    if (v < best_val) {
      best_val = v;
      best_params = p;
    }
  };

  if (cfg.optimizer == Optimizer::scg) {
    auto f = [&](const Vec& v) {
      return fcnn_loss(FcnnParams::unpack(v, in_dim, cfg.hidden), x_tr, y_tr);
    };
    auto g = [&](const Vec& v) {
      FcnnGrad gr = fcnn_backprop(FcnnParams::unpack(v, in_dim, cfg.hidden), x_tr, y_tr);
      FcnnParams as_params;
      as_params.w1 = gr.w1;
      as_params.b1 = gr.b1;
      as_params.w2 = gr.w2;
      as_params.b2 = gr.b2;
      return as_params.pack();
    };
    ScgConfig scfg;
    scfg.max_iterations = cfg.max_epochs;
    ScgResult sr = scg_minimize(init.pack(), f, g, scfg);
    res.model = model;
    res.model.params = FcnnParams::unpack(sr.x, in_dim, cfg.hidden);
    track_validation(res.model.params);
    res.loss_history = std::move(sr.history);
    res.iterations = sr.iterations;
    res.final_loss = sr.f;
  } else {
    FcnnParams p = init;
    Vec flat = p.pack();
    AdamState adam(flat.size(), cfg.adam);
    std::mt19937_64 rng(derive_seed(cfg.seed, 0xada));
    std::vector<int> order(x_tr.rows());
    std::iota(order.begin(), order.end(), 0);
    double best_seen = std::numeric_limits<double>::infinity();
    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), rng);
      for (int s = 0; s < static_cast<int>(order.size()); s += cfg.adam_batch) {
        int bs = std::min<int>(cfg.adam_batch, static_cast<int>(order.size()) - s);
        Mat xb(bs, x_tr.cols());
        Vec yb(bs);
        for (int i = 0; i < bs; ++i) {
          xb.row(i) = x_tr.row(order[s + i]);
          yb[i] = y_tr[order[s + i]];
        }
        p = FcnnParams::unpack(flat, in_dim, cfg.hidden);
        FcnnGrad gr = fcnn_backprop(p, xb, yb);
        FcnnParams gp;
        gp.w1 = gr.w1;
        gp.b1 = gr.b1;
        gp.w2 = gr.w2;
        gp.b2 = gr.b2;
        Vec gflat = gp.pack();
        adam.step(flat, gflat);
      }
      p = FcnnParams::unpack(flat, in_dim, cfg.hidden);
      double l = fcnn_loss(p, x_tr, y_tr);
      if (!std::isfinite(l)) throw numerical_error("train_fcnn: non-finite loss");
      best_seen = std::min(best_seen, l);
      res.loss_history.push_back(best_seen);
      track_validation(p);
      res.final_loss = l;
    }
    res.model = model;
    res.model.params = p;
    res.iterations = cfg.max_epochs;
  }

  if (y_val.size() > 0) res.model.params = best_params;
  return res;
}

}  // namespace vhed::nn
