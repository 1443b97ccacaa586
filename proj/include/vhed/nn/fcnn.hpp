#pragma once

#include <random>

#include "vhed/nn/layers.hpp"

namespace vhed::nn {

// shallow fully connected net: 1024 -> hidden (sigmoid) -> 1 (sigmoid)
struct FcnnParams {
  Mat w1;  // hidden x in
  Vec b1;
  Mat w2;  // 1 x hidden
  double b2 = 0;

  int input_dim() const { return static_cast<int>(w1.cols()); }
  int hidden_dim() const { return static_cast<int>(w1.rows()); }
  Eigen::Index parameter_count() const { return w1.size() + b1.size() + w2.size() + 1; }

  static FcnnParams zeros(int in_dim = 1024, int hidden = 30) {
    FcnnParams p;
    p.w1 = Mat::Zero(hidden, in_dim);
    p.b1 = Vec::Zero(hidden);
    p.w2 = Mat::Zero(1, hidden);
    p.b2 = 0;
    return p;
  }

  // uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)] per layer
  static FcnnParams random_init(int in_dim, int hidden, std::uint64_t seed) {
    FcnnParams p = zeros(in_dim, hidden);
    std::mt19937_64 rng(seed);
    double s1 = 1.0 / std::sqrt(static_cast<double>(in_dim));
    double s2 = 1.0 / std::sqrt(static_cast<double>(hidden));
    std::uniform_real_distribution<double> u1(-s1, s1), u2(-s2, s2);
    for (int i = 0; i < p.w1.rows(); ++i)
      for (int j = 0; j < p.w1.cols(); ++j) p.w1(i, j) = u1(rng);
    for (int i = 0; i < p.b1.size(); ++i) p.b1[i] = u1(rng);
    for (int j = 0; j < p.w2.cols(); ++j) p.w2(0, j) = u2(rng);
    p.b2 = u2(rng);
    return p;
  }

  Vec pack() const {
    Vec v(parameter_count());
    Eigen::Index o = 0;
    for (int i = 0; i < w1.rows(); ++i)
      for (int j = 0; j < w1.cols(); ++j) v[o++] = w1(i, j);
    for (int i = 0; i < b1.size(); ++i) v[o++] = b1[i];
    for (int j = 0; j < w2.cols(); ++j) v[o++] = w2(0, j);
    v[o++] = b2;
    return v;
  }
  static FcnnParams unpack(const Vec& v, int in_dim, int hidden) {
    FcnnParams p = zeros(in_dim, hidden);
    Eigen::Index o = 0;
    for (int i = 0; i < hidden; ++i)
      for (int j = 0; j < in_dim; ++j) p.w1(i, j) = v[o++];
    for (int i = 0; i < hidden; ++i) p.b1[i] = v[o++];
    for (int j = 0; j < hidden; ++j) p.w2(0, j) = v[o++];
    p.b2 = v[o++];
    return p;
  }
};

inline double fcnn_forward(const FcnnParams& p, const Vec& x) {
  require(x.size() == p.w1.cols(), "fcnn_forward: input length mismatch");
  Vec h = (p.w1 * x + p.b1).unaryExpr([](double t) { return sigmoid(t); });
  return sigmoid((p.w2 * h)(0) + p.b2);
}

// rows of X are samples
inline Vec fcnn_forward_batch(const FcnnParams& p, const Mat& x) {
  require(x.cols() == p.w1.cols(), "fcnn_forward_batch: input length mismatch");
  Mat h = ((p.w1 * x.transpose()).colwise() + p.b1)
              .unaryExpr([](double t) { return sigmoid(t); });
  Vec z = (p.w2 * h).transpose().col(0).array() + p.b2;
  return z.unaryExpr([](double t) { return sigmoid(t); });
}

struct FcnnGrad {
  Mat w1;
  Vec b1;
  Mat w2;
  double b2 = 0;
};

// exact gradient of bce_loss(fcnn_forward(.), y) summed over the batch
inline FcnnGrad fcnn_backprop(const FcnnParams& p, const Mat& x, const Vec& y) {
  require(x.rows() == y.size(), "fcnn_backprop: sample count mismatch");
  require(x.cols() == p.w1.cols(), "fcnn_backprop: input length mismatch");
  Mat h = ((p.w1 * x.transpose()).colwise() + p.b1)
              .unaryExpr([](double t) { return sigmoid(t); });       // hidden x N
  Vec z2 = (p.w2 * h).transpose().col(0).array() + p.b2;             // N
  Vec yp = z2.unaryExpr([](double t) { return sigmoid(t); });

  // d bce / d z2 = clamp-aware (p - y); the clamp only gates the log, so use p - y
  Vec dz2 = yp - y;                                                  // N
  FcnnGrad g;
  g.w2 = (h * dz2).transpose();                                      // 1 x hidden
  g.b2 = dz2.sum();
  Mat dh = p.w2.transpose() * dz2.transpose();                       // hidden x N
  Mat dz1 = dh.array() * h.array() * (1.0 - h.array());              // sigmoid'
  g.w1 = dz1 * x;                                                    // hidden x in
  g.b1 = dz1.rowwise().sum();
  return g;
}

inline double fcnn_loss(const FcnnParams& p, const Mat& x, const Vec& y) {
  return bce_loss(fcnn_forward_batch(p, x), y);
}

}  // namespace vhed::nn
