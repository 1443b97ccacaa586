#pragma once

#include <algorithm>
#include <cmath>

#include "vhed/nn/tensor.hpp"

namespace vhed::nn {

// ---- activations -----------------------------------------------------------

inline double leaky_relu(double x) { return x > 0 ? x : 0.001 * x; }
inline double leaky_relu_grad(double x) { return x > 0 ? 1.0 : 0.001; }

inline double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

// max-shifted softmax
inline Vec softmax(const Vec& v) {
  Vec e = (v.array() - v.maxCoeff()).exp();
  return e / e.sum();
}

// ---- binary cross entropy ---------------------------------------------------

constexpr double bce_clamp = 1e-12;

inline double bce_loss(const Vec& y_pred, const Vec& y_true) {
  require(y_pred.size() == y_true.size(), "bce_loss: shape mismatch");
  double loss = 0;
  for (int i = 0; i < y_pred.size(); ++i) {
    double p = std::clamp(y_pred[i], bce_clamp, 1.0 - bce_clamp);
    loss += -y_true[i] * std::log(p) - (1.0 - y_true[i]) * std::log(1.0 - p);
  }
  return loss;
}

// ---- convolution (valid region, stride 1, channels summed) ------------------
// kernel layout: (kh, kw, c_in, c_out) flattened with c_out fastest;
// correlation form a(i,j) = b + sum_{m,n} K(m,n) a_{l-1}(i+m, j+n) -- the kernel
// flip relative to the textbook convolution is absorbed by the learned weights

struct ConvKernel {
  int kh = 0, kw = 0, cin = 0, cout = 0;
  std::vector<double> k;  // kh*kw*cin*cout
  Vec bias;

  ConvKernel() = default;
  ConvKernel(int kh_, int kw_, int cin_, int cout_)
      : kh(kh_), kw(kw_), cin(cin_), cout(cout_),
        k(static_cast<size_t>(kh_) * kw_ * cin_ * cout_, 0.0), bias(Vec::Zero(cout_)) {}

  double& at(int m, int n, int ci, int co) {
    return k[((static_cast<size_t>(m) * kw + n) * cin + ci) * cout + co];
  }
  double at(int m, int n, int ci, int co) const {
    return k[((static_cast<size_t>(m) * kw + n) * cin + ci) * cout + co];
  }
};

inline Tensor3 conv2d(const Tensor3& in, const ConvKernel& ker) {
  require(ker.cin == in.c, "conv2d: channel mismatch");
  require(ker.kh <= in.h && ker.kw <= in.w, "conv2d: kernel larger than input");
  Tensor3 out(in.h - ker.kh + 1, in.w - ker.kw + 1, ker.cout);
  for (int i = 0; i < out.h; ++i)
    for (int j = 0; j < out.w; ++j)
      for (int co = 0; co < ker.cout; ++co) {
        double acc = ker.bias[co];
        for (int m = 0; m < ker.kh; ++m)
          for (int n = 0; n < ker.kw; ++n)
            for (int ci = 0; ci < ker.cin; ++ci)
              acc += ker.at(m, n, ci, co) * in(i + m, j + n, ci);
        out(i, j, co) = acc;
      }
  return out;
}

inline void conv2d_backward(const Tensor3& in, const ConvKernel& ker, const Tensor3& d_out,
                            Tensor3& d_in, ConvKernel& d_ker) {
  d_in = Tensor3(in.h, in.w, in.c);
  d_ker = ConvKernel(ker.kh, ker.kw, ker.cin, ker.cout);
  for (int i = 0; i < d_out.h; ++i)
    for (int j = 0; j < d_out.w; ++j)
      for (int co = 0; co < ker.cout; ++co) {
        double g = d_out(i, j, co);
        d_ker.bias[co] += g;
        for (int m = 0; m < ker.kh; ++m)
          for (int n = 0; n < ker.kw; ++n)
            for (int ci = 0; ci < ker.cin; ++ci) {
              d_ker.at(m, n, ci, co) += g * in(i + m, j + n, ci);
              d_in(i + m, j + n, ci) += g * ker.at(m, n, ci, co);
            }
      }
}

// ---- max pooling with floor partition q = floor(p/m), r = floor(s/n) --------

struct PoolCache {
  Tensor3 out;
  std::vector<int> argmax;  // flat input index per output element
};

inline PoolCache maxpool(const Tensor3& in, int m, int n) {
  require(m >= 1 && n >= 1, "maxpool: partition sizes must be >= 1");
  require(in.h >= m && in.w >= n, "maxpool: partition larger than input");
  int q = in.h / m, r = in.w / n;  // trailing rows/cols beyond q*m, r*n are dropped
  PoolCache pc;
  pc.out = Tensor3(q, r, in.c);
  pc.argmax.assign(pc.out.size(), -1);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < r; ++j)
      for (int ch = 0; ch < in.c; ++ch) {
        double best = -std::numeric_limits<double>::infinity();
        int best_idx = -1;
        for (int a = 0; a < m; ++a)
          for (int b = 0; b < n; ++b) {
            int ii = i * m + a, jj = j * n + b;
            double val = in(ii, jj, ch);
            if (val > best) {
              best = val;
              best_idx = (ii * in.w + jj) * in.c + ch;
            }
          }
        pc.out(i, j, ch) = best;
        pc.argmax[(static_cast<size_t>(i) * r + j) * in.c + ch] = best_idx;
      }
  return pc;
}

inline Tensor3 maxpool_backward(const PoolCache& pc, const Tensor3& in_shape,
                                const Tensor3& d_out) {
  Tensor3 d_in(in_shape.h, in_shape.w, in_shape.c);
  for (size_t i = 0; i < d_out.size(); ++i) d_in.v[pc.argmax[i]] += d_out.v[i];
  return d_in;
}

// ---- batch normalization (per channel over batch x h x w) -------------------

struct BatchNormParams {
  Vec gamma, beta;
  Vec running_mean, running_var;
  double eps = 1e-5;
  double momentum = 0.1;

  explicit BatchNormParams(int channels = 0, double eps_ = 1e-5)
      : gamma(Vec::Ones(channels)), beta(Vec::Zero(channels)),
        running_mean(Vec::Zero(channels)), running_var(Vec::Ones(channels)), eps(eps_) {}
};

struct BatchNormCache {
  Batch xhat;
  Vec inv_std;
  Vec mean;
};

inline Batch batchnorm_forward(const Batch& in, BatchNormParams& p, bool training,
                               BatchNormCache* cache = nullptr, bool update_running = true) {
  require(!in.empty(), "batchnorm_forward: empty batch");
  const int C = in[0].c;
  require(p.gamma.size() == C, "batchnorm_forward: channel mismatch");
  const size_t per = static_cast<size_t>(in[0].h) * in[0].w;
  const double m_count = static_cast<double>(in.size() * per);
  require(!training || m_count >= 2, "batchnorm_forward: training mode needs batch size >= 2");

  Vec mean(C), var(C);
  if (training) {
    mean.setZero();
    for (const auto& t : in)
      for (int i = 0; i < t.h; ++i)
        for (int j = 0; j < t.w; ++j)
          for (int c = 0; c < C; ++c) mean[c] += t(i, j, c);
    mean /= m_count;
    var.setZero();
    for (const auto& t : in)
      for (int i = 0; i < t.h; ++i)
        for (int j = 0; j < t.w; ++j)
          for (int c = 0; c < C; ++c) {
            double d = t(i, j, c) - mean[c];
            var[c] += d * d;
          }
    var /= m_count;
    if (update_running) {
      p.running_mean = (1 - p.momentum) * p.running_mean + p.momentum * mean;
      p.running_var = (1 - p.momentum) * p.running_var + p.momentum * var;
    }
  } else {
    mean = p.running_mean;
    var = p.running_var;
  }

  Vec inv_std = (var.array() + p.eps).rsqrt();
  Batch out(in.size());
  Batch xhat(in.size());
  for (size_t s = 0; s < in.size(); ++s) {
    out[s] = Tensor3(in[s].h, in[s].w, C);
    xhat[s] = Tensor3(in[s].h, in[s].w, C);
    for (int i = 0; i < in[s].h; ++i)
      for (int j = 0; j < in[s].w; ++j)
        for (int c = 0; c < C; ++c) {
          double xh = (in[s](i, j, c) - mean[c]) * inv_std[c];
          xhat[s](i, j, c) = xh;
          out[s](i, j, c) = p.gamma[c] * xh + p.beta[c];
        }
  }
  if (cache) {
    cache->xhat = std::move(xhat);
    cache->inv_std = inv_std;
    cache->mean = mean;
  }
  return out;
}

inline Batch batchnorm_backward(const Batch& d_out, const BatchNormCache& cache,
                                const BatchNormParams& p, Vec& d_gamma, Vec& d_beta) {
  const int C = p.gamma.size();
  const double m_count =
      static_cast<double>(d_out.size()) * d_out[0].h * d_out[0].w;
  d_gamma = Vec::Zero(C);
  d_beta = Vec::Zero(C);
  Vec sum_dxhat = Vec::Zero(C), sum_dxhat_xhat = Vec::Zero(C);
  for (size_t s = 0; s < d_out.size(); ++s)
    for (int i = 0; i < d_out[s].h; ++i)
      for (int j = 0; j < d_out[s].w; ++j)
        for (int c = 0; c < C; ++c) {
          double g = d_out[s](i, j, c), xh = cache.xhat[s](i, j, c);
          d_gamma[c] += g * xh;
          d_beta[c] += g;
          sum_dxhat[c] += g * p.gamma[c];
          sum_dxhat_xhat[c] += g * p.gamma[c] * xh;
        }
  Batch d_in(d_out.size());
  for (size_t s = 0; s < d_out.size(); ++s) {
    d_in[s] = Tensor3(d_out[s].h, d_out[s].w, C);
    for (int i = 0; i < d_out[s].h; ++i)
      for (int j = 0; j < d_out[s].w; ++j)
        for (int c = 0; c < C; ++c) {
          double dxhat = d_out[s](i, j, c) * p.gamma[c];
          d_in[s](i, j, c) = cache.inv_std[c] / m_count *
                             (m_count * dxhat - sum_dxhat[c] -
                              cache.xhat[s](i, j, c) * sum_dxhat_xhat[c]);
        }
  }
  return d_in;
}

}  // namespace vhed::nn
