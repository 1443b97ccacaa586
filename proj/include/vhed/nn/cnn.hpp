#pragma once

#include <numeric>
#include <random>
#include <variant>

#include "vhed/nn/adam.hpp"
#include "vhed/nn/layers.hpp"

namespace vhed::nn {

struct LayerDesc {
  enum class Kind { conv, batchnorm, leaky_relu, maxpool, dense, softmax };
  Kind kind = Kind::conv;
  int filters = 0, kh = 0, kw = 0;  // conv
  int pm = 0, pn = 0;               // maxpool partition
  int units = 0;                    // dense outputs
  double eps = 1e-5;                // batchnorm

  static LayerDesc conv(int filters, int kh, int kw) {
    return {Kind::conv, filters, kh, kw, 0, 0, 0, 0};
  }
  static LayerDesc batchnorm(double eps = 1e-5) { return {Kind::batchnorm, 0, 0, 0, 0, 0, 0, eps}; }
  static LayerDesc leaky_relu() { return {Kind::leaky_relu, 0, 0, 0, 0, 0, 0, 0}; }
  static LayerDesc maxpool(int m, int n) { return {Kind::maxpool, 0, 0, 0, m, n, 0, 0}; }
  static LayerDesc dense(int units) { return {Kind::dense, 0, 0, 0, 0, 0, units, 0}; }
  static LayerDesc softmax() { return {Kind::softmax, 0, 0, 0, 0, 0, 0, 0}; }
};

struct CnnSpec {
  int input_h = 0, input_w = 0, input_c = 1;
  std::vector<LayerDesc> layers;
};

// DN architecture: 33x33x1 -> conv 10@3x3 + BN -> leaky ReLU -> dense(2) -> softmax
inline CnnSpec cnn_dn_spec() {
  CnnSpec s;
  s.input_h = 33;
  s.input_w = 33;
  s.layers = {LayerDesc::conv(10, 3, 3), LayerDesc::batchnorm(), LayerDesc::leaky_relu(),
              LayerDesc::dense(2), LayerDesc::softmax()};
  return s;
}

// VHED architecture: 128x256x1 -> 3 x [conv 5x5 + BN -> leaky ReLU -> maxpool 2x2]
// with 15/20/25 filters -> dense(2) -> softmax
inline CnnSpec cnn_vhed_spec() {
  CnnSpec s;
  s.input_h = 128;
  s.input_w = 256;
  s.layers = {LayerDesc::conv(15, 5, 5), LayerDesc::batchnorm(), LayerDesc::leaky_relu(),
              LayerDesc::maxpool(2, 2),
              LayerDesc::conv(20, 5, 5), LayerDesc::batchnorm(), LayerDesc::leaky_relu(),
              LayerDesc::maxpool(2, 2),
              LayerDesc::conv(25, 5, 5), LayerDesc::batchnorm(), LayerDesc::leaky_relu(),
              LayerDesc::maxpool(2, 2),
              LayerDesc::dense(2), LayerDesc::softmax()};
  return s;
}

struct DenseParams {
  Mat w;
  Vec b;
};

struct CnnParams {
  CnnSpec spec;
  std::vector<ConvKernel> convs;            // per conv layer, in order
  std::vector<BatchNormParams> batchnorms;  // per batchnorm layer, in order
  std::vector<DenseParams> denses;          // per dense layer, in order
};

struct CnnShape {
  int h, w, c;
};

inline std::vector<CnnShape> propagate_shapes(const CnnSpec& spec) {
  std::vector<CnnShape> shapes;
  CnnShape s{spec.input_h, spec.input_w, spec.input_c};
  shapes.push_back(s);
  for (const auto& l : spec.layers) {
    switch (l.kind) {
      case LayerDesc::Kind::conv:
        require(l.kh <= s.h && l.kw <= s.w, "cnn: conv kernel larger than input");
        s = {s.h - l.kh + 1, s.w - l.kw + 1, l.filters};
        break;
      case LayerDesc::Kind::maxpool:
        require(l.pm >= 1 && l.pn >= 1, "cnn: pool partition must be >= 1");
        require(s.h >= l.pm && s.w >= l.pn, "cnn: pool partition larger than input");
        s = {s.h / l.pm, s.w / l.pn, s.c};
        break;
      case LayerDesc::Kind::dense:
        s = {1, 1, l.units};
        break;
      default:
        break;
    }
    shapes.push_back(s);
  }
  return shapes;
}

inline CnnParams init_cnn(const CnnSpec& spec, std::uint64_t seed) {
  CnnParams p;
  p.spec = spec;
  std::mt19937_64 rng(seed);
  auto shapes = propagate_shapes(spec);
  for (size_t i = 0; i < spec.layers.size(); ++i) {
    const auto& l = spec.layers[i];
    const auto& in = shapes[i];
    if (l.kind == LayerDesc::Kind::conv) {
      ConvKernel k(l.kh, l.kw, in.c, l.filters);
      double s = 1.0 / std::sqrt(static_cast<double>(l.kh) * l.kw * in.c);
      std::uniform_real_distribution<double> u(-s, s);
      for (auto& x : k.k) x = u(rng);
      for (int c = 0; c < k.cout; ++c) k.bias[c] = u(rng);
      p.convs.push_back(std::move(k));
    } else if (l.kind == LayerDesc::Kind::batchnorm) {
      p.batchnorms.emplace_back(in.c, l.eps);
    } else if (l.kind == LayerDesc::Kind::dense) {
      int fan_in = in.h * in.w * in.c;
      DenseParams d;
      d.w = Mat::Zero(l.units, fan_in);
      d.b = Vec::Zero(l.units);
      double s = 1.0 / std::sqrt(static_cast<double>(fan_in));
      std::uniform_real_distribution<double> u(-s, s);
      for (int r = 0; r < d.w.rows(); ++r)
        for (int c = 0; c < d.w.cols(); ++c) d.w(r, c) = u(rng);
      for (int r = 0; r < d.b.size(); ++r) d.b[r] = u(rng);
      p.denses.push_back(std::move(d));
    }
  }
  return p;
}

inline Vec flatten(const Tensor3& t) {
  Vec v(t.size());
  for (size_t i = 0; i < t.size(); ++i) v[i] = t.v[i];
  return v;
}

// forward caches for one batch, layer by layer
struct CnnForward {
  std::vector<Batch> activations;  // activations[l] = input of layer l
  std::vector<BatchNormCache> bn_caches;
  std::vector<std::vector<PoolCache>> pool_caches;  // per pool layer, per sample
  Mat logits;                                       // N x units (pre-softmax)
  Mat probs;                                        // N x units
};

inline CnnForward cnn_forward(CnnParams& p, const Batch& input, bool training) {
  CnnForward f;
  f.activations.push_back(input);
  Batch cur = input;
  size_t ic = 0, ib = 0, ipool = 0, id = 0;
  for (const auto& l : p.spec.layers) {
    switch (l.kind) {
      case LayerDesc::Kind::conv: {
        Batch out(cur.size());
        for (size_t s = 0; s < cur.size(); ++s) out[s] = conv2d(cur[s], p.convs[ic]);
        ++ic;
        cur = std::move(out);
        break;
      }
      case LayerDesc::Kind::batchnorm: {
        BatchNormCache cache;
        cur = batchnorm_forward(cur, p.batchnorms[ib], training, &cache, training);
        f.bn_caches.push_back(std::move(cache));
        ++ib;
        break;
      }
      case LayerDesc::Kind::leaky_relu: {
        Batch out(cur.size());
        for (size_t s = 0; s < cur.size(); ++s) {
          out[s] = cur[s];
          for (auto& x : out[s].v) x = leaky_relu(x);
        }
        cur = std::move(out);
        break;
      }
      case LayerDesc::Kind::maxpool: {
        std::vector<PoolCache> pcs(cur.size());
        Batch out(cur.size());
        for (size_t s = 0; s < cur.size(); ++s) {
          pcs[s] = maxpool(cur[s], l.pm, l.pn);
          out[s] = pcs[s].out;
        }
        f.pool_caches.push_back(std::move(pcs));
        ++ipool;
        cur = std::move(out);
        break;
      }
      case LayerDesc::Kind::dense: {
        const auto& d = p.denses[id];
        Batch out(cur.size());
        f.logits.resize(cur.size(), d.w.rows());
        for (size_t s = 0; s < cur.size(); ++s) {
          Vec y = d.w * flatten(cur[s]) + d.b;
          f.logits.row(s) = y.transpose();
          out[s] = Tensor3(1, 1, static_cast<int>(y.size()));
          for (int k = 0; k < y.size(); ++k) out[s](0, 0, k) = y[k];
        }
        ++id;
        cur = std::move(out);
        break;
      }
      case LayerDesc::Kind::softmax: {
        f.probs.resize(cur.size(), cur[0].c);
        Batch out(cur.size());
        for (size_t s = 0; s < cur.size(); ++s) {
          Vec v(cur[s].c);
          for (int k = 0; k < cur[s].c; ++k) v[k] = cur[s](0, 0, k);
          Vec sm = softmax(v);
          f.probs.row(s) = sm.transpose();
          out[s] = cur[s];
          for (int k = 0; k < cur[s].c; ++k) out[s](0, 0, k) = sm[k];
        }
        cur = std::move(out);
        break;
      }
    }
    f.activations.push_back(cur);
  }
  return f;
}

struct CnnGrad {
  std::vector<ConvKernel> convs;
  std::vector<std::pair<Vec, Vec>> batchnorms;  // (d_gamma, d_beta)
  std::vector<DenseParams> denses;
};

// cross-entropy loss over the softmax outputs; labels in {0,1} one-hot
inline double cnn_loss(const Mat& probs, const std::vector<int>& labels) {
  double loss = 0;
  for (size_t s = 0; s < labels.size(); ++s) {
    double py = std::clamp(probs(static_cast<Eigen::Index>(s), labels[s]), bce_clamp, 1.0);
    loss += -std::log(py);
  }
  return loss;
}

inline CnnGrad cnn_backward(CnnParams& p, const CnnForward& f, const std::vector<int>& labels) {
  CnnGrad g;
  const size_t n = labels.size();
  // combined softmax + cross entropy: d logits = probs - onehot
  Batch delta(n);
  {
    const auto& last_shape = f.activations.back()[0];
    for (size_t s = 0; s < n; ++s) {
      delta[s] = Tensor3(1, 1, last_shape.c);
      for (int k = 0; k < last_shape.c; ++k)
        delta[s](0, 0, k) = f.probs(static_cast<Eigen::Index>(s), k) - (labels[s] == k ? 1.0 : 0.0);
    }
  }

  size_t ic = p.convs.size(), ib = p.batchnorms.size(), ipool = f.pool_caches.size(),
         id = p.denses.size();
  g.convs.resize(ic);
  g.batchnorms.resize(ib);
  g.denses.resize(id);

  for (int li = static_cast<int>(p.spec.layers.size()) - 1; li >= 0; --li) {
    const auto& l = p.spec.layers[li];
    const Batch& in = f.activations[li];
    switch (l.kind) {
      case LayerDesc::Kind::softmax:
        break;  // folded into the cross-entropy delta
      case LayerDesc::Kind::dense: {
        --id;
        const auto& d = p.denses[id];
        g.denses[id].w = Mat::Zero(d.w.rows(), d.w.cols());
        g.denses[id].b = Vec::Zero(d.b.size());
        Batch next(n);
        for (size_t s = 0; s < n; ++s) {
          Vec dy(delta[s].c);
          for (int k = 0; k < delta[s].c; ++k) dy[k] = delta[s](0, 0, k);
          Vec flat = flatten(in[s]);
          g.denses[id].w += dy * flat.transpose();
          g.denses[id].b += dy;
          Vec dx = d.w.transpose() * dy;
          next[s] = Tensor3(in[s].h, in[s].w, in[s].c);
          for (size_t q = 0; q < next[s].size(); ++q) next[s].v[q] = dx[static_cast<Eigen::Index>(q)];
        }
        delta = std::move(next);
        break;
      }
      case LayerDesc::Kind::maxpool: {
        --ipool;
        Batch next(n);
        for (size_t s = 0; s < n; ++s)
          next[s] = maxpool_backward(f.pool_caches[ipool][s], in[s], delta[s]);
        delta = std::move(next);
        break;
      }
      case LayerDesc::Kind::leaky_relu: {
        Batch next(n);
        for (size_t s = 0; s < n; ++s) {
          next[s] = delta[s];
          for (size_t q = 0; q < next[s].size(); ++q)
            next[s].v[q] *= leaky_relu_grad(in[s].v[q]);
        }
        delta = std::move(next);
        break;
      }
      case LayerDesc::Kind::batchnorm: {
        --ib;
        Vec dg, db;
        delta = batchnorm_backward(delta, f.bn_caches[ib], p.batchnorms[ib], dg, db);
        g.batchnorms[ib] = {dg, db};
        break;
      }
      case LayerDesc::Kind::conv: {
        --ic;
        ConvKernel acc(p.convs[ic].kh, p.convs[ic].kw, p.convs[ic].cin, p.convs[ic].cout);
        Batch next(n);
        for (size_t s = 0; s < n; ++s) {
          Tensor3 dins;
          ConvKernel dk;
          conv2d_backward(in[s], p.convs[ic], delta[s], dins, dk);
          next[s] = std::move(dins);
          for (size_t q = 0; q < acc.k.size(); ++q) acc.k[q] += dk.k[q];
          acc.bias += dk.bias;
        }
        g.convs[ic] = std::move(acc);
        delta = std::move(next);
        break;
      }
    }
  }
  return g;
}

// ---- flat parameter packing for the optimizer -------------------------------

inline Eigen::Index cnn_param_count(const CnnParams& p) {
  Eigen::Index n = 0;
  for (const auto& c : p.convs) n += static_cast<Eigen::Index>(c.k.size()) + c.bias.size();
  for (const auto& b : p.batchnorms) n += b.gamma.size() + b.beta.size();
  for (const auto& d : p.denses) n += d.w.size() + d.b.size();
  return n;
}

inline Vec cnn_pack(const CnnParams& p) {
  Vec v(cnn_param_count(p));
  Eigen::Index o = 0;
  for (const auto& c : p.convs) {
    for (double x : c.k) v[o++] = x;
    for (int i = 0; i < c.bias.size(); ++i) v[o++] = c.bias[i];
  }
  for (const auto& b : p.batchnorms) {
    for (int i = 0; i < b.gamma.size(); ++i) v[o++] = b.gamma[i];
    for (int i = 0; i < b.beta.size(); ++i) v[o++] = b.beta[i];
  }
  for (const auto& d : p.denses) {
    for (int r = 0; r < d.w.rows(); ++r)
      for (int c = 0; c < d.w.cols(); ++c) v[o++] = d.w(r, c);
    for (int i = 0; i < d.b.size(); ++i) v[o++] = d.b[i];
  }
  return v;
}

inline void cnn_unpack(const Vec& v, CnnParams& p) {
  Eigen::Index o = 0;
  for (auto& c : p.convs) {
    for (auto& x : c.k) x = v[o++];
    for (int i = 0; i < c.bias.size(); ++i) c.bias[i] = v[o++];
  }
  for (auto& b : p.batchnorms) {
    for (int i = 0; i < b.gamma.size(); ++i) b.gamma[i] = v[o++];
    for (int i = 0; i < b.beta.size(); ++i) b.beta[i] = v[o++];
  }
  for (auto& d : p.denses) {
    for (int r = 0; r < d.w.rows(); ++r)
      for (int c = 0; c < d.w.cols(); ++c) d.w(r, c) = v[o++];
    for (int i = 0; i < d.b.size(); ++i) d.b[i] = v[o++];
  }
}

inline Vec cnn_grad_pack(const CnnParams& shape, const CnnGrad& g) {
  CnnParams tmp = shape;
  for (size_t i = 0; i < g.convs.size(); ++i) tmp.convs[i] = g.convs[i];
  for (size_t i = 0; i < g.batchnorms.size(); ++i) {
    tmp.batchnorms[i].gamma = g.batchnorms[i].first;
    tmp.batchnorms[i].beta = g.batchnorms[i].second;
  }
  for (size_t i = 0; i < g.denses.size(); ++i) tmp.denses[i] = g.denses[i];
  return cnn_pack(tmp);
}

// ---- training: k-fold cross validation with Adam ----------------------------

struct CnnTrainConfig {
  int folds = 5;
  int epochs = 10;
  int batch_size = 60;
  std::uint64_t seed = 1;
  AdamConfig adam;
};

struct CnnFoldMetrics {
  int fold = 0;
  double train_loss = 0;
  double val_accuracy = 0;
};

struct CnnTrainResult {
  std::vector<CnnParams> fold_params;
  std::vector<CnnFoldMetrics> fold_metrics;
};

inline std::vector<int> cnn_predict(CnnParams& p, const Batch& x) {
  std::vector<int> out;
  out.reserve(x.size());
  // inference in modest chunks; batchnorm uses running statistics
  for (size_t s = 0; s < x.size(); s += 64) {
    Batch chunk(x.begin() + s, x.begin() + std::min(x.size(), s + 64));
    CnnForward f = cnn_forward(p, chunk, false);
    for (Eigen::Index r = 0; r < f.probs.rows(); ++r)
      out.push_back(f.probs(r, 1) > f.probs(r, 0) ? 1 : 0);
  }
  return out;
}

inline CnnTrainResult train_cnn(const CnnSpec& spec, const Batch& data,
                                const std::vector<int>& labels, const CnnTrainConfig& cfg = {}) {
  require(data.size() == labels.size(), "train_cnn: sample count mismatch");
  require(cfg.folds >= 2, "train_cnn: need at least 2 folds");
  require(data.size() >= static_cast<size_t>(cfg.folds), "train_cnn: fewer samples than folds");

  std::vector<int> idx(data.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(derive_seed(cfg.seed, 0xf01d));
  std::shuffle(idx.begin(), idx.end(), rng);

  CnnTrainResult result;
  const size_t n = data.size();
  for (int fold = 0; fold < cfg.folds; ++fold) {
    size_t lo = fold * n / cfg.folds, hi = (fold + 1) * n / cfg.folds;
    std::vector<int> train_idx, val_idx;
    for (size_t i = 0; i < n; ++i)
      (i >= lo && i < hi ? val_idx : train_idx).push_back(idx[i]);
    require(train_idx.size() >= 2, "train_cnn: fold leaves too few training samples");
    require(!val_idx.empty(), "train_cnn: empty validation fold");

    CnnParams params = init_cnn(spec, derive_seed(cfg.seed, 100 + fold));
    Vec flat = cnn_pack(params);
    AdamState adam(flat.size(), cfg.adam);
    std::mt19937_64 fold_rng(derive_seed(cfg.seed, 200 + fold));

    double last_loss = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      std::shuffle(train_idx.begin(), train_idx.end(), fold_rng);
      last_loss = 0;
      for (size_t s = 0; s < train_idx.size(); s += cfg.batch_size) {
        size_t bs = std::min<size_t>(cfg.batch_size, train_idx.size() - s);
        if (bs < 2) continue;  // batchnorm training mode needs m >= 2
        Batch xb(bs);
        std::vector<int> yb(bs);
        for (size_t i = 0; i < bs; ++i) {
          xb[i] = data[train_idx[s + i]];
          yb[i] = labels[train_idx[s + i]];
        }
        cnn_unpack(flat, params);
        CnnForward f = cnn_forward(params, xb, true);
        last_loss += cnn_loss(f.probs, yb);
        CnnGrad g = cnn_backward(params, f, yb);
        Vec gflat = cnn_grad_pack(params, g);
        adam.step(flat, gflat);
      }
      if (!std::isfinite(last_loss)) throw numerical_error("train_cnn: non-finite loss");
    }
    cnn_unpack(flat, params);

    std::vector<int> preds;
    {
      Batch xv(val_idx.size());
      for (size_t i = 0; i < val_idx.size(); ++i) xv[i] = data[val_idx[i]];
      preds = cnn_predict(params, xv);
    }
    int correct = 0;
    for (size_t i = 0; i < val_idx.size(); ++i)
      if (preds[i] == labels[val_idx[i]]) ++correct;

    CnnFoldMetrics m;
    m.fold = fold;
    m.train_loss = last_loss;
    m.val_accuracy = static_cast<double>(correct) / val_idx.size();
    result.fold_metrics.push_back(m);
    result.fold_params.push_back(std::move(params));
  }
  return result;
}

}  // namespace vhed::nn
