#pragma once

#include <vector>

#include "vhed/common.hpp"

namespace vhed::nn {

// dense (height, width, channels) tensor, row-major with channels fastest
struct Tensor3 {
  int h = 0, w = 0, c = 0;
  std::vector<double> v;

  Tensor3() = default;
  Tensor3(int h_, int w_, int c_) : h(h_), w(w_), c(c_), v(static_cast<size_t>(h_) * w_ * c_, 0.0) {}

  double& operator()(int i, int j, int k) { return v[(static_cast<size_t>(i) * w + j) * c + k]; }
  double operator()(int i, int j, int k) const {
    return v[(static_cast<size_t>(i) * w + j) * c + k];
  }
  size_t size() const { return v.size(); }
  void fill(double x) { std::fill(v.begin(), v.end(), x); }
  bool same_shape(const Tensor3& o) const { return h == o.h && w == o.w && c == o.c; }
};

using Batch = std::vector<Tensor3>;

}  // namespace vhed::nn
