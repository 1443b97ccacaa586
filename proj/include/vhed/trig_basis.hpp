#pragma once

#include <cmath>

#include "vhed/common.hpp"

namespace vhed {

// Orthonormal trigonometric basis on the unit circle:
//   phi_0 = (2pi)^{-1/2},  phi_{2j-1} = cos(j theta)/sqrt(pi),  phi_{2j} = sin(j theta)/sqrt(pi)
namespace trig {

constexpr int default_max_index = 32;

inline int frequency(int n) { return (n + 1) / 2; }

inline double phi(int n, double theta) {
  if (n == 0) return 1.0 / std::sqrt(2.0 * pi);
  int m = frequency(n);
  double v = (n % 2 == 1) ? std::cos(m * theta) : std::sin(m * theta);
  return v / std::sqrt(pi);
}

// evaluation matrix: (n_points x n_fun), column n = phi_n at the given angles
inline Mat evaluation_matrix(const Vec& thetas, int n_fun) {
  Mat B(thetas.size(), n_fun);
  for (int j = 0; j < thetas.size(); ++j)
    for (int n = 0; n < n_fun; ++n) B(j, n) = phi(n, thetas[j]);
  return B;
}

// tangential derivative d/dtheta on span{phi_1..phi_n}, as a coefficient matrix
// (first row/column belong to phi_0 and are zero)
inline Mat tangential_derivative(int n_fun) {
  Mat D = Mat::Zero(n_fun, n_fun);
  for (int j = 1; 2 * j < n_fun; ++j) {
    int c = 2 * j - 1, s = 2 * j;
    D(s, c) = -j;  // d/dtheta cos(j t) = -j sin(j t)
    D(c, s) = j;
  }
  return D;
}

// standard circle Hilbert transform: cos(mt) -> sin(mt), sin(mt) -> -cos(mt), const -> 0
inline Mat hilbert_unit(int n_fun) {
  Mat H = Mat::Zero(n_fun, n_fun);
  for (int j = 1; 2 * j < n_fun; ++j) {
    int c = 2 * j - 1, s = 2 * j;
    H(s, c) = 1.0;
    H(c, s) = -1.0;
  }
  return H;
}

}  // namespace trig
}  // namespace vhed
