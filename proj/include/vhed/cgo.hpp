#pragma once

#include <Eigen/LU>
#include <cmath>

#include "vhed/fem.hpp"
#include "vhed/trig_basis.hpp"

namespace vhed {

struct CgoConfig {
  int n_theta = 64;      // output boundary grid (matches the CNN z sampling)
  int max_freq = 24;     // BIE function space: frequencies 0..max_freq (>= data band 16)
  int n_quad = 256;      // quadrature grid for the e^{ikz} multiplication operators
  double max_abs_k = 4.0;
  double residual_tol = 1e-8;

  int n_fun() const { return 2 * max_freq + 1; }
};

// boundary operators for the CGO boundary integral equation, built once per DN matrix.
// All real-linear operators act on stacked (Re, Im) trig-coefficient vectors.
struct CgoOperators {
  CgoConfig config;
  Mat h_mu;        // n_fun x n_fun; data-driven on frequencies <= 16, sigma=1 transform beyond
  Mat h_minus_mu;  // same layout, built from Lambda_{1/sigma} = -dT Lambda^{-1} dT
  Mat p_plus_total;   // P_{+mu} + P_0, stacked (2 n_fun)^2
  Mat p_minus_total;  // P_{-mu} + P_0
  Vec theta_out;      // output angles
  Mat basis_out;      // n_theta x n_fun evaluation
  Vec theta_quad;
  Mat basis_quad;     // n_quad x n_fun
  Mat projection;     // n_fun x n_quad trapezoid projection (2pi/n_quad * B^T)
};

struct CgoTrace {
  CMat omega_plus;   // n_theta x n_tau
  CMat omega_minus;
  Vec tau_grid;
  double phi = 0.0;
};

namespace detail {

// complex-linear multiplication operator as a stacked real matrix
inline Mat stack_complex(const CMat& e) {
  const int n = static_cast<int>(e.rows());
  Mat s(2 * n, 2 * n);
  s.topLeftCorner(n, n) = e.real();
  s.topRightCorner(n, n) = -e.imag();
  s.bottomLeftCorner(n, n) = e.imag();
  s.bottomRightCorner(n, n) = e.real();
  return s;
}

// P_{mu} = 1/2 (I + i H) + 1/2 L where H acts as h_re on Re f and h_im on Im f
inline Mat projector_stack(const Mat& h_re, const Mat& h_im) {
  const int n = static_cast<int>(h_re.rows());
  Mat p = Mat::Zero(2 * n, 2 * n);
  p.topLeftCorner(n, n) = 0.5 * Mat::Identity(n, n);
  p.bottomRightCorner(n, n) = 0.5 * Mat::Identity(n, n);
  // i * (h_re Re f + i h_im Im f) = -h_im Im f + i h_re Re f
  p.topRightCorner(n, n) -= 0.5 * h_im;
  p.bottomLeftCorner(n, n) += 0.5 * h_re;
  p(0, 0) += 0.5;  // averaging term: mean = phi_0 coefficient
  p(n, n) += 0.5;
  return p;
}

inline Mat extend_with_unit_hilbert(const Mat& data_block, int n_fun) {
  Mat h = trig::hilbert_unit(n_fun);
  h.block(1, 1, 32, 32) = data_block;
  return h;
}

}  // namespace detail

inline CgoOperators build_hilbert(const BoundaryMatrix& dn, CgoConfig config = {}) {
  require(dn.kind == MatrixKind::DN && dn.entries.rows() == 33,
          "build_hilbert: expected a 33x33 extended DN matrix");
  require(config.max_freq >= 16, "build_hilbert: max_freq must cover the data band (>= 16)");
  require(config.n_quad >= 4 * config.max_freq,
          "build_hilbert: quadrature grid too coarse for the function space");

  Mat l_int = dn.interior();
  Mat dt = trig::tangential_derivative(33).block(1, 1, 32, 32);

  // H_mu = dT^{-1} L on the data band: dT^{-1} swaps each (cos,sin) pair with -+1/j
  Mat h_data(32, 32);
  for (int j = 1; j <= 16; ++j) {
    h_data.row(2 * j - 2) = -l_int.row(2 * j - 1) / j;
    h_data.row(2 * j - 1) = l_int.row(2 * j - 2) / j;
  }

  Eigen::FullPivLU<Mat> lu(l_int);
  require(lu.isInvertible() && lu.rcond() > 1e-15,
          "build_hilbert: DN interior block numerically singular");
  // Lambda_{1/sigma} = -dT Lambda^{-1} dT  =>  H_{-mu} = -Lambda^{-1} dT
  Mat hm_data = -lu.inverse() * dt;

  CgoOperators ops;
  ops.config = config;
  const int nf = config.n_fun();
  ops.h_mu = detail::extend_with_unit_hilbert(h_data, nf);
  ops.h_minus_mu = detail::extend_with_unit_hilbert(hm_data, nf);
  Mat h0 = trig::hilbert_unit(nf);

  Mat p0 = detail::projector_stack(h0, h0);
  ops.p_plus_total = detail::projector_stack(ops.h_mu, ops.h_minus_mu) + p0;
  ops.p_minus_total = detail::projector_stack(ops.h_minus_mu, ops.h_mu) + p0;

  ops.theta_out = Vec::LinSpaced(config.n_theta, 0.0, 2 * pi * (config.n_theta - 1) / config.n_theta);
  ops.basis_out = trig::evaluation_matrix(ops.theta_out, nf);
  ops.theta_quad = Vec::LinSpaced(config.n_quad, 0.0, 2 * pi * (config.n_quad - 1) / config.n_quad);
  ops.basis_quad = trig::evaluation_matrix(ops.theta_quad, nf);
  ops.projection = (2 * pi / config.n_quad) * ops.basis_quad.transpose();
  return ops;
}

struct BieSolution {
  CVec omega_plus;
  CVec omega_minus;
  double residual_plus = 0;
  double residual_minus = 0;
};

// solve  f + e^{ikz} = (P^k_{+-mu} + P^k_0) f  on the boundary and return
// omega^{+-} = e^{-ikz} f - 1 on the output grid
inline BieSolution solve_bie(const CgoOperators& ops, complexd k) {
  const CgoConfig& cfg = ops.config;
  require(std::abs(k) <= cfg.max_abs_k * (1 + 1e-12),
          "solve_bie: |k| outside the stable band [0, " + std::to_string(cfg.max_abs_k) + "]");
  const int nf = cfg.n_fun();
  BieSolution out;
  if (k == complexd(0.0, 0.0)) {  // incident field 1 solves the equation exactly
    out.omega_plus = CVec::Zero(cfg.n_theta);
    out.omega_minus = CVec::Zero(cfg.n_theta);
    return out;
  }

  // multiplication operators e^{+-ikz} in coefficient space
  CVec zq(cfg.n_quad);
  for (int j = 0; j < cfg.n_quad; ++j)
    zq[j] = std::exp(complexd(0, 1) * k * std::polar(1.0, ops.theta_quad[j]));
  auto mult_stacked = [&](const CVec& phase) {
    Mat re = ops.projection * (phase.real().asDiagonal() * ops.basis_quad);
    Mat im = ops.projection * (phase.imag().asDiagonal() * ops.basis_quad);
    Mat s(2 * nf, 2 * nf);
    s.topLeftCorner(nf, nf) = re;
    s.topRightCorner(nf, nf) = -im;
    s.bottomLeftCorner(nf, nf) = im;
    s.bottomRightCorner(nf, nf) = re;
    return s;
  };
  Mat ek = mult_stacked(zq);
  Mat emk = mult_stacked(zq.conjugate().array() / zq.array().abs2());  // e^{-ikz} = conj/|.|^2
  CVec e_coef = ops.projection * zq.real() + complexd(0, 1) * (ops.projection * zq.imag());
  Vec rhs(2 * nf);
  rhs << -e_coef.real(), -e_coef.imag();

  CVec zout(cfg.n_theta);
  for (int j = 0; j < cfg.n_theta; ++j)
    zout[j] = std::exp(complexd(0, -1) * k * std::polar(1.0, ops.theta_out[j]));

  auto solve_one = [&](const Mat& p_total, CVec& omega, double& residual) {
    Mat a = Mat::Identity(2 * nf, 2 * nf) - emk * p_total * ek;
    Eigen::PartialPivLU<Mat> lu(a);
    Vec x = lu.solve(rhs);
    residual = (a * x - rhs).norm() / rhs.norm();
    if (!(residual <= cfg.residual_tol))
      throw numerical_error("solve_bie: residual " + std::to_string(residual) +
                            " exceeds tolerance at |k|=" + std::to_string(std::abs(k)));
    CVec c = x.head(nf) + complexd(0, 1) * x.tail(nf);
    CVec f = ops.basis_out * c;
    omega = (zout.array() * f.array() - 1.0).matrix();
  };
  solve_one(ops.p_plus_total, out.omega_plus, out.residual_plus);
  solve_one(ops.p_minus_total, out.omega_minus, out.residual_minus);
  return out;
}

inline Vec default_tau_grid(double r = 4.0, int n = 33) {
  return Vec::LinSpaced(n, -r, r);
}

inline CgoTrace trace_grid(const CgoOperators& ops, const Vec& tau_grid, double phi = 0.0) {
  const int nt = static_cast<int>(tau_grid.size());
  require(nt >= 1, "trace_grid: empty tau grid");
  for (int i = 0; i < nt; ++i) {
    require(std::abs(tau_grid[i] + tau_grid[nt - 1 - i]) < 1e-9,
            "trace_grid: tau grid must be symmetric about 0");
    require(std::abs(tau_grid[i]) <= ops.config.max_abs_k * (1 + 1e-12),
            "trace_grid: |tau| exceeds the stable band");
  }
  CgoTrace tr;
  tr.tau_grid = tau_grid;
  tr.phi = phi;
  tr.omega_plus = CMat::Zero(ops.config.n_theta, nt);
  tr.omega_minus = CMat::Zero(ops.config.n_theta, nt);
  complexd dir = std::polar(1.0, phi);
  for (int i = 0; i < nt; ++i) {
    if (tau_grid[i] == 0.0) continue;  // omega(.,0) = 0 exactly
    BieSolution s = solve_bie(ops, tau_grid[i] * dir);
    tr.omega_plus.col(i) = s.omega_plus;
    tr.omega_minus.col(i) = s.omega_minus;
  }
  return tr;
}

}  // namespace vhed
