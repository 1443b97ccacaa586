#pragma once

#include <cmath>

#include "vhed/cgo.hpp"

namespace vhed {

// Gaussian frequency window W_a(tau) = exp(-a tau^2) on the band [-R, R]
struct WindowSpec {
  double r = 4.0;
  double a_r = 0.35;

  double weight(double tau) const { return std::exp(-a_r * tau * tau); }
};

struct VhedProfile {
  CMat hat_plus;   // n_theta x n_t
  CMat hat_minus;
  CMat hat_diff;   // hat_plus - hat_minus
  Vec t_grid;
  WindowSpec window;
  double phi = 0.0;
};

inline Vec default_t_grid(int n = 256, double t_max = 2.0) {
  return Vec::LinSpaced(n, -t_max, t_max);
}

// windowed Fourier transform in tau by the trapezoid rule on the trace grid:
//   hat(z, t) = int_{-R}^{R} W(tau) e^{-i t tau} omega(z, tau) dtau
inline VhedProfile windowed_ft(const CgoTrace& trace, const WindowSpec& w, const Vec& t_grid) {
  const int n_tau = static_cast<int>(trace.tau_grid.size());
  require(n_tau >= 2, "windowed_ft: need at least two tau nodes");
  require(trace.tau_grid.minCoeff() <= -w.r + 1e-9 && trace.tau_grid.maxCoeff() >= w.r - 1e-9,
          "windowed_ft: trace tau grid does not span [-R, R]");
  require(t_grid.size() >= 1, "windowed_ft: empty t grid");

  Vec quad(n_tau);
  for (int i = 0; i < n_tau; ++i) {
    double left = (i == 0) ? 0.0 : trace.tau_grid[i] - trace.tau_grid[i - 1];
    double right = (i + 1 == n_tau) ? 0.0 : trace.tau_grid[i + 1] - trace.tau_grid[i];
    quad[i] = 0.5 * (left + right) * w.weight(trace.tau_grid[i]);
  }
  // kernel(i_tau, i_t) = quad * e^{-i t tau}
  CMat kernel(n_tau, t_grid.size());
  for (int i = 0; i < n_tau; ++i)
    for (int j = 0; j < t_grid.size(); ++j)
      kernel(i, j) = quad[i] * std::exp(complexd(0, -t_grid[j] * trace.tau_grid[i]));

  VhedProfile p;
  p.t_grid = t_grid;
  p.window = w;
  p.phi = trace.phi;
  p.hat_plus = trace.omega_plus * kernel;
  p.hat_minus = trace.omega_minus * kernel;
  p.hat_diff = p.hat_plus - p.hat_minus;
  return p;
}

struct AveragedProfile {
  CVec plus;
  CVec minus;
  CVec diff;
};

// boundary average (1/pi) int_dOmega hat(z,t) dz with dz = i e^{i theta} dtheta
inline AveragedProfile average_profile(const VhedProfile& p) {
  const int nz = static_cast<int>(p.hat_plus.rows());
  require(nz >= 2, "average_profile: averaging undefined on a single-point z grid");
  CVec zw(nz);
  for (int j = 0; j < nz; ++j)
    zw[j] = complexd(0, 1) * std::polar(1.0, 2 * pi * j / nz) * (2 * pi / nz) / pi;
  AveragedProfile out;
  out.plus = p.hat_plus.transpose() * zw;
  out.minus = p.hat_minus.transpose() * zw;
  out.diff = p.hat_diff.transpose() * zw;
  return out;
}

enum class FeatureLayout { fcnn_1024, cnn_128x256, dn_1024, dn_33x33 };

inline const char* to_string(FeatureLayout l) {
  switch (l) {
    case FeatureLayout::fcnn_1024: return "fcnn_1024";
    case FeatureLayout::cnn_128x256: return "cnn_128x256";
    case FeatureLayout::dn_1024: return "dn_1024";
    case FeatureLayout::dn_33x33: return "dn_33x33";
  }
  return "?";
}
inline FeatureLayout layout_from_string(const std::string& s) {
  if (s == "fcnn_1024") return FeatureLayout::fcnn_1024;
  if (s == "cnn_128x256") return FeatureLayout::cnn_128x256;
  if (s == "dn_1024") return FeatureLayout::dn_1024;
  if (s == "dn_33x33") return FeatureLayout::dn_33x33;
  throw data_error("unknown feature layout: " + s);
}

struct FeatureVector {
  FeatureLayout layout = FeatureLayout::fcnn_1024;
  int rows = 0, cols = 0;  // image layouts; rows*cols == values.size()
  Vec values;              // row-major for image layouts
};

// VHED-side layouts; profile rows are the z grid starting at theta=0
inline FeatureVector make_features(const VhedProfile& p, FeatureLayout layout) {
  const int nz = static_cast<int>(p.hat_diff.rows());
  const int nt = static_cast<int>(p.hat_diff.cols());
  FeatureVector f;
  f.layout = layout;
  switch (layout) {
    case FeatureLayout::fcnn_1024: {
      require(nz >= 2 && nz % 2 == 0,
              "make_features: fcnn layout needs z=+1 and z=-1 on the grid");
      const int zpos = 0, zneg = nz / 2;
      f.rows = 4 * nt;
      f.cols = 1;
      f.values.resize(4 * nt);
      for (int j = 0; j < nt; ++j) {
        f.values[j] = p.hat_diff(zpos, j).real();
        f.values[nt + j] = p.hat_diff(zpos, j).imag();
        f.values[2 * nt + j] = p.hat_diff(zneg, j).real();
        f.values[3 * nt + j] = p.hat_diff(zneg, j).imag();
      }
      return f;
    }
    case FeatureLayout::cnn_128x256: {
      f.rows = 2 * nz;
      f.cols = nt;
      f.values.resize(static_cast<Eigen::Index>(2 * nz) * nt);
      for (int i = 0; i < nz; ++i)
        for (int j = 0; j < nt; ++j) {
          f.values[static_cast<Eigen::Index>(i) * nt + j] = p.hat_diff(i, j).real();
          f.values[static_cast<Eigen::Index>(nz + i) * nt + j] = p.hat_diff(i, j).imag();
        }
      return f;
    }
    default:
      throw data_error(std::string("make_features: layout ") + to_string(layout) +
                       " requires a DN matrix source, got a VHED profile");
  }
}

// DN-side layouts, row-major flattening
inline FeatureVector make_features(const BoundaryMatrix& dn, FeatureLayout layout) {
  require_data(dn.kind == MatrixKind::DN, "make_features: DN layouts need a DN matrix");
  FeatureVector f;
  f.layout = layout;
  switch (layout) {
    case FeatureLayout::dn_1024: {
      Mat inner = dn.interior();
      f.rows = 1024;
      f.cols = 1;
      f.values.resize(1024);
      for (int i = 0; i < 32; ++i)
        for (int j = 0; j < 32; ++j) f.values[i * 32 + j] = inner(i, j);
      return f;
    }
    case FeatureLayout::dn_33x33: {
      f.rows = 33;
      f.cols = 33;
      f.values.resize(33 * 33);
      for (int i = 0; i < 33; ++i)
        for (int j = 0; j < 33; ++j) f.values[i * 33 + j] = dn.entries(i, j);
      return f;
    }
    default:
      throw data_error(std::string("make_features: layout ") + to_string(layout) +
                       " requires a VHED profile source, got a DN matrix");
  }
}

}  // namespace vhed
