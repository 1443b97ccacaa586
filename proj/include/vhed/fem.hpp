#pragma once

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <functional>
#include <random>

#include "vhed/mesh.hpp"
#include "vhed/phantom.hpp"
#include "vhed/trig_basis.hpp"

namespace vhed {

enum class MatrixKind { ND, DN };

// ND: 32x32 interior; DN: 33x33 extended with zero first row/column
struct BoundaryMatrix {
  MatrixKind kind = MatrixKind::ND;
  Mat entries;
  double noise_delta = 0.0;

  Eigen::Block<Mat> interior() {
    return kind == MatrixKind::DN ? entries.block(1, 1, 32, 32) : entries.block(0, 0, 32, 32);
  }
  Eigen::Block<const Mat> interior() const {
    return kind == MatrixKind::DN ? entries.block(1, 1, 32, 32) : entries.block(0, 0, 32, 32);
  }
};

// discrete Neumann problem  div(sigma grad v) = 0,  sigma dv/dnu = phi_n,  mean(v)=0;
// the zero-mean constraint is a Lagrange multiplier row so the system stays symmetric
class NeumannSystem {
 public:
  NeumannSystem(const Mesh& mesh, const std::function<double(double, double)>& sigma)
      : mesh_(mesh) {
    const int nv = mesh.n_vertices();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(mesh.n_triangles() * 9 + 2 * mesh.n_boundary());
    for (const auto& t : mesh.triangles) {
      const auto &a = mesh.vertices[t[0]], &b = mesh.vertices[t[1]], &c = mesh.vertices[t[2]];
      double area2 = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
      require(area2 > 0, "NeumannSystem: non-positive triangle orientation");
      double gx[3] = {b[1] - c[1], c[1] - a[1], a[1] - b[1]};
      double gy[3] = {c[0] - b[0], a[0] - c[0], b[0] - a[0]};
      double s = sigma((a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0);
      double w = s / (2.0 * area2);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          trip.emplace_back(t[i], t[j], w * (gx[i] * gx[j] + gy[i] * gy[j]));
    }
    double h = mesh.boundary_spacing();
    for (int i : mesh.boundary_ring) {
      trip.emplace_back(i, nv, h);
      trip.emplace_back(nv, i, h);
    }
    Eigen::SparseMatrix<double> K(nv + 1, nv + 1);
    K.setFromTriplets(trip.begin(), trip.end());
    K_ = K;
    solver_.compute(K_);
    require(solver_.info() == Eigen::Success,
            "NeumannSystem: sparse factorization failed (singular or ill-conditioned system)");
  }

  // boundary trace (ordered along the ring) of the solution with Neumann data phi_n
  Vec boundary_trace(int n) const {
    require(n >= 1 && n <= trig::default_max_index, "boundary_trace: basis index out of range");
    const int nv = mesh_.n_vertices();
    double h = mesh_.boundary_spacing();
    Vec rhs = Vec::Zero(nv + 1);
    for (int j = 0; j < mesh_.n_boundary(); ++j)
      rhs[mesh_.boundary_ring[j]] = h * trig::phi(n, mesh_.boundary_theta[j]);
    Vec sol = solver_.solve(rhs);
    double resid = (K_ * sol - rhs).norm() / rhs.norm();
    if (resid > 1e-10)
      throw numerical_error("NeumannSystem: relative residual " + std::to_string(resid) +
                            " exceeds 1e-10");
    Vec trace(mesh_.n_boundary());
    for (int j = 0; j < mesh_.n_boundary(); ++j) trace[j] = sol[mesh_.boundary_ring[j]];
    return trace;
  }

  const Mesh& mesh() const { return mesh_; }

 private:
  const Mesh& mesh_;
  Eigen::SparseMatrix<double> K_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> solver_;
};

inline Vec solve_neumann(const Phantom& p, const Mesh& m, int n) {
  NeumannSystem sys(m, [&](double x, double y) { return conductivity_at(p, x, y); });
  return sys.boundary_trace(n);
}

// analytic ND matrix of the unit-conductivity disc: diag(1/ceil(n/2))
inline Mat analytic_nd_unit() {
  Mat R = Mat::Zero(32, 32);
  for (int n = 1; n <= 32; ++n) R(n - 1, n - 1) = 1.0 / trig::frequency(n);
  return R;
}

// raw quadrature ND matrix: (R)_{mn} = <v_n, phi_m> by the trapezoid rule on the ring
inline Mat nd_raw(const NeumannSystem& sys) {
  const Mesh& m = sys.mesh();
  double h = m.boundary_spacing();
  Mat R(32, 32);
  Mat phis(m.n_boundary(), 32);
  for (int k = 1; k <= 32; ++k)
    for (int j = 0; j < m.n_boundary(); ++j) phis(j, k - 1) = trig::phi(k, m.boundary_theta[j]);
  for (int n = 1; n <= 32; ++n) {
    Vec tr = sys.boundary_trace(n);
    R.col(n - 1) = h * (phis.transpose() * tr);
  }
  return R;
}

inline Mat nd_raw(const Phantom& p, const Mesh& m) {
  NeumannSystem sys(m, [&](double x, double y) { return conductivity_at(p, x, y); });
  return nd_raw(sys);
}

// sigma=1 reference on the same mesh, for the defect correction
inline Mat nd_reference_raw(const Mesh& m) {
  NeumannSystem sys(m, [](double, double) { return 1.0; });
  return nd_raw(sys);
}

inline BoundaryMatrix assemble_nd_raw(const Phantom& p, const Mesh& m) {
  return BoundaryMatrix{MatrixKind::ND, nd_raw(p, m), 0.0};
}

// production ND matrix: sigma=1 defect correction against the analytic reference.
// The shared discretization defect of the high-frequency modes (which live in the
// outer sigma=1 annulus for every phantom) cancels between the two solves.
inline BoundaryMatrix assemble_nd(const Phantom& p, const Mesh& m, const Mat& reference_raw) {
  return BoundaryMatrix{MatrixKind::ND, analytic_nd_unit() + (nd_raw(p, m) - reference_raw), 0.0};
}

inline BoundaryMatrix assemble_nd(const Phantom& p, const Mesh& m) {
  return assemble_nd(p, m, nd_reference_raw(m));
}

// extend R^{-1} onto span{phi_0..phi_32} with a zero first row and column
inline BoundaryMatrix nd_to_dn(const BoundaryMatrix& r) {
  require(r.kind == MatrixKind::ND, "nd_to_dn: input must be an ND matrix");
  Eigen::FullPivLU<Mat> lu(r.entries);
  require(lu.isInvertible() && lu.rcond() > 1e-14,
          "nd_to_dn: ND matrix numerically singular (rcond " + std::to_string(lu.rcond()) + ")");
  Mat L = Mat::Zero(33, 33);
  L.block(1, 1, 32, 32) = lu.inverse();
  return BoundaryMatrix{MatrixKind::DN, L, r.noise_delta};
}

inline double spectral_norm(const Mat& a) {
  return a.jacobiSvd().singularValues()(0);
}

// add zero-mean Gaussian noise E to the interior block, rescaled so that
// ||E||_2 / ||interior||_2 equals delta exactly
inline BoundaryMatrix add_noise(const BoundaryMatrix& b, double delta, std::uint64_t rng_seed) {
  require(delta >= 0, "add_noise: delta must be >= 0");
  BoundaryMatrix out = b;
  if (delta == 0) return out;
  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat e(32, 32);
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j) e(i, j) = gauss(rng);
  double scale = delta * spectral_norm(b.interior()) / spectral_norm(e);
  out.interior() += scale * e;
  out.noise_delta = delta;
  return out;
}

inline double measured_delta(const BoundaryMatrix& noisy, const BoundaryMatrix& clean) {
  return spectral_norm(noisy.interior() - clean.interior()) / spectral_norm(clean.interior());
}

}  // namespace vhed
