#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "vhed/common.hpp"

namespace vhed {

// conforming triangulation of the unit disc; uniform 1:4 refinement of an
// 8-triangle fan, new boundary midpoints projected back onto |x| = 1
struct Mesh {
  int level = 0;
  std::vector<std::array<double, 2>> vertices;
  std::vector<std::array<int, 3>> triangles;  // positively oriented
  std::vector<int> boundary_ring;             // boundary vertex indices, ordered by theta
  std::vector<double> boundary_theta;         // theta in [0, 2pi), strictly increasing

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }
  int n_boundary() const { return static_cast<int>(boundary_ring.size()); }
  double boundary_spacing() const { return 2.0 * pi / n_boundary(); }
};

namespace detail {

inline std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

inline void refine_once(Mesh& m) {
  // boundary edges = edges incident to exactly one triangle
  std::unordered_map<std::uint64_t, int> edge_count;
  for (const auto& t : m.triangles)
    for (int e = 0; e < 3; ++e) edge_count[edge_key(t[e], t[(e + 1) % 3])]++;

  std::unordered_map<std::uint64_t, int> midpoint;
  auto mid = [&](int a, int b) {
    auto key = edge_key(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    double x = 0.5 * (m.vertices[a][0] + m.vertices[b][0]);
    double y = 0.5 * (m.vertices[a][1] + m.vertices[b][1]);
    if (edge_count.at(key) == 1) {  // boundary edge: project onto the circle
      double r = std::hypot(x, y);
      x /= r;
      y /= r;
    }
    int idx = m.n_vertices();
    m.vertices.push_back({x, y});
    midpoint.emplace(key, idx);
    return idx;
  };

  std::vector<std::array<int, 3>> next;
  next.reserve(4 * m.triangles.size());
  for (const auto& t : m.triangles) {
    int a = t[0], b = t[1], c = t[2];
    int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
    next.push_back({a, ab, ca});
    next.push_back({ab, b, bc});
    next.push_back({ca, bc, c});
    next.push_back({ab, bc, ca});
  }
  m.triangles = std::move(next);
}

inline void rebuild_boundary_ring(Mesh& m) {
  std::unordered_map<std::uint64_t, int> edge_count;
  for (const auto& t : m.triangles)
    for (int e = 0; e < 3; ++e) edge_count[edge_key(t[e], t[(e + 1) % 3])]++;
  std::vector<char> on_boundary(m.n_vertices(), 0);
  for (const auto& [key, cnt] : edge_count) {
    if (cnt == 1) {
      on_boundary[static_cast<int>(key >> 32)] = 1;
      on_boundary[static_cast<int>(key & 0xffffffffu)] = 1;
    }
  }
  m.boundary_ring.clear();
  for (int i = 0; i < m.n_vertices(); ++i)
    if (on_boundary[i]) m.boundary_ring.push_back(i);
  auto theta_of = [&](int i) {
    double t = std::atan2(m.vertices[i][1], m.vertices[i][0]);
    if (t < -1e-12) t += 2 * pi;
    return t < 0 ? 0.0 : t;
  };
  std::sort(m.boundary_ring.begin(), m.boundary_ring.end(),
            [&](int a, int b) { return theta_of(a) < theta_of(b); });
  m.boundary_theta.clear();
  for (int i : m.boundary_ring) m.boundary_theta.push_back(theta_of(i));
}

}  // namespace detail

inline Mesh build_mesh(int refinement_level) {
  require(refinement_level >= 0, "build_mesh: level must be >= 0");
  Mesh m;
  m.level = refinement_level;
  m.vertices.push_back({0.0, 0.0});
  for (int j = 0; j < 8; ++j) {
    double t = 2 * pi * j / 8.0;
    m.vertices.push_back({std::cos(t), std::sin(t)});
  }
  for (int j = 0; j < 8; ++j) m.triangles.push_back({0, 1 + j, 1 + (j + 1) % 8});
  for (int l = 0; l < refinement_level; ++l) detail::refine_once(m);
  detail::rebuild_boundary_ring(m);
  return m;
}

inline double triangle_area(const Mesh& m, int t) {
  const auto& tr = m.triangles[t];
  const auto &a = m.vertices[tr[0]], &b = m.vertices[tr[1]], &c = m.vertices[tr[2]];
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

inline double total_area(const Mesh& m) {
  double s = 0;
  for (int t = 0; t < m.n_triangles(); ++t) s += triangle_area(m, t);
  return s;
}

}  // namespace vhed
