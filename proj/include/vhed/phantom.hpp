#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "vhed/common.hpp"

namespace vhed {

enum class StrokeLabel : int { ischemic = 0, hemorrhagic = 1 };
enum class InclusionRegime { circular, elliptic, irregular, multiple };

inline const char* to_string(InclusionRegime r) {
  switch (r) {
    case InclusionRegime::circular: return "circular";
    case InclusionRegime::elliptic: return "elliptic";
    case InclusionRegime::irregular: return "irregular";
    case InclusionRegime::multiple: return "multiple";
  }
  return "?";
}
inline InclusionRegime regime_from_string(const std::string& s) {
  if (s == "circular") return InclusionRegime::circular;
  if (s == "elliptic") return InclusionRegime::elliptic;
  if (s == "irregular") return InclusionRegime::irregular;
  if (s == "multiple") return InclusionRegime::multiple;
  throw data_error("unknown inclusion regime: " + s);
}

struct Range {
  double lo = 0, hi = 0;
  double sample(std::mt19937_64& rng) const {
    if (hi <= lo) return lo;  // degenerate [a,a] must return exactly a
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  }
};

struct Inclusion {
  enum class Shape { circle, ellipse, star };
  Shape shape = Shape::circle;
  double cx = 0, cy = 0;
  double r = 0;                      // circle radius / star base radius r0
  double ax = 0, ay = 0, rot = 0;    // ellipse semi-axes + rotation
  std::array<double, 4> harm_amp{};  // star: a_m, m=2..5
  std::array<double, 4> harm_phase{};
  double conductivity = 1;

  double star_radius(double theta) const {
    double s = 1.0;
    for (int m = 0; m < 4; ++m) s += harm_amp[m] * std::cos((m + 2) * theta + harm_phase[m]);
    return r * s;
  }

  bool contains(double x, double y) const {
    double dx = x - cx, dy = y - cy;
    switch (shape) {
      case Shape::circle:
        return dx * dx + dy * dy < r * r;
      case Shape::ellipse: {
        double c = std::cos(rot), s = std::sin(rot);
        double u = c * dx + s * dy, v = -s * dx + c * dy;
        return (u * u) / (ax * ax) + (v * v) / (ay * ay) < 1.0;
      }
      case Shape::star: {
        double rad = std::hypot(dx, dy);
        if (rad == 0) return true;
        return rad < star_radius(std::atan2(dy, dx));
      }
    }
    return false;
  }

  // point on the inclusion boundary at parameter angle t (for containment checks)
  std::pair<double, double> boundary_point(double t) const {
    switch (shape) {
      case Shape::circle:
        return {cx + r * std::cos(t), cy + r * std::sin(t)};
      case Shape::ellipse: {
        double u = ax * std::cos(t), v = ay * std::sin(t);
        double c = std::cos(rot), s = std::sin(rot);
        return {cx + c * u - s * v, cy + s * u + c * v};
      }
      case Shape::star: {
        double rad = star_radius(t);
        return {cx + rad * std::cos(t), cy + rad * std::sin(t)};
      }
    }
    return {cx, cy};
  }

  double bounding_radius() const {
    switch (shape) {
      case Shape::circle: return r;
      case Shape::ellipse: return std::max(ax, ay);
      case Shape::star: {
        double s = 1.0;
        for (double a : harm_amp) s += std::abs(a);
        return r * s;
      }
    }
    return r;
  }
};

struct GaussBump {
  double cx = 0, cy = 0, width = 1, amp = 0;
};

// smooth low-order random field, soft-clipped into [lo,hi]
struct BrainField {
  double lo = 0.8, hi = 1.1;
  double base = 0.95;
  std::vector<GaussBump> bumps;

  double eval(double x, double y) const {
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    if (half <= 0) return mid;
    double f = base;
    for (const auto& b : bumps) {
      double dx = x - b.cx, dy = y - b.cy;
      f += b.amp * std::exp(-(dx * dx + dy * dy) / (2 * b.width * b.width));
    }
    return mid + half * std::tanh((f - mid) / half);
  }
};

struct SkullSpec {
  double outer_ax = 0.92, outer_ay = 0.87;  // fixed so a sigma=1 scalp ring abuts the boundary
  double rotation = 0;                      // radians from axis-aligned
  double width = 0.035;
  double conductivity = 0.15;

  bool inside_outer(double x, double y) const { return level(x, y, 0.0) < 1.0; }
  bool inside_inner(double x, double y) const { return level(x, y, width) < 1.0; }
  // (u/a)^2 + (v/b)^2 in the rotated frame, with both semi-axes shrunk by `shrink`
  double level(double x, double y, double shrink) const {
    double c = std::cos(rotation), s = std::sin(rotation);
    double u = c * x + s * y, v = -s * x + c * y;
    double a = outer_ax - shrink, b = outer_ay - shrink;
    return (u * u) / (a * a) + (v * v) / (b * b);
  }
};

struct Phantom {
  double scalp_conductivity = 1.0;
  SkullSpec skull;
  BrainField brain;
  std::vector<Inclusion> inclusions;
  StrokeLabel label = StrokeLabel::ischemic;
  std::uint64_t seed = 0;
};

struct PhantomConfig {
  InclusionRegime regime = InclusionRegime::circular;
  Range skull_width{0.03, 0.04};
  Range skull_conductivity{0.1, 0.2};
  Range brain_conductivity{0.8, 1.1};
  Range stroke_radius{0.1, 0.15};
  Range ischemic_conductivity{0.7, 0.8};
  Range hemorrhagic_conductivity{3.0, 4.0};
  std::optional<StrokeLabel> label;  // unset: fair coin from the rng
  int max_bumps = 5;
  int max_retries = 1000;
  double placement_margin = 0.005;

  static PhantomConfig for_regime(InclusionRegime r) {
    PhantomConfig c;
    c.regime = r;
    if (r == InclusionRegime::multiple) c.skull_width = {0.03, 0.05};
    return c;
  }
};

namespace detail {

inline Inclusion sample_inclusion_shape(Inclusion::Shape shape, const PhantomConfig& cfg,
                                        std::mt19937_64& rng) {
  Inclusion inc;
  inc.shape = shape;
  switch (shape) {
    case Inclusion::Shape::circle:
      inc.r = cfg.stroke_radius.sample(rng);
      break;
    case Inclusion::Shape::ellipse:
      inc.ax = cfg.stroke_radius.sample(rng);
      inc.ay = cfg.stroke_radius.sample(rng);
      inc.rot = (cfg.stroke_radius.hi > cfg.stroke_radius.lo)
                    ? std::uniform_real_distribution<double>(0.0, pi)(rng)
                    : 0.0;
      break;
    case Inclusion::Shape::star: {
      double rho = cfg.stroke_radius.sample(rng);
      double sum_sq = 0, sum_abs = 0;
      for (int m = 0; m < 4; ++m) {
        inc.harm_amp[m] = std::uniform_real_distribution<double>(-0.3, 0.3)(rng);
        inc.harm_phase[m] = std::uniform_real_distribution<double>(0.0, 2 * pi)(rng);
        sum_abs += std::abs(inc.harm_amp[m]);
      }
      if (sum_abs > 0.9) {  // keep r(theta) > 0: the curve stays simple
        for (auto& a : inc.harm_amp) a *= 0.9 / sum_abs;
      }
      for (double a : inc.harm_amp) sum_sq += a * a;
      inc.r = rho / std::sqrt(1.0 + 0.5 * sum_sq);  // match the circular area
      break;
    }
  }
  return inc;
}

inline bool inclusion_fits(const Inclusion& inc, const SkullSpec& skull, double margin,
                           const std::vector<Inclusion>& existing) {
  if (inc.cx <= 0) return false;
  for (int i = 0; i < 64; ++i) {
    auto [bx, by] = inc.boundary_point(2 * pi * i / 64.0);
    if (skull.level(bx, by, skull.width + margin) >= 1.0) return false;
  }
  for (const auto& other : existing) {
    double d = std::hypot(inc.cx - other.cx, inc.cy - other.cy);
    if (d < inc.bounding_radius() + other.bounding_radius() + margin) return false;
  }
  return true;
}

}  // namespace detail

inline Phantom sample_phantom(const PhantomConfig& cfg, std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  Phantom p;
  p.seed = rng_seed;

  p.skull.width = cfg.skull_width.sample(rng);
  p.skull.conductivity = cfg.skull_conductivity.sample(rng);
  p.skull.rotation = (cfg.regime == InclusionRegime::multiple) ? 5.0 * pi / 180.0 : 0.0;

  p.brain.lo = cfg.brain_conductivity.lo;
  p.brain.hi = cfg.brain_conductivity.hi;
  p.brain.base = cfg.brain_conductivity.sample(rng);
  int nb = (cfg.max_bumps > 0)
               ? std::uniform_int_distribution<int>(0, cfg.max_bumps)(rng)
               : 0;
  for (int i = 0; i < nb; ++i) {
    GaussBump b;
    b.cx = std::uniform_real_distribution<double>(-0.8, 0.8)(rng);
    b.cy = std::uniform_real_distribution<double>(-0.8, 0.8)(rng);
    b.width = std::uniform_real_distribution<double>(0.15, 0.5)(rng);
    b.amp = std::uniform_real_distribution<double>(-0.15, 0.15)(rng);
    p.brain.bumps.push_back(b);
  }

  if (cfg.label) {
    p.label = *cfg.label;
  } else {
    p.label = std::uniform_int_distribution<int>(0, 1)(rng) ? StrokeLabel::hemorrhagic
                                                            : StrokeLabel::ischemic;
  }
  const Range& cond_range = (p.label == StrokeLabel::hemorrhagic)
                                ? cfg.hemorrhagic_conductivity
                                : cfg.ischemic_conductivity;

  std::vector<Inclusion::Shape> shapes;
  switch (cfg.regime) {
    case InclusionRegime::circular: shapes = {Inclusion::Shape::circle}; break;
    case InclusionRegime::elliptic: shapes = {Inclusion::Shape::ellipse}; break;
    case InclusionRegime::irregular: shapes = {Inclusion::Shape::star}; break;
    case InclusionRegime::multiple:
      shapes = {Inclusion::Shape::circle, Inclusion::Shape::ellipse};
      break;
  }

  double bx = p.skull.outer_ax - p.skull.width, by = p.skull.outer_ay - p.skull.width;
  for (auto shape : shapes) {
    bool placed = false;
    for (int attempt = 0; attempt < cfg.max_retries && !placed; ++attempt) {
      Inclusion inc = detail::sample_inclusion_shape(shape, cfg, rng);
      inc.cx = std::uniform_real_distribution<double>(0.0, bx)(rng);
      inc.cy = std::uniform_real_distribution<double>(-by, by)(rng);
      if (!detail::inclusion_fits(inc, p.skull, cfg.placement_margin, p.inclusions)) continue;
      inc.conductivity = cond_range.sample(rng);
      p.inclusions.push_back(inc);
      placed = true;
    }
    require(placed, "sample_phantom: inclusion placement failed after " +
                        std::to_string(cfg.max_retries) + " retries (infeasible config)");
  }
  return p;
}

// conductivity at one point; region precedence inclusion > skull > brain > scalp
inline double conductivity_at(const Phantom& p, double x, double y) {
  require(x * x + y * y <= 1.0 + 1e-12, "conductivity_at: point outside the unit disc");
  for (const auto& inc : p.inclusions)
    if (inc.contains(x, y)) return inc.conductivity;
  if (p.skull.inside_inner(x, y)) return p.brain.eval(x, y);
  if (p.skull.inside_outer(x, y)) return p.skull.conductivity;
  return p.scalp_conductivity;
}

inline std::vector<double> evaluate_conductivity(const Phantom& p,
                                                 const std::vector<std::pair<double, double>>& pts) {
  std::vector<double> out;
  out.reserve(pts.size());
  for (auto [x, y] : pts) out.push_back(conductivity_at(p, x, y));
  return out;
}

inline double beltrami_at(const Phantom& p, double x, double y) {
  double s = conductivity_at(p, x, y);
  return (1.0 - s) / (1.0 + s);
}

inline std::vector<double> beltrami_coefficient(const Phantom& p,
                                                const std::vector<std::pair<double, double>>& pts) {
  std::vector<double> out;
  out.reserve(pts.size());
  for (auto [x, y] : pts) out.push_back(beltrami_at(p, x, y));
  return out;
}

}  // namespace vhed
