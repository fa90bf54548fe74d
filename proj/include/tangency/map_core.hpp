#pragma once
/**
 * @file map_core.hpp
 * @brief The C^1 four-parameter map family with a globally resonant
 * homoclinic tangency at mu = 0, its branches and exact Jacobians.
 *
 * Below the strip y <= h0 the map is the local saddle map U0, above y >= h1
 * it is the reinjection map U1, and in between the two are blended with the
 * smoothstep weight r(y) = s((y - h0) / (h1 - h0)).
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <utility>

#include "tangency/errors.hpp"

namespace tangency {

using ParamVec = std::array<double, 4>;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend bool operator==(const Point&, const Point&) = default;
};

inline double sup_norm(Point p) { return std::max(std::abs(p.x), std::abs(p.y)); }

/// Row-major 2x2 matrix [[a, b], [c, d]].
struct Mat2 {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

  static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static constexpr Mat2 diag(double p, double q) { return {p, 0.0, 0.0, q}; }

  double trace() const { return a + d; }
  double det() const { return a * d - b * c; }

  friend Mat2 operator*(const Mat2& m, const Mat2& n) {
    return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
            m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
  }
  friend Point operator*(const Mat2& m, Point p) {
    return {m.a * p.x + m.b * p.y, m.c * p.x + m.d * p.y};
  }
  friend Mat2 operator+(const Mat2& m, const Mat2& n) {
    return {m.a + n.a, m.b + n.b, m.c + n.c, m.d + n.d};
  }
  friend Mat2 operator-(const Mat2& m, const Mat2& n) {
    return {m.a - n.a, m.b - n.b, m.c - n.c, m.d - n.d};
  }
  friend Mat2 operator*(double s, const Mat2& m) { return {s * m.a, s * m.b, s * m.c, s * m.d}; }

  /// Solves m * z = rhs. Returns false when the matrix is numerically singular.
  bool solve(Point rhs, Point& z) const {
    const double dt = det();
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
    if (!(std::abs(dt) > 1e-300) || std::abs(dt) <= 1e-15 * scale * scale) return false;
    z = {(d * rhs.x - b * rhs.y) / dt, (a * rhs.y - c * rhs.x) / dt};
    return std::isfinite(z.x) && std::isfinite(z.y);
  }

  std::array<std::complex<double>, 2> eigenvalues() const {
    const double half_tr = 0.5 * trace();
    const std::complex<double> root = std::sqrt(std::complex<double>(half_tr * half_tr - det()));
    return {half_tr + root, half_tr - root};
  }
};

/// Derivative of the map with respect to the four unfolding parameters (2 x 4).
struct ParamJacobian {
  ParamVec dx{};
  ParamVec dy{};

  Point along(const ParamVec& v) const {
    Point out;
    for (std::size_t i = 0; i < 4; ++i) {
      out.x += dx[i] * v[i];
      out.y += dy[i] * v[i];
    }
    return out;
  }
};

/// Constants (alpha, a10, c20, d50) and unfolding parameters mu of the family.
struct ModelParams {
  double alpha = 0.8;
  double a10 = 0.2;
  double c20 = -0.5;
  double d50 = 1.0;
  ParamVec mu{0.0, 0.0, 0.0, 0.0};

  double h0() const { return (2.0 * alpha + 1.0) / 3.0; }
  double h1() const { return (alpha + 2.0) / 3.0; }

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0))
      throw InvalidParams("alpha must lie in (0, 1), got " + std::to_string(alpha));
    if (!(d50 != 0.0) || !std::isfinite(d50)) throw InvalidParams("d50 must be finite and nonzero");
    if (!std::isfinite(a10) || !std::isfinite(c20)) throw InvalidParams("a10 and c20 must be finite");
    for (double m : mu)
      if (!std::isfinite(m)) throw InvalidParams("mu must be finite");
  }

  ModelParams with_mu(const ParamVec& m) const {
    ModelParams out = *this;
    out.mu = m;
    return out;
  }
};

/// Local Taylor data of the reinjection map at (0,1) and of the saddle map at the origin.
struct NormalFormCoeffs {
  double c0 = 1.0, c1 = 0.0, c2 = 0.0;
  double d0 = 0.0, d1 = 1.0, d2 = 0.0, d3 = 0.0, d4 = 0.0, d5 = 1.0;
  double a1 = 0.0, b1 = 0.0;
  double lambda = 0.0, sigma = 0.0;
  int chi = 1;      // sign of d1 at mu = 0
  int chi_eig = 1;  // lambda * sigma at mu = 0
  int m = 1;        // iterates of f forming the global map
};

/// Smoothstep s(z) = 3z^2 - 2z^3.
constexpr double blend_weight(double z) { return z * z * (3.0 - 2.0 * z); }
constexpr double blend_weight_slope(double z) { return 6.0 * z * (1.0 - z); }

inline Point u0_apply(Point p, const ModelParams& q) {
  const double xy = p.x * p.y;
  return {(q.alpha + q.mu[1]) * p.x * (1.0 + (q.a10 + q.mu[3]) * xy),
          p.y / q.alpha * (1.0 - q.a10 * xy)};
}

inline Mat2 u0_jacobian(Point p, const ModelParams& q) {
  const double lam = q.alpha + q.mu[1];
  const double a = q.a10 + q.mu[3];
  const double xy = p.x * p.y;
  return {lam * (1.0 + 2.0 * a * xy), lam * a * p.x * p.x,
          -q.a10 * p.y * p.y / q.alpha, (1.0 - 2.0 * q.a10 * xy) / q.alpha};
}

inline ParamJacobian u0_param_jacobian(Point p, const ModelParams& q) {
  const double xy = p.x * p.y;
  ParamJacobian j;
  j.dx = {0.0, p.x * (1.0 + (q.a10 + q.mu[3]) * xy), 0.0, (q.alpha + q.mu[1]) * p.x * xy};
  return j;
}

inline Point u1_apply(Point p, const ModelParams& q) {
  const double dy = p.y - 1.0;
  return {1.0 + q.c20 * dy, q.mu[0] + (1.0 + q.mu[2]) * p.x + q.d50 * dy * dy};
}

inline Mat2 u1_jacobian(Point p, const ModelParams& q) {
  return {0.0, q.c20, 1.0 + q.mu[2], 2.0 * q.d50 * (p.y - 1.0)};
}

inline ParamJacobian u1_param_jacobian(Point p, const ModelParams&) {
  ParamJacobian j;
  j.dy = {1.0, 0.0, p.x, 0.0};
  return j;
}

namespace detail {

/// Blend fraction r(y) and its derivative; z is clamped to [0,1].
inline std::pair<double, double> blend_at(double y, const ModelParams& q) {
  const double width = q.h1() - q.h0();
  const double z = std::clamp((y - q.h0()) / width, 0.0, 1.0);
  return {blend_weight(z), blend_weight_slope(z) / width};
}

} // namespace detail

inline Point f_apply(Point p, const ModelParams& q) {
  if (p.y <= q.h0()) return u0_apply(p, q);
  if (p.y >= q.h1()) return u1_apply(p, q);
  const auto [r, dr] = detail::blend_at(p.y, q);
  return (1.0 - r) * u0_apply(p, q) + r * u1_apply(p, q);
}

/// Exact derivative of f_apply, including r'(y) (U1 - U0) in the strip.
inline Mat2 f_jacobian(Point p, const ModelParams& q) {
  if (p.y <= q.h0()) return u0_jacobian(p, q);
  if (p.y >= q.h1()) return u1_jacobian(p, q);
  const auto [r, dr] = detail::blend_at(p.y, q);
  Mat2 j = (1.0 - r) * u0_jacobian(p, q) + r * u1_jacobian(p, q);
  const Point gap = u1_apply(p, q) - u0_apply(p, q);
  j.b += dr * gap.x;
  j.d += dr * gap.y;
  return j;
}

inline ParamJacobian f_param_jacobian(Point p, const ModelParams& q) {
  if (p.y <= q.h0()) return u0_param_jacobian(p, q);
  if (p.y >= q.h1()) return u1_param_jacobian(p, q);
  const double r = detail::blend_at(p.y, q).first;
  const ParamJacobian j0 = u0_param_jacobian(p, q);
  const ParamJacobian j1 = u1_param_jacobian(p, q);
  ParamJacobian j;
  for (std::size_t i = 0; i < 4; ++i) {
    j.dx[i] = (1.0 - r) * j0.dx[i] + r * j1.dx[i];
    j.dy[i] = (1.0 - r) * j0.dy[i] + r * j1.dy[i];
  }
  return j;
}

/// Closed-form coefficient table of the family at the given mu.
inline NormalFormCoeffs extract_normal_form(const ModelParams& q) {
  NormalFormCoeffs nf;
  nf.c0 = 1.0;
  nf.c1 = 0.0;
  nf.c2 = q.c20;
  nf.d0 = q.mu[0];
  nf.d1 = 1.0 + q.mu[2];
  nf.d2 = 0.0;
  nf.d3 = 0.0;
  nf.d4 = 0.0;
  nf.d5 = q.d50;
  nf.a1 = q.a10 + q.mu[3];
  nf.b1 = -q.a10;
  nf.lambda = q.alpha + q.mu[1];
  nf.sigma = 1.0 / q.alpha;
  nf.chi = 1;
  nf.chi_eig = 1;
  nf.m = 1;
  return nf;
}

/// Gradient of lambda*sigma at mu = 0; [0, 1/alpha, 0, 0] for this family.
inline ParamVec n_eig(const ModelParams& q) { return {0.0, 1.0 / q.alpha, 0.0, 0.0}; }

/// Gradient of d0 at mu = 0; d0 = mu1 exactly.
inline ParamVec n_tang(const ModelParams&) { return {1.0, 0.0, 0.0, 0.0}; }

/// n_eig by central differences of the eigenvalue product of D f(0,0).
inline ParamVec n_eig_numeric(const ModelParams& q, double step = 1e-6) {
  auto product = [&](const ParamVec& m) {
    const auto ev = f_jacobian({0.0, 0.0}, q.with_mu(m)).eigenvalues();
    return (ev[0] * ev[1]).real();
  };
  ParamVec g{};
  for (std::size_t i = 0; i < 4; ++i) {
    ParamVec plus{}, minus{};
    plus[i] = step;
    minus[i] = -step;
    g[i] = (product(plus) - product(minus)) / (2.0 * step);
  }
  return g;
}

inline double dot(const ParamVec& a, const ParamVec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < 4; ++i) s += a[i] * b[i];
  return s;
}

} // namespace tangency
