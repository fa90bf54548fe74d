#pragma once
/**
 * @file orbit.hpp
 * @brief Single-round periodic orbits as fixed points of f^{k+1}: chain-rule
 * iteration, damped Newton with a seeding ladder, monodromy and stability.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "tangency/asymptotics.hpp"
#include "tangency/errors.hpp"
#include "tangency/map_core.hpp"

namespace tangency {

struct BoundingBox {
  double xmin = -10.0, xmax = 10.0, ymin = -10.0, ymax = 10.0;

  bool contains(Point p) const {
    return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
  }
};

/// Iterates of p (p itself first) together with the accumulated Jacobian.
struct OrbitSegment {
  std::vector<Point> points;  // p_0 .. p_{n-1}
  Point end;                  // p_n
  Mat2 jacobian = Mat2::identity();
  Point tangent;              // d p_n / d epsilon along the requested parameter direction
};

/// f^n(p) with Jacobians multiplied in orbit order and, when v is given, the
/// parameter tangent along mu + epsilon v.
inline OrbitSegment iterate_segment(Point p, int n, const ModelParams& params,
                                    const BoundingBox& box = {},
                                    const std::optional<ParamVec>& v = std::nullopt) {
  if (n < 1) throw PreconditionViolated("iteration count must be positive");
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw PreconditionViolated("non-finite start point");
  OrbitSegment seg;
  seg.points.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    seg.points.push_back(p);
    const Mat2 j = f_jacobian(p, params);
    if (v) seg.tangent = j * seg.tangent + f_param_jacobian(p, params).along(*v);
    seg.jacobian = j * seg.jacobian;
    p = f_apply(p, params);
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !box.contains(p))
      throw EscapedDomain("iterate " + std::to_string(i + 1) + " left the bounding box");
  }
  seg.end = p;
  return seg;
}

inline std::pair<Point, Mat2> iterate_with_jacobian(Point p, int n, const ModelParams& params,
                                                    const BoundingBox& box = {}) {
  const OrbitSegment seg = iterate_segment(p, n, params, box);
  return {seg.end, seg.jacobian};
}

// ---------------------------------------------------------------------------
// Stability

enum class Stability { Stable, SaddleNodeCritical, PeriodDoublingCritical, Unstable };

inline const char* to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::SaddleNodeCritical: return "saddle_node_critical";
    case Stability::PeriodDoublingCritical: return "period_doubling_critical";
    case Stability::Unstable: return "unstable";
  }
  return "unknown";
}

struct StabilityIndicators {
  double tau = 0.0;
  double delta = 0.0;
  double g_sn = 1.0;  // det(M - I)
  double g_pd = 1.0;  // det(M + I)

  static StabilityIndicators from(double tau, double delta) {
    return {tau, delta, delta - tau + 1.0, delta + tau + 1.0};
  }
};

inline Stability classify_stability(const StabilityIndicators& ind, double tol = 1e-9) {
  if (std::abs(ind.g_sn) <= tol) return Stability::SaddleNodeCritical;
  if (std::abs(ind.g_pd) <= tol) return Stability::PeriodDoublingCritical;
  const bool inside = ind.delta - (std::abs(ind.tau) - 1.0) > tol && 1.0 - ind.delta > tol;
  return inside ? Stability::Stable : Stability::Unstable;
}

// ---------------------------------------------------------------------------
// Periodic orbits

struct PeriodicOrbit {
  int k = 0;
  int m = 1;
  std::vector<Point> points;  // k + m points, starting with the point in the reinjection region
  double trace = 0.0;
  double det = 0.0;
  std::array<std::complex<double>, 2> multipliers{};
  double residual = 0.0;
  Stability stability = Stability::Unstable;
  bool single_round = false;
  int newton_iterations = 0;

  int period() const { return static_cast<int>(points.size()); }
  StabilityIndicators indicators() const { return StabilityIndicators::from(trace, det); }
  double max_multiplier_modulus() const {
    return std::max(std::abs(multipliers[0]), std::abs(multipliers[1]));
  }
};

struct OrbitOptions {
  double tol_newton = 1e-12;       // step and residual stopping threshold
  int max_iterations = 50;
  int max_halvings = 10;
  double accept_residual = 1e-10;
  double stability_tol = 1e-9;
  int k_cap = 30;
  bool require_single_round = true;
  std::optional<double> seed_guard;  // max sup-distance from the seed, in units of alpha^k
  BoundingBox box;
};

/// Exactly one point with y >= h1 and none strictly inside the blend strip.
inline bool single_round_certificate(const std::vector<Point>& pts, const ModelParams& params) {
  int upper = 0;
  for (const Point& p : pts) {
    if (p.y > params.h0() && p.y < params.h1()) return false;
    if (p.y >= params.h1()) ++upper;
  }
  return upper == 1;
}

namespace detail {

struct NewtonResult {
  Point p;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

inline double newton_residual(Point p, int n, const ModelParams& params, const BoundingBox& box) {
  try {
    return sup_norm(iterate_segment(p, n, params, box).end - p);
  } catch (const EscapedDomain&) {
    return std::numeric_limits<double>::infinity();
  }
}

/// Newton on F(p) = f^n(p) - p; with damping, each step is halved until the residual decreases.
inline NewtonResult newton_fixed_point(Point p, int n, const ModelParams& params,
                                       const OrbitOptions& opt, bool damped) {
  NewtonResult out{p};
  const double scale = 1.0;  // max(alpha^k, 1)
  for (int it = 0; it < opt.max_iterations; ++it) {
    out.iterations = it + 1;
    OrbitSegment seg;
    try {
      seg = iterate_segment(p, n, params, opt.box);
    } catch (const EscapedDomain&) {
      return out;
    }
    const Point F = seg.end - p;
    const double res = sup_norm(F);
    Point step;
    if (!(seg.jacobian - Mat2::identity()).solve(-1.0 * F, step)) return out;

    double t = 1.0;
    Point trial = p + step;
    if (damped) {
      int halvings = 0;
      while (newton_residual(trial, n, params, opt.box) >= res && halvings < opt.max_halvings) {
        t *= 0.5;
        trial = p + t * step;
        ++halvings;
      }
    }
    p = trial;
    const double step_size = t * sup_norm(step);
    if (step_size <= opt.tol_newton * scale) {
      out.p = p;
      out.residual = newton_residual(p, n, params, opt.box);
      out.converged = out.residual <= opt.tol_newton * scale || out.residual <= opt.accept_residual;
      return out;
    }
  }
  out.p = p;
  out.residual = newton_residual(p, n, params, opt.box);
  return out;
}

/// Rotates the orbit to start at the reinjection-region point (largest y).
inline std::vector<Point> canonical_rotation(std::vector<Point> pts) {
  const auto top = std::max_element(pts.begin(), pts.end(),
                                    [](const Point& a, const Point& b) { return a.y < b.y; });
  std::rotate(pts.begin(), top, pts.end());
  return pts;
}

inline PeriodicOrbit assemble_orbit(int k, Point p, int iterations, const ModelParams& params,
                                    const OrbitOptions& opt) {
  const int n = k + 1;
  const std::vector<Point> pts = canonical_rotation(iterate_segment(p, n, params, opt.box).points);
  const OrbitSegment seg = iterate_segment(pts.front(), n, params, opt.box);
  PeriodicOrbit orb;
  orb.k = k;
  orb.m = 1;
  orb.points = seg.points;
  orb.trace = seg.jacobian.trace();
  orb.det = seg.jacobian.det();
  orb.multipliers = seg.jacobian.eigenvalues();
  orb.residual = sup_norm(seg.end - pts.front());
  orb.stability = classify_stability(orb.indicators(), opt.stability_tol);
  orb.single_round = k == 0 || single_round_certificate(orb.points, params);
  orb.newton_iterations = iterations;
  return orb;
}

inline std::optional<NewtonResult> try_seed(Point seed, int k, const ModelParams& params,
                                            const OrbitOptions& opt) {
  for (bool damped : {false, true}) {
    NewtonResult r = newton_fixed_point(seed, k + 1, params, opt, damped);
    if (!r.converged || r.residual > opt.accept_residual) continue;
    if (opt.seed_guard) {
      const double bound = *opt.seed_guard * std::pow(params.alpha, k);
      if (sup_norm(r.p - seed) > bound) continue;
    }
    return r;
  }
  return std::nullopt;
}

} // namespace detail

/// Period-(k+1) orbit through a fixed point of f^{k+1}. k = 0 gives the fixed point (1,1).
inline PeriodicOrbit find_periodic_orbit(int k, const ModelParams& params,
                                         std::optional<Point> seed = std::nullopt,
                                         const OrbitOptions& opt = {}) {
  params.validate();
  if (k < 0 || k > opt.k_cap)
    throw PreconditionViolated("k = " + std::to_string(k) + " outside [0, " + std::to_string(opt.k_cap) + "]");

  std::vector<Point> ladder;
  if (seed) {
    ladder.push_back(*seed);
  } else if (k == 0) {
    ladder.push_back({1.0, 1.0});
  } else {
    const double ak = std::pow(params.alpha, k);
    ladder.push_back(fixed_point_ansatz(params, k));
    ladder.push_back({ak, 1.0});
    if (k > 1) {
      OrbitOptions prev_opt = opt;
      prev_opt.require_single_round = false;
      try {
        const PeriodicOrbit prev = find_periodic_orbit(k - 1, params, fixed_point_ansatz(params, k - 1), prev_opt);
        ladder.push_back({params.alpha * prev.points.front().x, prev.points.front().y});
      } catch (const SolverError&) {
      }
    }
  }

  bool converged_elsewhere = false;
  for (const Point& s : ladder) {
    const auto r = detail::try_seed(s, k, params, opt);
    if (!r) continue;
    PeriodicOrbit orb = detail::assemble_orbit(k, r->p, r->iterations, params, opt);
    if (opt.require_single_round && !orb.single_round) {
      converged_elsewhere = true;
      continue;
    }
    return orb;
  }
  if (converged_elsewhere)
    throw NotSingleRound("orbit for k = " + std::to_string(k) + " fails the single-round certificate");
  throw NoConvergence("Newton found no period-" + std::to_string(k + 1) + " orbit from any seed");
}

} // namespace tangency
