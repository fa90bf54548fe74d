#pragma once
/**
 * @file portrait.hpp
 * @brief Phase-portrait data: the unstable manifold of the origin grown from a
 * fundamental domain, the homoclinic orbit, and the coexisting periodic orbits.
 */

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "tangency/errors.hpp"
#include "tangency/map_core.hpp"
#include "tangency/orbit.hpp"

namespace tangency {

enum class ManifoldBranch { UnstablePlus, UnstableMinus, StableLocal };

inline const char* to_string(ManifoldBranch b) {
  switch (b) {
    case ManifoldBranch::UnstablePlus: return "unstable_plus";
    case ManifoldBranch::UnstableMinus: return "unstable_minus";
    case ManifoldBranch::StableLocal: return "stable_local";
  }
  return "unknown";
}

struct ManifoldArc {
  ManifoldBranch branch = ManifoldBranch::UnstablePlus;
  std::vector<Point> points;
  std::vector<double> params;  // s = j + theta: j-th image of the fundamental-domain point theta
  int iterations = 0;
};

struct ManifoldOptions {
  double max_spacing = 0.01;
  double max_turn_degrees = 20.0;
  double min_param_gap = 1e-12;
  std::size_t max_points = 400000;
  BoundingBox box{-0.1, 1.3, -0.1, 1.3};
};

namespace detail {

/// Point with parameter s on the branch through the fundamental domain [sigma^-2, sigma^-1] of the y-axis.
inline Point manifold_point(double s, int sign, const ModelParams& params) {
  int j = static_cast<int>(std::floor(s));
  double theta = s - j;
  const double inv_sigma = params.alpha;  // 1 / sigma
  Point p{0.0, sign * std::pow(inv_sigma, 2.0 - theta)};
  for (int i = 0; i < j; ++i) p = f_apply(p, params);
  return p;
}

inline double turn_angle(Point a, Point b, Point c) {
  const Point u = b - a, v = c - b;
  const double nu = std::hypot(u.x, u.y), nv = std::hypot(v.x, v.y);
  if (nu == 0.0 || nv == 0.0) return 0.0;
  const double cosang = std::clamp((u.x * v.x + u.y * v.y) / (nu * nv), -1.0, 1.0);
  return std::acos(cosang) * 180.0 / std::numbers::pi;
}

} // namespace detail

/// Forward images of a fundamental-domain sample on the local unstable direction
/// (the y-axis). One theta grid is shared by every domain and refined until the
/// spacing and turning criteria hold everywhere, so f maps each arc point onto
/// the arc point one domain later.
inline ManifoldArc unstable_manifold(const ModelParams& params, int n_samples, int n_iterations,
                                     ManifoldBranch branch = ManifoldBranch::UnstablePlus,
                                     const ManifoldOptions& opt = {}) {
  params.validate();
  if (n_samples < 2 || n_iterations < 1) throw PreconditionViolated("need n_samples >= 2 and n_iterations >= 1");
  if (branch == ManifoldBranch::StableLocal) throw PreconditionViolated("use stable_local_segment for the stable branch");
  const int sign = branch == ManifoldBranch::UnstablePlus ? 1 : -1;
  const int domains = n_iterations + 1;

  std::vector<double> theta;
  for (int i = 0; i < n_samples; ++i) theta.push_back(static_cast<double>(i) / n_samples);

  ManifoldArc arc;
  arc.branch = branch;
  arc.iterations = n_iterations;
  auto build = [&] {
    arc.points.clear();
    arc.params.clear();
    for (int j = 0; j < domains; ++j) {
      for (double t : theta) {
        Point q{0.0, sign * std::pow(params.alpha, 2.0 - t)};
        for (int i = 0; i < j; ++i) q = f_apply(q, params);
        arc.points.push_back(q);
        arc.params.push_back(j + t);
      }
    }
    arc.points.push_back(detail::manifold_point(domains, sign, params));
    arc.params.push_back(domains);
  };

  auto needs_split = [&](std::size_t i) {
    const Point d = arc.points[i + 1] - arc.points[i];
    if (std::hypot(d.x, d.y) >= opt.max_spacing) return true;
    if (i > 0 && detail::turn_angle(arc.points[i - 1], arc.points[i], arc.points[i + 1]) >= opt.max_turn_degrees)
      return true;
    if (i + 2 < arc.points.size() &&
        detail::turn_angle(arc.points[i], arc.points[i + 1], arc.points[i + 2]) >= opt.max_turn_degrees)
      return true;
    return false;
  };

  for (bool changed = true; changed;) {
    build();
    const std::size_t n = theta.size();
    std::vector<bool> split(n, false);
    for (std::size_t i = 0; i + 1 < arc.points.size(); ++i)
      if (needs_split(i)) split[i % n] = true;
    changed = false;
    std::vector<double> refined;
    for (std::size_t i = 0; i < n; ++i) {
      refined.push_back(theta[i]);
      const double next = i + 1 < n ? theta[i + 1] : 1.0;
      if (split[i] && next - theta[i] > opt.min_param_gap) {
        refined.push_back(0.5 * (theta[i] + next));
        changed = true;
      }
    }
    theta = std::move(refined);
    if (theta.size() * static_cast<std::size_t>(domains) > opt.max_points) break;
  }
  build();

  for (const Point& p : arc.points)
    if (!opt.box.contains(p))
      throw EscapedDomain("manifold point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                          ") outside the bounding box");
  return arc;
}

/// Local stable manifold: the invariant x-axis segment across the bounding box.
inline ManifoldArc stable_local_segment(const ManifoldOptions& opt = {}) {
  ManifoldArc arc;
  arc.branch = ManifoldBranch::StableLocal;
  const int n = static_cast<int>(std::ceil((opt.box.xmax - opt.box.xmin) / opt.max_spacing));
  for (int i = 0; i <= n; ++i) {
    const double x = opt.box.xmin + (opt.box.xmax - opt.box.xmin) * i / n;
    arc.points.push_back({x, 0.0});
    arc.params.push_back(x);
  }
  return arc;
}

/// (0,1), (1,0), k_tail forward images of (1,0), then k_tail preimages of (0,1) along the y-axis.
inline std::vector<Point> homoclinic_orbit(int k_tail, const ModelParams& params) {
  if (params.mu[0] != 0.0) throw PreconditionViolated("the tangency requires mu1 = 0");
  if (k_tail < 0) throw PreconditionViolated("k_tail must be non-negative");
  std::vector<Point> out{{0.0, 1.0}};
  Point p = f_apply(out.front(), params);
  out.push_back(p);
  for (int i = 0; i < k_tail; ++i) {
    p = f_apply(p, params);
    out.push_back(p);
  }
  const double inv_sigma = params.alpha;
  Point q = out.front();
  for (int i = 0; i < k_tail; ++i) {
    q = {0.0, q.y * inv_sigma};
    out.push_back(q);
  }
  return out;
}

struct PortraitOptions {
  int manifold_samples = 40;
  int manifold_iterations = 6;
  int homoclinic_tail = 12;
  ManifoldOptions manifold;
  OrbitOptions orbit;
};

struct PortraitDataset {
  std::vector<ManifoldArc> arcs;
  std::vector<PeriodicOrbit> orbits;
  std::vector<std::pair<int, std::string>> missing;  // k with no single-round orbit, and why
  std::vector<Point> fixed_points;
  std::vector<Point> homoclinic_points;
};

/// Arcs, single-round orbits for k = 1..k_max, the fixed points and the homoclinic orbit.
/// Values of k for which no orbit is found are listed in `missing`.
inline PortraitDataset build_portrait(const ModelParams& params, int k_max, const PortraitOptions& opt = {}) {
  params.validate();
  if (k_max < 0 || k_max > opt.orbit.k_cap) throw PreconditionViolated("k_max outside [0, k_cap]");
  PortraitDataset out;
  out.arcs.push_back(unstable_manifold(params, opt.manifold_samples, opt.manifold_iterations,
                                       ManifoldBranch::UnstablePlus, opt.manifold));
  out.arcs.push_back(stable_local_segment(opt.manifold));
  for (int k = 1; k <= k_max; ++k) {
    try {
      out.orbits.push_back(find_periodic_orbit(k, params, std::nullopt, opt.orbit));
    } catch (const SolverError& e) {
      out.missing.emplace_back(k, e.what());
    }
  }
  out.fixed_points.push_back({0.0, 0.0});
  out.fixed_points.push_back(find_periodic_orbit(0, params, std::nullopt, opt.orbit).points.front());
  if (params.mu[0] == 0.0) out.homoclinic_points = homoclinic_orbit(opt.homoclinic_tail, params);
  return out;
}

} // namespace tangency
