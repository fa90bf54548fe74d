#pragma once
/**
 * @file bifurcation.hpp
 * @brief Saddle-node and period-doubling boundaries of the stability window
 * along a parameter ray mu = epsilon v, and least-squares extrapolation of the
 * scaled sequences epsilon_k / rate(k).
 */

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "tangency/asymptotics.hpp"
#include "tangency/errors.hpp"
#include "tangency/map_core.hpp"
#include "tangency/orbit.hpp"

namespace tangency {

struct DirectionRay {
  ParamVec v{1.0, 0.0, 0.0, 0.0};
  ScalingCase scaling = ScalingCase::Case1_mu1;
};

/// Scaling case implied by v: coordinate rays map to their own case, otherwise
/// v1 != 0 is transverse, n_eig . v != 0 is Case 2, and the rest are tangent.
inline ScalingCase classify_direction(const ParamVec& v, const ModelParams& params) {
  int nonzero = 0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    if (!std::isfinite(v[i])) throw InvalidParams("direction must be finite");
    if (v[i] != 0.0) {
      ++nonzero;
      last = i;
    }
  }
  if (nonzero == 0) throw InvalidParams("direction must be nonzero");
  if (nonzero == 1) {
    constexpr ScalingCase coordinate[] = {ScalingCase::Case1_mu1, ScalingCase::Case2_mu2,
                                          ScalingCase::Case3_mu3, ScalingCase::Case4_mu4};
    return coordinate[last];
  }
  if (v[0] != 0.0) return ScalingCase::GeneralTransverse;
  if (dot(n_eig(params), v) != 0.0) return ScalingCase::Case2_mu2;
  return ScalingCase::GeneralTangent;
}

inline DirectionRay make_ray(const ParamVec& v, const ModelParams& params) {
  return {v, classify_direction(v, params)};
}

/// The ray e_index for index in 1..4.
inline DirectionRay coordinate_ray(int index, const ModelParams& params) {
  if (index < 1 || index > 4) throw InvalidParams("direction index must be in 1..4");
  ParamVec v{};
  v[static_cast<std::size_t>(index - 1)] = 1.0;
  return make_ray(v, params);
}

enum class BifurcationKind { SN, PD };

inline const char* to_string(BifurcationKind k) { return k == BifurcationKind::SN ? "SN" : "PD"; }

struct BifurcationPoint {
  BifurcationKind kind = BifurcationKind::SN;
  int k = 0;
  double epsilon = 0.0;
  double scaled_value = 0.0;
  StabilityIndicators indicators_at;
  bool single_round = false;  // orbit at the located value passes the single-round certificate
  Point orbit_point;
};

struct ScanOptions {
  OrbitOptions orbit = [] {
    OrbitOptions o;
    o.require_single_round = false;
    o.seed_guard = 0.5;
    return o;
  }();
  double step_fraction = 0.1;   // marching step relative to the predicted magnitude
  double range_factor = 10.0;   // give up beyond this multiple of the predicted magnitude
  double tol_bisect = 1e-8;     // relative epsilon tolerance
  double g_tol = 1e-8;          // required |g| at a located point
  int max_tie_halvings = 20;
};

inline ModelParams params_on_ray(const ModelParams& params, const DirectionRay& ray, double eps) {
  ModelParams out = params;
  for (std::size_t i = 0; i < 4; ++i) out.mu[i] = params.mu[i] + eps * ray.v[i];
  return out;
}

/// Orbit on the ray at epsilon, warm-started from a seed when one is given.
inline PeriodicOrbit orbit_on_ray(int k, double eps, const DirectionRay& ray, const ModelParams& params,
                                  std::optional<Point> warm_seed, const OrbitOptions& opt) {
  return find_periodic_orbit(k, params_on_ray(params, ray, eps), warm_seed, opt);
}

inline StabilityIndicators stability_indicators_at(int k, double eps, const DirectionRay& ray,
                                                   const ModelParams& params,
                                                   std::optional<Point> warm_seed = std::nullopt,
                                                   const ScanOptions& opt = {}) {
  return orbit_on_ray(k, eps, ray, params, warm_seed, opt.orbit).indicators();
}

namespace detail {

struct RaySample {
  double eps = 0.0;
  PeriodicOrbit orbit;
};

/// Illinois regula falsi on a bracket [a, b] with g(a) > 0 >= g(b), bisecting
/// when the interpolated point is unusable.
template <class G>
std::pair<double, double> bracketed_root(G&& g, double a, double ga, double b, double gb,
                                         double g_tol, double x_tol, int max_iter = 200) {
  int side = 0;
  double best = std::abs(ga) < std::abs(gb) ? a : b;
  double best_g = std::min(std::abs(ga), std::abs(gb));
  for (int it = 0; it < max_iter; ++it) {
    if (best_g <= g_tol && std::abs(b - a) <= x_tol) break;
    if (best_g <= 1e-3 * g_tol) break;
    double c = (a * gb - b * ga) / (gb - ga);
    if (!std::isfinite(c) || c <= std::min(a, b) || c >= std::max(a, b) || it % 8 == 7) c = 0.5 * (a + b);
    const std::optional<double> gc = g(c);
    if (!gc) {  // treat failure as the far side of the bracket
      b = c;
      gb = -std::abs(gb);
      side = 0;
      continue;
    }
    if (std::abs(*gc) < best_g) {
      best_g = std::abs(*gc);
      best = c;
    }
    if (*gc > 0.0) {
      a = c;
      ga = *gc;
      if (side == 1) gb *= 0.5;
      side = 1;
    } else {
      b = c;
      gb = *gc;
      if (side == -1) ga *= 0.5;
      side = -1;
    }
  }
  return {best, best_g};
}

inline bool indicators_positive(const StabilityIndicators& s) { return s.g_sn > 0.0 && s.g_pd > 0.0; }

/// Orbit at the point of the curve F(p, eps) = 0 whose coordinate `fixed` is pinned to `value`.
struct PinnedSolve {
  Point p;
  double eps = 0.0;
  double g_sn = 0.0;
};

inline std::optional<PinnedSolve> solve_pinned(int k, const DirectionRay& ray, const ModelParams& params,
                                               int fixed, double value, Point p, double eps,
                                               const OrbitOptions& opt) {
  const int n = k + 1;
  if (fixed == 0) p.x = value; else p.y = value;
  for (int it = 0; it < opt.max_iterations; ++it) {
    OrbitSegment seg;
    try {
      seg = iterate_segment(p, n, params_on_ray(params, ray, eps), opt.box, ray.v);
    } catch (const EscapedDomain&) {
      return std::nullopt;
    }
    const Point F = seg.end - p;
    const Mat2 A = seg.jacobian - Mat2::identity();
    const Mat2 J = fixed == 1 ? Mat2{A.a, seg.tangent.x, A.c, seg.tangent.y}
                              : Mat2{A.b, seg.tangent.x, A.d, seg.tangent.y};
    Point step;
    if (!J.solve(-1.0 * F, step)) return std::nullopt;
    if (fixed == 1) p.x += step.x; else p.y += step.x;
    eps += step.y;
    if (std::abs(step.x) <= opt.tol_newton && sup_norm(F) <= opt.accept_residual) {
      const OrbitSegment fin = iterate_segment(p, n, params_on_ray(params, ray, eps), opt.box);
      if (sup_norm(fin.end - p) > opt.accept_residual) return std::nullopt;
      return PinnedSolve{p, eps, fin.jacobian.det() - fin.jacobian.trace() + 1.0};
    }
  }
  return std::nullopt;
}

/// Locates the fold (g_sn = 0) in the pinned parametrisation, starting from a
/// stable orbit close to it.
inline std::optional<PinnedSolve> refine_fold(int k, const DirectionRay& ray, const ModelParams& params,
                                              const RaySample& good, const ScanOptions& opt) {
  const Point p0 = good.orbit.points.front();
  const OrbitSegment seg = iterate_segment(p0, k + 1, params_on_ray(params, ray, good.eps), opt.orbit.box);
  const Mat2 A = seg.jacobian - Mat2::identity();
  // Null direction of M - I: the larger of the two row-based candidates.
  Point null1{-A.b, A.a}, null2{-A.d, A.c};
  Point null = sup_norm(null1) > sup_norm(null2) ? null1 : null2;
  const double nn = std::hypot(null.x, null.y);
  if (!(nn > 0.0)) return std::nullopt;
  null = (1.0 / nn) * null;
  const int fixed = std::abs(null.y) >= std::abs(null.x) ? 1 : 0;
  const double base = fixed == 1 ? p0.y : p0.x;
  const double dir = fixed == 1 ? null.y : null.x;

  auto h = [&](double value, Point warm, double eps) {
    return solve_pinned(k, ray, params, fixed, value, warm, eps, opt.orbit);
  };
  const auto start = h(base, p0, good.eps);
  if (!start || start->g_sn <= 0.0) return std::nullopt;

  // Walk along the null direction until g_sn changes sign (stable to unstable branch).
  const double scale = std::pow(params.alpha, k);
  double d = 1e-7 * scale;
  std::optional<PinnedSolve> far;
  double far_value = base;
  for (int sgn : {1, -1}) {
    PinnedSolve last = *start;
    for (double dd = d; dd < 0.5 * scale; dd *= 2.0) {
      const double value = base + sgn * dir / std::abs(dir) * dd;
      const auto s = h(value, last.p, last.eps);
      if (!s) break;
      if (s->g_sn <= 0.0) {
        far = s;
        far_value = value;
        break;
      }
      last = *s;
    }
    if (far) break;
  }
  if (!far) return std::nullopt;

  PinnedSolve best = *start;
  auto g = [&](double value) -> std::optional<double> {
    const auto s = h(value, best.p, best.eps);
    if (!s) return std::nullopt;
    if (std::abs(s->g_sn) < std::abs(best.g_sn)) best = *s;
    return s->g_sn;
  };
  bracketed_root(g, base, start->g_sn, far_value, far->g_sn, 1e-2 * opt.g_tol, 1e-15 * scale);
  if (std::abs(far->g_sn) < std::abs(best.g_sn)) best = *far;
  return best;
}

inline BifurcationPoint make_point(BifurcationKind kind, int k, double eps, const PeriodicOrbit& orb,
                                   const DirectionRay& ray, const ModelParams& params) {
  BifurcationPoint bp;
  bp.kind = kind;
  bp.k = k;
  bp.epsilon = eps;
  bp.scaled_value = eps / case_rate(ray.scaling, k, params.alpha);
  bp.indicators_at = orb.indicators();
  bp.single_round = single_round_certificate(orb.points, params_on_ray(params, ray, eps));
  bp.orbit_point = orb.points.front();
  return bp;
}

/// Orbit through a point already known to be periodic; no Newton solve.
inline PeriodicOrbit orbit_through(int k, Point p, const ModelParams& params, const OrbitOptions& opt) {
  return assemble_orbit(k, p, 0, params, opt);
}

} // namespace detail

/// Predicted epsilon magnitudes (SN side, PD side) used to size the march.
inline std::pair<double, double> predicted_magnitudes(int k, const DirectionRay& ray, const ModelParams& params) {
  const double rate = case_rate(ray.scaling, k, params.alpha);
  try {
    const AsymptoticPrediction pr = predict(ray.scaling, k, unfolding_data(params), ray.v);
    return {pr.sn_limit * rate, pr.pd_limit * rate};
  } catch (const DegenerateDirection&) {
    return {rate, -rate};
  }
}

/// One SN and one PD point on opposite sides of epsilon = 0.
inline std::pair<BifurcationPoint, BifurcationPoint> locate_bifurcations(int k, const DirectionRay& ray,
                                                                         const ModelParams& params,
                                                                         const ScanOptions& opt = {}) {
  ScanOptions base_opt = opt;
  base_opt.orbit.seed_guard.reset();
  const PeriodicOrbit origin = orbit_on_ray(k, 0.0, ray, params, std::nullopt, base_opt.orbit);
  if (origin.stability != Stability::Stable)
    throw PreconditionViolated("orbit at epsilon = 0 is not stable for k = " + std::to_string(k));

  const auto [sn_mag, pd_mag] = predicted_magnitudes(k, ray, params);
  std::optional<BifurcationPoint> sn, pd;

  for (int side : {1, -1}) {
    double mag = std::abs(sn_mag);
    if ((sn_mag > 0) != (side > 0)) mag = std::abs(pd_mag);
    if ((sn_mag > 0) != (side > 0) && (pd_mag > 0) != (side > 0)) mag = std::max(std::abs(sn_mag), std::abs(pd_mag));
    double h = side * opt.step_fraction * mag;
    const double limit = opt.range_factor * mag;

    detail::RaySample good{0.0, origin};
    std::optional<detail::RaySample> bad;
    BifurcationKind kind = BifurcationKind::SN;
    int ties = 0;
    while (std::abs(good.eps) <= limit) {
      const double en = good.eps + h;
      try {
        const PeriodicOrbit orb = orbit_on_ray(k, en, ray, params, good.orbit.points.front(), opt.orbit);
        const auto ind = orb.indicators();
        if (ind.g_sn <= 0.0 && ind.g_pd <= 0.0 && ties < opt.max_tie_halvings) {
          h *= 0.5;
          ++ties;
          continue;
        }
        if (ind.g_sn <= 0.0 || ind.g_pd <= 0.0) {
          kind = ind.g_pd <= 0.0 && ind.g_sn > 0.0 ? BifurcationKind::PD : BifurcationKind::SN;
          bad = detail::RaySample{en, orb};
          break;
        }
        good = {en, orb};
      } catch (const SolverError&) {
        kind = BifurcationKind::SN;
        bad = detail::RaySample{en, {}};
        break;
      }
    }
    if (!bad) continue;

    double a = good.eps, b = bad->eps;
    detail::RaySample best = good;
    if (kind == BifurcationKind::PD) {
      auto g = [&](double e) -> std::optional<double> {
        try {
          const PeriodicOrbit orb = orbit_on_ray(k, e, ray, params, best.orbit.points.front(), opt.orbit);
          if (std::abs(orb.indicators().g_pd) < std::abs(best.orbit.indicators().g_pd)) best = {e, orb};
          return orb.indicators().g_pd;
        } catch (const SolverError&) {
          return std::nullopt;
        }
      };
      detail::bracketed_root(g, a, good.orbit.indicators().g_pd, b, bad->orbit.indicators().g_pd,
                             1e-2 * opt.g_tol, opt.tol_bisect * std::abs(a));
      pd = detail::make_point(BifurcationKind::PD, k, best.eps, best.orbit, ray, params);
      continue;
    }

    // Saddle-node: bisect on the existence of a stable orbit, then pin the fold.
    for (int it = 0; it < 200 && std::abs(b - a) > opt.tol_bisect * std::abs(a); ++it) {
      const double m = 0.5 * (a + b);
      try {
        const PeriodicOrbit orb = orbit_on_ray(k, m, ray, params, good.orbit.points.front(), opt.orbit);
        if (detail::indicators_positive(orb.indicators())) {
          a = m;
          good = {m, orb};
          continue;
        }
      } catch (const SolverError&) {
      }
      b = m;
    }
    BifurcationPoint point = detail::make_point(BifurcationKind::SN, k, good.eps, good.orbit, ray, params);
    if (std::abs(point.indicators_at.g_sn) > opt.g_tol) {
      if (const auto pinned = detail::refine_fold(k, ray, params, good, opt)) {
        const ModelParams at = params_on_ray(params, ray, pinned->eps);
        const PeriodicOrbit orb = detail::orbit_through(k, pinned->p, at, opt.orbit);
        if (std::abs(orb.indicators().g_sn) < std::abs(point.indicators_at.g_sn))
          point = detail::make_point(BifurcationKind::SN, k, pinned->eps, orb, ray, params);
      }
    }
    sn = point;
  }

  if (!sn || !pd)
    throw NoBifurcationInRange("k = " + std::to_string(k) + ": " + (sn ? "" : "no SN ") + (pd ? "" : "no PD ") +
                               "within " + std::to_string(opt.range_factor) + "x the predicted magnitude");
  return {*sn, *pd};
}

// ---------------------------------------------------------------------------
// Least squares and scaling fits

namespace detail {

/// Minimises |A c - b|_2 by Householder QR. A is given row by row.
inline std::vector<double> least_squares(std::vector<std::vector<double>> A, std::vector<double> b) {
  const std::size_t m = A.size();
  const std::size_t n = m ? A.front().size() : 0;
  if (m < n || n == 0) throw PreconditionViolated("least squares needs at least as many rows as columns");
  for (std::size_t j = 0; j < n; ++j) {
    double norm = 0.0;
    for (std::size_t i = j; i < m; ++i) norm += A[i][j] * A[i][j];
    norm = std::sqrt(norm);
    if (norm == 0.0) throw PreconditionViolated("rank-deficient least-squares basis");
    const double alpha = A[j][j] > 0 ? -norm : norm;
    std::vector<double> v(m, 0.0);
    for (std::size_t i = j; i < m; ++i) v[i] = A[i][j];
    v[j] -= alpha;
    double vv = 0.0;
    for (std::size_t i = j; i < m; ++i) vv += v[i] * v[i];
    if (vv == 0.0) continue;
    for (std::size_t c = j; c < n; ++c) {
      double s = 0.0;
      for (std::size_t i = j; i < m; ++i) s += v[i] * A[i][c];
      s = 2.0 * s / vv;
      for (std::size_t i = j; i < m; ++i) A[i][c] -= s * v[i];
    }
    double s = 0.0;
    for (std::size_t i = j; i < m; ++i) s += v[i] * b[i];
    s = 2.0 * s / vv;
    for (std::size_t i = j; i < m; ++i) b[i] -= s * v[i];
  }
  std::vector<double> c(n, 0.0);
  for (std::size_t jj = n; jj-- > 0;) {
    double s = b[jj];
    for (std::size_t q = jj + 1; q < n; ++q) s -= A[jj][q] * c[q];
    if (A[jj][jj] == 0.0) throw PreconditionViolated("singular triangular factor");
    c[jj] = s / A[jj][jj];
  }
  return c;
}

} // namespace detail

/// Correction terms after the constant, in the order they are added to a fit.
inline std::vector<double> correction_basis(int k, double alpha) {
  const double ak = std::pow(alpha, k);
  const double kk = static_cast<double>(k);
  return {kk * ak, ak, kk * kk * ak * ak, kk * ak * ak, ak * ak};
}

/// The single correction rate of the two-term model: k alpha^k, or 1/k for Case 4.
inline double leading_correction(ScalingCase c, int k, double alpha) {
  if (c == ScalingCase::Case4_mu4) return 1.0 / k;
  return k * std::pow(alpha, k);
}

struct ScalingFit {
  std::vector<std::pair<int, double>> sequence;
  double extrapolated_limit = 0.0;  // intercept of the series fit
  double fit_residual = 0.0;        // RMS residual of the series fit
  int terms = 0;                    // basis functions used, including the constant
  double leading_limit = 0.0;       // intercept of the two-term fit
  double leading_residual = 0.0;
  bool sufficient = false;          // at least min_points values were available
};

inline constexpr int kMinFitPoints = 6;

inline ScalingFit fit_scaled_sequence(std::vector<std::pair<int, double>> seq, ScalingCase c, double alpha) {
  std::sort(seq.begin(), seq.end());
  ScalingFit fit;
  fit.sequence = seq;
  const int n = static_cast<int>(seq.size());
  fit.sufficient = n >= kMinFitPoints;
  if (n < 2) return fit;

  auto run = [&](int terms, bool leading_only) {
    std::vector<std::vector<double>> A;
    std::vector<double> b;
    for (const auto& [k, val] : seq) {
      std::vector<double> row{1.0};
      if (leading_only) {
        row.push_back(leading_correction(c, k, alpha));
      } else {
        const auto basis = correction_basis(k, alpha);
        row.insert(row.end(), basis.begin(), basis.begin() + (terms - 1));
      }
      A.push_back(std::move(row));
      b.push_back(val);
    }
    const auto coef = detail::least_squares(A, b);
    double ss = 0.0;
    for (std::size_t i = 0; i < A.size(); ++i) {
      double pred = 0.0;
      for (std::size_t j = 0; j < coef.size(); ++j) pred += A[i][j] * coef[j];
      ss += (pred - b[i]) * (pred - b[i]);
    }
    return std::pair{coef.front(), std::sqrt(ss / static_cast<double>(A.size()))};
  };

  std::tie(fit.leading_limit, fit.leading_residual) = run(2, true);
  fit.terms = std::clamp(n - 2, 2, 6);
  std::tie(fit.extrapolated_limit, fit.fit_residual) = run(fit.terms, false);
  return fit;
}

/// Per-k outcome of a sweep; status holds the failure reason when a kind is missing.
struct SweepRecord {
  int k = 0;
  std::optional<BifurcationPoint> sn;
  std::optional<BifurcationPoint> pd;
  std::string status = "ok";
};

struct SweepResult {
  DirectionRay ray;
  std::vector<SweepRecord> records;
  ScalingFit sn_fit;
  ScalingFit pd_fit;
};

/// Runs locate_bifurcations for every k in [k_min, k_max] on up to `jobs` threads
/// and fits the single-round values of each kind.
inline SweepResult scaled_sequence(int k_min, int k_max, const DirectionRay& ray, const ModelParams& params,
                                   const ScanOptions& opt = {}, int jobs = 1) {
  params.validate();
  if (k_min < 1 || k_max < k_min || k_max > opt.orbit.k_cap)
    throw PreconditionViolated("k range must satisfy 1 <= k_min <= k_max <= k_cap");
  SweepResult out;
  out.ray = ray;
  out.records.resize(static_cast<std::size_t>(k_max - k_min + 1));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < static_cast<int>(out.records.size()); i = next++) {
      SweepRecord& rec = out.records[static_cast<std::size_t>(i)];
      rec.k = k_min + i;
      try {
        auto [s, p] = locate_bifurcations(rec.k, ray, params, opt);
        rec.sn = s;
        rec.pd = p;
      } catch (const Error& e) {
        rec.status = e.what();
      }
    }
  };
  const int threads = std::clamp(jobs, 1, static_cast<int>(out.records.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<std::pair<int, double>> sn_seq, pd_seq;
  for (const auto& r : out.records) {
    if (r.sn && r.sn->single_round) sn_seq.emplace_back(r.k, r.sn->scaled_value);
    if (r.pd && r.pd->single_round) pd_seq.emplace_back(r.k, r.pd->scaled_value);
  }
  out.sn_fit = fit_scaled_sequence(sn_seq, ray.scaling, params.alpha);
  out.pd_fit = fit_scaled_sequence(pd_seq, ray.scaling, params.alpha);
  return out;
}

} // namespace tangency
