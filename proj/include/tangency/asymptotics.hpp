#pragma once
/**
 * @file asymptotics.hpp
 * @brief Closed-form side of the unfolding: discriminants, the admissible
 * k-set, hypothesis checks, the psi_k quadratic, leading-order bifurcation
 * predictors for the four scaling regimes, and the k-fold expansion of the
 * local saddle map.
 */

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tangency/errors.hpp"
#include "tangency/map_core.hpp"

namespace tangency {

/// Scaling regime selected by the direction of the parameter ray.
enum class ScalingCase {
  Case1_mu1,          // v = e1: transverse to the tangency surface, rate alpha^{2k}
  Case2_mu2,          // v1 = 0, n_eig . v != 0: rate alpha^k / k
  Case3_mu3,          // v = e3: breaks global resonance d1 = 1, rate alpha^k
  Case4_mu4,          // v = e4: breaks a1 + b1 = 0, rate 1/k
  GeneralTangent,     // v1 = 0, n_eig . v = 0, not a coordinate ray
  GeneralTransverse,  // v1 != 0, not a coordinate ray (Case 1 law)
};

inline std::string_view to_string(ScalingCase c) {
  switch (c) {
    case ScalingCase::Case1_mu1: return "case1";
    case ScalingCase::Case2_mu2: return "case2";
    case ScalingCase::Case3_mu3: return "case3";
    case ScalingCase::Case4_mu4: return "case4";
    case ScalingCase::GeneralTangent: return "general_tangent";
    case ScalingCase::GeneralTransverse: return "general_transverse";
  }
  return "unknown";
}

/// Human-readable form of the k-dependent rate of each case.
inline std::string_view rate_label(ScalingCase c) {
  switch (c) {
    case ScalingCase::Case1_mu1:
    case ScalingCase::GeneralTransverse: return "alpha^2k";
    case ScalingCase::Case2_mu2: return "alpha^k/k";
    case ScalingCase::Case3_mu3:
    case ScalingCase::GeneralTangent: return "alpha^k";
    case ScalingCase::Case4_mu4: return "1/k";
  }
  return "unknown";
}

/// Value of the case rate at k: the divisor that turns epsilon into a scaled value.
inline double case_rate(ScalingCase c, int k, double alpha) {
  const double ak = std::pow(alpha, k);
  switch (c) {
    case ScalingCase::Case1_mu1:
    case ScalingCase::GeneralTransverse: return ak * ak;
    case ScalingCase::Case2_mu2: return ak / k;
    case ScalingCase::Case3_mu3:
    case ScalingCase::GeneralTangent: return ak;
    case ScalingCase::Case4_mu4: return 1.0 / k;
  }
  return ak;
}

// ---------------------------------------------------------------------------
// Discriminants

struct DiscriminantInputs {
  double c1 = 0.0, c2 = 0.0, d1 = 1.0, d3 = 0.0, d4 = 0.0, d5 = 1.0;
  int chi = 1;
};

/// (1 - c2 - chi d4)^2 - 4 d5 (d3 + chi c1); the mu = 0 discriminant.
inline double discriminant(const DiscriminantInputs& in) {
  const double lead = 1.0 - in.c2 - in.chi * in.d4;
  return lead * lead - 4.0 * in.d5 * (in.d3 + in.chi * in.c1);
}

/// (1 - c2 - d1 d4)^2 - 4 d5 (d3 + c1 d1), with the actual d1 rather than its sign.
inline double discriminant_general(const NormalFormCoeffs& nf) {
  const double lead = 1.0 - nf.c2 - nf.d1 * nf.d4;
  return lead * lead - 4.0 * nf.d5 * (nf.d3 + nf.c1 * nf.d1);
}

inline DiscriminantInputs discriminant_inputs(const NormalFormCoeffs& nf) {
  return {nf.c1, nf.c2, nf.d1, nf.d3, nf.d4, nf.d5, nf.chi};
}

// ---------------------------------------------------------------------------
// Admissible periods

/// {k >= kmin : (lambda sigma)^k = d1}, with both sides reduced to signs.
struct KSet {
  int kmin = 0;
  int chi_eig = 1;
  int d1_sign = 1;

  bool contains(int k) const {
    if (k < kmin) return false;
    const int power_sign = (chi_eig == 1 || k % 2 == 0) ? 1 : -1;
    return power_sign == d1_sign;
  }

  bool empty() const { return chi_eig == 1 && d1_sign == -1; }

  std::vector<int> members_up_to(int kmax) const {
    std::vector<int> out;
    for (int k = kmin; k <= kmax; ++k)
      if (contains(k)) out.push_back(k);
    return out;
  }
};

inline KSet k_set(int kmin, int chi_eig, int d1_sign) {
  if ((chi_eig != 1 && chi_eig != -1) || (d1_sign != 1 && d1_sign != -1))
    throw PreconditionViolated("chi_eig and d1_sign must be +1 or -1");
  return {kmin, chi_eig, d1_sign};
}

// ---------------------------------------------------------------------------
// Hypothesis checks

struct ConditionCheck {
  std::string name;
  bool passed = false;
  double value = 0.0;     // the quantity tested
  double residual = 0.0;  // distance from the required value (0 for inequalities that hold)
};

struct ConditionReport {
  std::vector<ConditionCheck> checks;
  double delta = 0.0;

  bool all_passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }

  const ConditionCheck* find(std::string_view name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

/// Necessary and sufficient conditions for infinitely many stable single-round orbits.
inline ConditionReport check_conditions(const NormalFormCoeffs& nf, double tol = 1e-12) {
  ConditionReport rep;
  auto equality = [&](std::string name, double value, double target) {
    const double r = std::abs(value - target);
    rep.checks.push_back({std::move(name), r <= tol, value, r});
  };
  equality("tangency_d2_zero", nf.d2, 0.0);
  equality("eigen_product_unit", std::abs(nf.lambda * nf.sigma), 1.0);
  equality("global_resonance_d1_unit", std::abs(nf.d1), 1.0);
  equality("resonance_terms_cancel", nf.a1 + nf.b1, 0.0);

  rep.checks.push_back({"quadratic_tangency_d5", nf.d5 != 0.0, nf.d5, nf.d5 != 0.0 ? 0.0 : 1.0});

  rep.delta = discriminant_general(nf);
  rep.checks.push_back({"discriminant_positive", rep.delta > 0.0, rep.delta,
                        rep.delta > 0.0 ? 0.0 : -rep.delta});

  const double upper = rep.delta > 0.0 ? 1.0 - std::sqrt(rep.delta) / 2.0 : 1.0;
  const bool inside = rep.delta > 0.0 && nf.c2 > -1.0 && nf.c2 < upper;
  const double miss = inside ? 0.0 : std::max(-1.0 - nf.c2, nf.c2 - upper);
  rep.checks.push_back({"c2_window", inside, nf.c2, std::max(miss, 0.0)});
  return rep;
}

// ---------------------------------------------------------------------------
// Unfolding data and the psi_k quadratic

/// Linear mu-coefficients of c0, d1, d2, lambda, sigma (p, q, r, s, t).
struct Sensitivities {
  ParamVec p{}, q{}, r{}, s{}, t{};
};

/// Everything the leading-order theory needs, evaluated at mu = 0.
struct UnfoldingData {
  NormalFormCoeffs origin;
  Sensitivities sens;
  ParamVec n_eig{};
  double alpha = 0.8;
};

inline UnfoldingData unfolding_data(const ModelParams& params) {
  UnfoldingData u;
  u.origin = extract_normal_form(params.with_mu({0.0, 0.0, 0.0, 0.0}));
  u.sens.q = {0.0, 0.0, 1.0, 0.0};  // d1 = 1 + mu3
  u.sens.s = {0.0, 1.0, 0.0, 0.0};  // lambda = alpha + mu2
  u.n_eig = n_eig(params);
  u.alpha = params.alpha;
  return u;
}

/// mu1 scaled by alpha^{2k}, the other components by alpha^k.
inline ParamVec scale_mu(const ParamVec& mu, int k, double alpha) {
  const double ak = std::pow(alpha, k);
  return {mu[0] / (ak * ak), mu[1] / ak, mu[2] / ak, mu[3] / ak};
}

struct PQTerms {
  double P = 0.0;
  double Q = 0.0;
};

inline PQTerms pq_terms(const UnfoldingData& u, const ParamVec& mu_tilde, int k) {
  const auto& o = u.origin;
  const auto& s = u.sens;
  PQTerms out;
  out.P = 1.0 - o.c2 - o.chi * o.d4;
  out.Q = o.chi * mu_tilde[0] + o.c1 + o.chi * o.d3;
  for (std::size_t i = 1; i < 4; ++i) {
    out.P -= o.chi * s.r[i] * mu_tilde[i];
    out.Q += (s.p[i] + o.chi * s.q[i]) * mu_tilde[i];
    out.Q += (s.s[i] / u.alpha + u.alpha * o.chi_eig * s.t[i]) * mu_tilde[i] * k;
  }
  return out;
}

/// P^2 - 4 chi d5 Q; equals the mu = 0 discriminant when mu_tilde = 0.
inline double psi_discriminant(const UnfoldingData& u, const PQTerms& pq) {
  return pq.P * pq.P - 4.0 * u.origin.chi * u.origin.d5 * pq.Q;
}

/// Root of chi d5 psi^2 - P psi + Q = 0 on the stable branch.
inline double psi_k(const UnfoldingData& u, const ParamVec& mu_tilde, int k) {
  const PQTerms pq = pq_terms(u, mu_tilde, k);
  const double disc = psi_discriminant(u, pq);
  if (disc < 0.0) throw ComplexRoot("psi_k discriminant is negative: " + std::to_string(disc));
  return (pq.P - std::sqrt(disc)) / (2.0 * u.origin.chi * u.origin.d5);
}

/// Leading-order trace and determinant of the return-map Jacobian.
inline double leading_trace(const UnfoldingData& u, const ParamVec& mu_tilde, int k) {
  const double disc = psi_discriminant(u, pq_terms(u, mu_tilde, k));
  if (disc < 0.0) throw ComplexRoot("trace undefined past the fold");
  return 1.0 - u.origin.c2 - std::sqrt(disc);
}
inline double leading_det(const UnfoldingData& u) { return -u.origin.c2; }

/// Asymptotic seed (alpha^k (1 + phi alpha^k), 1 + psi alpha^k) for the single-round orbit.
inline Point fixed_point_ansatz(const ModelParams& params, int k) {
  const UnfoldingData u = unfolding_data(params);
  const ParamVec mt = scale_mu(params.mu, k, params.alpha);
  double psi = 0.0;
  try {
    psi = psi_k(u, mt, k);
  } catch (const ComplexRoot&) {
    psi = pq_terms(u, mt, k).P / (2.0 * u.origin.chi * u.origin.d5);
  }
  const auto& o = u.origin;
  double phi = o.a1 * o.chi * k + o.c1 + o.c2 * psi;
  for (std::size_t i = 1; i < 4; ++i)
    phi += u.sens.s[i] * mt[i] / u.alpha * k + u.sens.p[i] * mt[i];
  const double ak = std::pow(params.alpha, k);
  return {ak * (1.0 + phi * ak), 1.0 + psi * ak};
}

// ---------------------------------------------------------------------------
// Predictors

struct AsymptoticPrediction {
  ScalingCase scaling = ScalingCase::Case1_mu1;
  double sn_limit = 0.0;
  double pd_limit = 0.0;
  std::string rate;
  double rate_at_k = 0.0;

  double sn_epsilon() const { return sn_limit * rate_at_k; }
  double pd_epsilon() const { return pd_limit * rate_at_k; }
};

inline AsymptoticPrediction predict(ScalingCase c, int k, const UnfoldingData& u, const ParamVec& v) {
  const auto& o = u.origin;
  const double delta0 = discriminant(discriminant_inputs(o));
  const double one_minus_c2 = 1.0 - o.c2;
  AsymptoticPrediction out;
  out.scaling = c;
  out.rate = std::string(rate_label(c));
  out.rate_at_k = case_rate(c, k, u.alpha);

  auto need = [](double denom, const char* what) {
    if (denom == 0.0 || !std::isfinite(denom))
      throw DegenerateDirection(std::string("predictor denominator vanishes: ") + what);
  };

  switch (c) {
    case ScalingCase::Case1_mu1:
    case ScalingCase::GeneralTransverse: {
      const double denom = 4.0 * o.d5 * v[0];
      need(denom, "d5 * v1");
      out.sn_limit = delta0 / denom;
      out.pd_limit = (delta0 - 4.0 * one_minus_c2 * one_minus_c2) / denom;
      break;
    }
    case ScalingCase::Case2_mu2: {
      const double denom = 4.0 * o.d5 * o.chi * o.chi_eig * dot(u.n_eig, v);
      need(denom, "d5 * n_eig . v");
      out.sn_limit = delta0 / denom;
      out.pd_limit = (delta0 - 4.0 * one_minus_c2 * one_minus_c2) / denom;
      break;
    }
    case ScalingCase::Case3_mu3:
    case ScalingCase::Case4_mu4: {
      const double component = c == ScalingCase::Case3_mu3 ? v[2] : v[3];
      const double denom = 4.0 * o.d5 * component;
      need(denom, c == ScalingCase::Case3_mu3 ? "d5 * v3" : "d5 * v4");
      out.sn_limit = one_minus_c2 * one_minus_c2 / denom;
      out.pd_limit = -3.0 * one_minus_c2 * one_minus_c2 / denom;
      break;
    }
    case ScalingCase::GeneralTangent:
      throw DegenerateDirection("no leading-order predictor for a general tangent direction");
  }
  return out;
}

// ---------------------------------------------------------------------------
// k-fold expansion of the local map

/// Exact k-fold iterate of the local saddle map U0.
inline Point t0_iterate(Point p, int k, const ModelParams& params) {
  for (int i = 0; i < k; ++i) p = u0_apply(p, params);
  return p;
}

struct ExpansionOptions {
  double smallness = 0.1;  // bound on |x - 1| and |alpha^{-k} y - 1|
  double mu_factor = 10.0; // require |mu|_inf <= mu_factor * alpha^k
};

/// (lambda^k x (1 + k a1 x y), sigma^k y (1 + k b1 x y)).
inline Point t0k_expansion(Point p, int k, const ModelParams& params, const ExpansionOptions& opt = {}) {
  if (k < 1) throw PreconditionViolated("k must be positive");
  const double ak = std::pow(params.alpha, k);
  const double bound = opt.smallness * (1.0 + 1e-12);
  if (std::abs(p.x - 1.0) > bound || std::abs(p.y / ak - 1.0) > bound)
    throw PreconditionViolated("point outside the expansion neighbourhood");
  for (double m : params.mu)
    if (std::abs(m) > opt.mu_factor * ak) throw PreconditionViolated("mu is not O(alpha^k)");
  const NormalFormCoeffs nf = extract_normal_form(params);
  const double xy = p.x * p.y;
  return {std::pow(nf.lambda, k) * p.x * (1.0 + k * nf.a1 * xy),
          std::pow(nf.sigma, k) * p.y * (1.0 + k * nf.b1 * xy)};
}

/// Componentwise |exact - expansion|, x scaled by alpha^k and y by 1.
inline std::pair<double, double> expansion_error(Point p, int k, const ModelParams& params,
                                               const ExpansionOptions& opt = {}) {
  const Point approx = t0k_expansion(p, k, params, opt);
  const Point exact = t0_iterate(p, k, params);
  return {std::abs(exact.x - approx.x) / std::pow(params.alpha, k), std::abs(exact.y - approx.y)};
}

/// Ten (x, eta) pairs spread over the square |x - 1|, |eta - 1| <= 0.1; the
/// sample point is (x, eta alpha^k).
inline std::vector<std::pair<double, double>> expansion_sample() {
  return {{0.9, 0.9}, {0.9, 1.1}, {1.1, 0.9}, {1.1, 1.1}, {1.0, 0.9},
          {1.0, 1.1}, {0.9, 1.0}, {1.1, 1.0}, {1.0, 1.0}, {0.95, 1.05}};
}

/// Largest component of expansion_error over the sample, divided by k^2 alpha^{2k}.
inline double expansion_ratio(int k, const ModelParams& params,
                            const std::vector<std::pair<double, double>>& sample = expansion_sample()) {
  const double ak = std::pow(params.alpha, k);
  double worst = 0.0;
  for (const auto& [x, eta] : sample) {
    const auto [ex, ey] = expansion_error({x, eta * ak}, k, params);
    worst = std::max({worst, ex, ey});
  }
  return worst / (k * k * ak * ak);
}

} // namespace tangency
