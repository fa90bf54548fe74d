#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tangency/map_core.hpp"

using namespace tangency;

namespace {

void expect_point(Point got, Point want, double tol = 1e-15) {
  EXPECT_NEAR(got.x, want.x, tol);
  EXPECT_NEAR(got.y, want.y, tol);
}

void expect_mat(const Mat2& got, const Mat2& want, double tol) {
  EXPECT_NEAR(got.a, want.a, tol);
  EXPECT_NEAR(got.b, want.b, tol);
  EXPECT_NEAR(got.c, want.c, tol);
  EXPECT_NEAR(got.d, want.d, tol);
}

} // namespace

TEST(ModelParams, DefaultsAndSeams) {
  const ModelParams p;
  EXPECT_EQ(p.alpha, 0.8);
  EXPECT_EQ(p.a10, 0.2);
  EXPECT_EQ(p.c20, -0.5);
  EXPECT_EQ(p.d50, 1.0);
  EXPECT_NEAR(p.h0(), 2.6 / 3.0, 1e-15);
  EXPECT_NEAR(p.h1(), 2.8 / 3.0, 1e-15);
  EXPECT_LT(p.h0(), p.h1());
}

TEST(ModelParams, ValidationRejectsBadConstants) {
  ModelParams p;
  p.alpha = 1.0;
  EXPECT_THROW(p.validate(), InvalidParams);
  p.alpha = 0.0;
  EXPECT_THROW(p.validate(), InvalidParams);
  p = ModelParams{};
  p.d50 = 0.0;
  EXPECT_THROW(p.validate(), InvalidParams);
  p = ModelParams{};
  p.mu[2] = NAN;
  EXPECT_THROW(p.validate(), InvalidParams);
  EXPECT_NO_THROW(ModelParams{}.validate());
}

TEST(BlendWeight, EndpointsAndSymmetry) {
  EXPECT_EQ(blend_weight(0.0), 0.0);
  EXPECT_EQ(blend_weight(1.0), 1.0);
  EXPECT_EQ(blend_weight(0.5), 0.5);
  EXPECT_EQ(blend_weight_slope(0.0), 0.0);
  EXPECT_EQ(blend_weight_slope(1.0), 0.0);
  for (double z = 0.0; z <= 1.0; z += 0.05) EXPECT_NEAR(blend_weight(z) + blend_weight(1 - z), 1.0, 1e-15);
}

TEST(U0, Examples) {
  const ModelParams p;
  expect_point(u0_apply({0, 0}, p), {0, 0});
  expect_point(u0_apply({0, 1}, p), {0, 1.25});
  expect_point(u0_apply({1, 0}, p), {0.8, 0});
}

TEST(U1, Examples) {
  const ModelParams p;
  expect_point(u1_apply({0, 1}, p), {1, 0});
  expect_point(u1_apply({1, 1}, p), {1, 1});
  expect_point(u1_apply({0, 1.1}, p), {0.95, 0.01}, 1e-15);
}

TEST(F, Examples) {
  const ModelParams p;
  expect_point(f_apply({0, 0.5}, p), {0, 0.625});
  expect_point(f_apply({1, 1}, p), {1, 1});
  for (double x : {-1.0, 0.0, 0.3, 2.0}) {
    expect_point(f_apply({x, p.h0()}, p), u0_apply({x, p.h0()}, p), 0.0);
    expect_point(f_apply({x, p.h1()}, p), u1_apply({x, p.h1()}, p), 0.0);
  }
}

TEST(FJacobian, Examples) {
  const ModelParams p;
  expect_mat(f_jacobian({0, 0}, p), Mat2::diag(0.8, 1.25), 1e-15);
  expect_mat(f_jacobian({1, 1}, p), {0, -0.5, 1, 0}, 1e-15);
}

TEST(FJacobian, MatchesFiniteDifferencesAtRandomPoints) {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const ModelParams base;
  for (int i = 0; i < 200; ++i) {
    const Point pt{u(rng), u(rng)};
    ModelParams q = base;
    if (i % 2) q.mu = {0.01 * u(rng), 0.01 * u(rng), 0.01 * u(rng), 0.01 * u(rng)};
    const Mat2 fd = oracle::fd_jacobian([&](Point z) { return f_apply(z, q); }, pt);
    expect_mat(f_jacobian(pt, q), fd, 1e-6);
  }
}

TEST(FJacobian, MatchesFiniteDifferencesInsideTheStrip) {
  const ModelParams p;
  for (int i = 1; i < 50; ++i) {
    const double y = p.h0() + (p.h1() - p.h0()) * i / 50.0;
    for (double x : {-0.5, 0.1, 0.7, 1.3}) {
      const Mat2 fd = oracle::fd_jacobian([&](Point z) { return f_apply(z, p); }, {x, y}, 1e-7);
      expect_mat(f_jacobian({x, y}, p), fd, 1e-6);
    }
  }
}

TEST(FParamJacobian, MatchesFiniteDifferences) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int i = 0; i < 100; ++i) {
    const Point pt{u(rng), u(rng)};
    ModelParams q;
    q.mu = {0.01, -0.02, 0.03, 0.01};
    const ParamJacobian j = f_param_jacobian(pt, q);
    for (std::size_t c = 0; c < 4; ++c) {
      const double h = 1e-6;
      ModelParams qp = q, qm = q;
      qp.mu[c] += h;
      qm.mu[c] -= h;
      const Point d = (1.0 / (2 * h)) * (f_apply(pt, qp) - f_apply(pt, qm));
      EXPECT_NEAR(j.dx[c], d.x, 1e-7);
      EXPECT_NEAR(j.dy[c], d.y, 1e-7);
    }
  }
}

TEST(Property, SeamContinuityOfMapAndJacobian) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const ModelParams p;
  for (int i = 0; i < 100; ++i) {
    const double x = u(rng);
    for (double seam : {p.h0(), p.h1()}) {
      const double lo = std::nextafter(seam, 0.0), hi = std::nextafter(seam, 2.0);
      const Point below = f_apply({x, lo}, p), above = f_apply({x, hi}, p);
      const Mat2 jb = f_jacobian({x, lo}, p), ja = f_jacobian({x, hi}, p);
      auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(a)); };
      EXPECT_LE(rel(below.x, above.x), 1e-9);
      EXPECT_LE(rel(below.y, above.y), 1e-9);
      EXPECT_LE(rel(jb.a, ja.a), 1e-9);
      EXPECT_LE(rel(jb.b, ja.b), 1e-9);
      EXPECT_LE(rel(jb.c, ja.c), 1e-9);
      EXPECT_LE(rel(jb.d, ja.d), 1e-9);
    }
  }
}

TEST(Property, ResonanceCancellationDeterminantIdentity) {
  const ModelParams p;
  for (int i = -10; i <= 10; ++i)
    for (int j = -10; j <= 10; ++j) {
      const double x = i / 10.0, y = j / 10.0;
      EXPECT_NEAR(u0_jacobian({x, y}, p).det(), oracle::det_du0_polynomial(x, y, oracle::Rational(1, 5)), 1e-12);
      const double xy = x * y;
      EXPECT_NEAR(u0_jacobian({x, y}, p).det(), 1.0 - 3.0 * 0.04 * xy * xy, 1e-12);
    }
}

TEST(Property, SaddleEigenvalues) {
  for (double mu2 : {0.0, 0.01, -0.02}) {
    ModelParams p;
    p.mu[1] = mu2;
    const auto ev = f_jacobian({0, 0}, p).eigenvalues();
    const double lo = std::min(ev[0].real(), ev[1].real()), hi = std::max(ev[0].real(), ev[1].real());
    EXPECT_NEAR(lo, 0.8 + mu2, 1e-15);
    EXPECT_NEAR(hi, 1.25, 1e-15);
    EXPECT_LT(std::abs(lo), 1.0);
    EXPECT_GT(std::abs(hi), 1.0);
  }
}

TEST(NormalForm, DefaultsAndPerturbations) {
  const ModelParams p;
  const NormalFormCoeffs nf = extract_normal_form(p);
  EXPECT_EQ(nf.c2, -0.5);
  EXPECT_EQ(nf.d5, 1.0);
  EXPECT_EQ(nf.d1, 1.0);
  EXPECT_EQ(nf.a1, 0.2);
  EXPECT_EQ(nf.b1, -0.2);
  EXPECT_EQ(nf.lambda, 0.8);
  EXPECT_EQ(nf.sigma, 1.25);
  EXPECT_EQ(nf.a1 + nf.b1, 0.0);
  EXPECT_NEAR(extract_normal_form(p.with_mu({0, 0, 0.1, 0})).d1, 1.1, 1e-15);
  const NormalFormCoeffs n2 = extract_normal_form(p.with_mu({0, 0.05, 0, 0}));
  EXPECT_NEAR(n2.lambda * n2.sigma, 1.0625, 1e-15);
}

TEST(NormalForm, AgreesWithFittedTaylorData) {
  const ModelParams p = ModelParams{}.with_mu({0.003, 0.002, 0.01, 0.004});
  const NormalFormCoeffs nf = extract_normal_form(p);
  // U1 around (0,1): x' = c0 + c1 x + c2 (y-1) + ..., y' = d0 + d1 x + d2 (y-1) + d5 (y-1)^2 + ...
  const double h = 1e-4;
  auto U = [&](double x, double y) { return u1_apply({x, y}, p); };
  EXPECT_NEAR(U(0, 1).x, nf.c0, 1e-12);
  EXPECT_NEAR(U(0, 1).y, nf.d0, 1e-12);
  EXPECT_NEAR((U(h, 1).y - U(-h, 1).y) / (2 * h), nf.d1, 1e-9);
  EXPECT_NEAR((U(h, 1).x - U(-h, 1).x) / (2 * h), nf.c1, 1e-9);
  EXPECT_NEAR((U(0, 1 + h).x - U(0, 1 - h).x) / (2 * h), nf.c2, 1e-9);
  EXPECT_NEAR((U(0, 1 + h).y - U(0, 1 - h).y) / (2 * h), nf.d2, 1e-9);
  EXPECT_NEAR((U(0, 1 + h).y - 2 * U(0, 1).y + U(0, 1 - h).y) / (2 * h * h), nf.d5, 1e-6);
  // U0 near the origin: x' = lambda x (1 + a1 xy), y' = sigma y (1 + b1 xy).
  const Point q = u0_apply({0.1, 0.1}, p);
  EXPECT_NEAR(q.x / (nf.lambda * 0.1) - 1.0, nf.a1 * 0.01, 1e-12);
  EXPECT_NEAR(q.y / (nf.sigma * 0.1) - 1.0, nf.b1 * 0.01, 1e-12);
}

TEST(NormalVectors, ClosedFormMatchesFiniteDifferences) {
  const ModelParams p;
  const ParamVec closed = n_eig(p), numeric = n_eig_numeric(p);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(closed[i], numeric[i], 1e-8);
  EXPECT_NEAR(closed[1], 1.25, 1e-15);
  const ParamVec nt = n_tang(p);
  EXPECT_EQ(nt[0], 1.0);
  EXPECT_EQ(nt[1] + nt[2] + nt[3], 0.0);
}

TEST(Mat2, SolveAndEigenvalues) {
  const Mat2 m{2, 1, 1, 3};
  Point z;
  ASSERT_TRUE(m.solve({3, 5}, z));
  EXPECT_NEAR(z.x, 0.8, 1e-15);
  EXPECT_NEAR(z.y, 1.4, 1e-15);
  EXPECT_FALSE((Mat2{1, 2, 2, 4}).solve({1, 1}, z));
  const auto ev = Mat2{0, -0.5, 1, 0}.eigenvalues();
  EXPECT_NEAR(std::abs(ev[0]), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(std::abs(ev[1]), std::sqrt(0.5), 1e-15);
}
