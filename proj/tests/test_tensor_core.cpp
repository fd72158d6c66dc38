#include <cmath>
#include <random>

#include "cce/curvature.hpp"
#include "cce/error.hpp"
#include "cce/models.hpp"
#include "doctest.h"

using namespace cce;

namespace {

MetricField euclidean(int dim) {
  return MetricField(dim, [dim](const Vec<HyperDual>&) {
    Mat<HyperDual> g = zero_matrix<HyperDual>();
    for (int i = 0; i < dim; ++i) g[i][i] = 1.0;
    return g;
  });
}

double max_abs(const Matrix& m, int dim) {
  double w = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) w = std::max(w, std::abs(m[i][j]));
  return w;
}

}  // namespace

TEST_CASE("christoffel symbols vanish for flat and centred hyperbolic metrics") {
  const Rank3 flat = christoffel(euclidean(4), make_point({0.3, -1.0, 2.0, 0.5}));
  const Rank3 ball = christoffel(models::hyperbolic_ball(), Point{});
  for (int k = 0; k < 4; ++k) {
    CHECK(max_abs(flat[k], 4) == 0.0);
    CHECK(max_abs(ball[k], 4) < 1e-15);
  }
}

TEST_CASE("christoffel symbols of the round 3-sphere match a symbolic oracle") {
  // Γ^k_ij of diag(1, sin²χ, sin²χ sin²θ) at (χ, θ, φ) = (0.7, 1.1, 0.3),
  // differentiated symbolically (sympy) and frozen to 20 digits.
  const Rank3 G = christoffel(models::round_s3(), make_point({0.7, 1.1, 0.3}));
  CHECK(G[0][1][1] == doctest::Approx(-0.49272486499423009033).epsilon(1e-14));
  CHECK(G[0][2][2] == doctest::Approx(-0.39134699927141193840).epsilon(1e-14));
  CHECK(G[1][0][1] == doctest::Approx(1.1872418321266793537).epsilon(1e-14));
  CHECK(G[1][1][0] == doctest::Approx(1.1872418321266793537).epsilon(1e-14));
  CHECK(G[1][2][2] == doctest::Approx(-0.40424820190979509215).epsilon(1e-14));
  CHECK(G[2][0][2] == doctest::Approx(1.1872418321266793537).epsilon(1e-14));
  CHECK(G[2][1][2] == doctest::Approx(0.50896810523906440719).epsilon(1e-14));
  CHECK(G[0][0][0] == 0.0);
  CHECK(G[2][2][1] == doctest::Approx(0.50896810523906440719).epsilon(1e-14));
}

TEST_CASE("metric compatibility of the connection") {
  // ∂_k g_ij = Γ^l_ki g_lj + Γ^l_kj g_il
  const MetricField m = models::product_s2xs2();
  const Point p = make_point({0.9, 0.4, 2.1, 1.3});
  const MetricJet jet = m.jet(p);
  const Rank3 G = christoffel(jet, invert(jet.g, 4));
  double worst = 0.0;
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        double s = 0.0;
        for (int l = 0; l < 4; ++l)
          s += G[l][k][i] * jet.g[l][j] + G[l][k][j] * jet.g[i][l];
        worst = std::max(worst, std::abs(jet.dg[k][i][j] - s));
      }
  CHECK(worst < 1e-14);
}

TEST_CASE("unit round 4-sphere curvature goldens") {
  const CurvaturePacket c =
      curvature(models::round_s4(), make_point({0.8, 1.2, 2.0, 0.4}));
  CHECK(c.scalar == doctest::Approx(12.0).epsilon(1e-12));
  CHECK(norm(c.traceless_ricci, c.inverse, 4) < 1e-12);
  CHECK(c.weyl_norm2 < 1e-20);
  CHECK(c.sigma2 == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(c.sigma2_from_eigenvalues == doctest::Approx(6.0).epsilon(1e-12));
  // Positive sectional curvature in this sign convention: R_{0101} = g_00 g_11.
  CHECK(c.riemann[0][1][0][1] ==
        doctest::Approx(c.metric[0][0] * c.metric[1][1]).epsilon(1e-12));
}

TEST_CASE("hyperbolic 4-space is Einstein with Ric = -3g and conformally flat") {
  const MetricField h = models::hyperbolic_ball();
  for (const Point& p : {make_point({0.1, -0.2, 0.3, 0.05}),
                         make_point({0.5, 0.5, -0.3, 0.2}), Point{}}) {
    const CurvaturePacket c = curvature(h, p);
    CHECK(c.scalar == doctest::Approx(-12.0).epsilon(1e-10));
    CHECK(c.weyl_norm2 < 1e-16);
    CHECK(einstein_residual(h, p, 3) < 1e-8);
  }
}

TEST_CASE("S2 x S2 packet satisfies every structural invariant") {
  const MetricField m = models::product_s2xs2();
  const Point p = make_point({0.9, 0.4, 2.1, 1.3});
  const CurvaturePacket c = curvature(m, p);
  CHECK(c.scalar == doctest::Approx(4.0).epsilon(1e-12));
  // Einstein with Ric = g: E = 0, σ₂ = R²/24.
  CHECK(c.sigma2 == doctest::Approx(16.0 / 24.0).epsilon(1e-12));
  CHECK(bianchi_defect(c.riemann, 4) < 1e-12);
  CHECK(weyl_trace_defect(c) < 1e-12);
  CHECK(c.weyl_norm2 > 1.0);
  CHECK(hodge_split_defect(c) < 1e-8);
  CHECK(sigma2_defect(c) < 1e-10 * std::abs(c.sigma2));
  // |W|² on S²×S² of unit factors: pointwise 16/3.
  CHECK(c.weyl_norm2 == doctest::Approx(16.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("orientation reversal swaps the self-dual and anti-self-dual parts") {
  const MetricField m = models::warped_torus(0.3);
  const Point p = make_point({0.7, 2.2, 1.0, 0.1});
  const CurvaturePacket a = curvature(m, p, +1);
  const CurvaturePacket b = curvature(m, p, -1);
  CHECK(a.weyl_plus_norm2 == doctest::Approx(b.weyl_minus_norm2).epsilon(1e-12));
  CHECK(a.weyl_minus_norm2 == doctest::Approx(b.weyl_plus_norm2).epsilon(1e-12));
  CHECK(std::abs(a.weyl_plus_norm2 - a.weyl_minus_norm2) > 1e-6);
  // W± are themselves curvature-type tensors summing to W.
  double worst = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l)
          worst = std::max(worst, std::abs((*a.weyl_plus)[i][j][k][l] +
                                           (*a.weyl_minus)[i][j][k][l] -
                                           a.weyl[i][j][k][l]));
  CHECK(worst < 1e-12);
  CHECK(norm2(*a.weyl_plus, a.inverse, 4) ==
        doctest::Approx(a.weyl_plus_norm2).epsilon(1e-10));
}

TEST_CASE("Weyl tensor is conformally covariant") {
  const MetricField base = models::warped_torus(0.3);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> amp(-0.3, 0.3);
  for (int trial = 0; trial < 5; ++trial) {
    const double a = amp(rng), b = amp(rng), c = amp(rng);
    const ScalarClosure w = [a, b, c](const Vec<HyperDual>& x) {
      return a * sin(x[0]) + b * cos(x[1] + x[2]) + c * sin(x[3] - x[0]);
    };
    const MetricField scaled = conformal_rescale(base, w);
    const Point p = make_point({0.4 + trial, 1.0, 2.0 - trial * 0.3, 0.6});
    Vec<HyperDual> xp{};
    for (int i = 0; i < 4; ++i) xp[i] = p[i];
    const double wv = w(xp).v;
    const CurvaturePacket c0 = curvature(base, p);
    const CurvaturePacket c1 = curvature(scaled, p);
    CHECK(c1.weyl_norm2 ==
          doctest::Approx(std::exp(-4.0 * wv) * c0.weyl_norm2).epsilon(1e-10));
    CHECK(c1.weyl_plus_norm2 ==
          doctest::Approx(std::exp(-4.0 * wv) * c0.weyl_plus_norm2).epsilon(1e-9));
  }
}

TEST_CASE("analytic and central-difference schemes agree to O(h^2)") {
  const double h = 1e-3;
  const MetricField m = models::warped_torus(0.3);
  const MetricField fd = m.with_central_differences({h, 2, 1e-4});
  const Point p = make_point({0.7, 2.2, 1.0, 0.1});
  const CurvaturePacket a = curvature(m, p);
  const CurvaturePacket b = curvature(fd, p);
  const double tol = 10.0 * h * h;
  CHECK(std::abs(a.scalar - b.scalar) < tol);
  CHECK(std::abs(a.sigma2 - b.sigma2) < tol);
  CHECK(std::abs(a.weyl_norm2 - b.weyl_norm2) < tol);
  CHECK(std::abs(a.weyl_plus_norm2 - b.weyl_plus_norm2) < tol);
  double worst = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l)
          worst = std::max(worst, std::abs(a.riemann[i][j][k][l] -
                                           b.riemann[i][j][k][l]));
  CHECK(worst < tol);

  // The default step also reproduces the sphere goldens.
  const CurvaturePacket s = curvature(
      models::round_s4().with_central_differences(), make_point({0.8, 1.2, 2.0, 0.4}));
  CHECK(s.scalar == doctest::Approx(12.0).epsilon(1e-6));
}

TEST_CASE("error paths") {
  SUBCASE("outside the chart") {
    CHECK_THROWS_AS(curvature(models::hyperbolic_ball(), make_point({1.2, 0, 0, 0})),
                    Error);
  }
  SUBCASE("singular matrix") {
    const MetricField degenerate(2, [](const Vec<HyperDual>&) {
      Mat<HyperDual> g = zero_matrix<HyperDual>();
      g[0][0] = 1.0;
      return g;
    });
    try {
      (void)christoffel(degenerate, Point{});
      FAIL("expected SingularMetric");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::SingularMetric);
    }
  }
  SUBCASE("indefinite matrix") {
    const MetricField lorentz(2, [](const Vec<HyperDual>&) {
      Mat<HyperDual> g = zero_matrix<HyperDual>();
      g[0][0] = -1.0;
      g[1][1] = 1.0;
      return g;
    });
    try {
      (void)lorentz.metric(Point{});
      FAIL("expected NonPositiveMetric");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NonPositiveMetric);
    }
  }
  SUBCASE("Einstein normalization dimension") {
    CHECK_THROWS_AS(einstein_residual(models::round_s3(), make_point({1, 1, 1}), 3),
                    Error);
  }
}

TEST_CASE("Laplacian reproduces the hyperbolic eigenfunction t") {
  const MetricField h = models::hyperbolic_ball();
  const ScalarClosure t = models::hyperbolic_t();
  for (const Point& p : {make_point({0.1, 0.2, -0.3, 0.4}), make_point({0.6, 0, 0, 0.1})}) {
    Vec<HyperDual> x{};
    for (int i = 0; i < 4; ++i) x[i] = p[i];
    CHECK(laplacian(h, t, p) == doctest::Approx(4.0 * t(x).v).epsilon(1e-10));
  }
}
