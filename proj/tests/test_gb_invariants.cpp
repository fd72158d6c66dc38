#include <cmath>
#include <numbers>
#include <random>

#include "cce/compactify.hpp"
#include "cce/curvature.hpp"
#include "cce/error.hpp"
#include "cce/gb_invariants.hpp"
#include "cce/volume_renorm.hpp"
#include "doctest.h"

using namespace cce;

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

IntegralSuite closed_suite(models::Family f, const QuadratureSpec& q = {}) {
  const models::ModelInstance m = models::instantiate({.family = f});
  return integrate_closed(m.metric, *m.closed, q);
}

struct Compactified {
  models::ModelInstance model;
  EigenfunctionSolution sol;
  CompactificationReport report;
  MetricField metric;
};

Compactified compactify_model(models::ModelSpec spec) {
  Compactified c{models::instantiate(spec), {}, {}, {}};
  c.sol = solve_eigenfunction(*c.model.fg);
  c.report = compactification_checks(c.sol, *c.model.fg);
  c.metric = compactified_metric(c.sol, *c.model.fg);
  return c;
}

}  // namespace

TEST_CASE("round S4 and flat T4 goldens") {
  const IntegralSuite s4 = closed_suite(models::Family::RoundSphereClosed);
  CHECK(std::abs(s4.sigma2_integral - 16 * kPi2) < 1e-6);
  CHECK(std::abs(s4.volume - 8 * kPi2 / 3) < 1e-9);
  CHECK(std::abs(s4.euler_gb - 2.0) < 1e-6);
  CHECK(std::abs(s4.signature) < 1e-8);
  CHECK(s4.weyl_energy < 1e-12);
  const auto [a, b] = combined_formulas(s4, 2, 0);
  CHECK(std::abs(a) < 1e-6);
  CHECK(std::abs(b) < 1e-6);

  const IntegralSuite t4 = closed_suite(models::Family::FlatTorusClosed);
  for (double v : {t4.weyl_energy, t4.weyl_plus, t4.weyl_minus, t4.sigma2_integral, t4.euler_gb,
                   t4.signature})
    CHECK(std::abs(v) < 1e-10);
}

TEST_CASE("S2 x S2: Weyl energy, topology and the positive-Yamabe sigma2 bound") {
  const IntegralSuite s = closed_suite(models::Family::ProductS2xS2Closed);
  // σ₂ = 2/3 on a volume 16π²; |W|² then follows from χ = 4.
  CHECK(s.sigma2_integral == doctest::Approx(32 * kPi2 / 3).epsilon(1e-10));
  CHECK(s.weyl_energy == doctest::Approx(256 * kPi2 / 3).epsilon(1e-10));
  CHECK(std::abs(s.euler_gb - 4.0) < 1e-8);
  CHECK(std::abs(s.signature) < 1e-8);
  CHECK(std::abs(s.weyl_energy - s.weyl_plus - s.weyl_minus) < 1e-8);
  const auto [a, b] = combined_formulas(s, 4, 0);
  CHECK(std::abs(a) < 1e-8);
  CHECK(std::abs(b) < 1e-8);
  const auto [c, d] = combined_formulas(s);
  CHECK(std::abs(c) < 1e-8);
  CHECK(std::abs(d) < 1e-8);

  // Positive-Yamabe closed models: ∫σ₂ ≤ 16π², equality only on S⁴.
  const IntegralSuite s4 = closed_suite(models::Family::RoundSphereClosed);
  CHECK(s.sigma2_integral < 16 * kPi2 - 1.0);
  CHECK(s4.sigma2_integral == doctest::Approx(16 * kPi2).epsilon(1e-10));
}

TEST_CASE("Weyl energy is invariant under random conformal factors") {
  const models::ModelInstance m =
      models::instantiate({.family = models::Family::ProductS2xS2Closed});
  QuadratureSpec q;
  q.panels = 2;
  const IntegralSuite base_suite = integrate_closed(m.metric, *m.closed, q);
  const double base = base_suite.weyl_energy;
  std::mt19937 rng(20260419);
  std::uniform_real_distribution<double> coef(-0.3, 0.3);
  for (int trial = 0; trial < 5; ++trial) {
    // A polynomial in the height functions cos θ₁, cos θ₂ is smooth on
    // S² × S² and keeps both azimuths cyclic.
    double a[3][3];
    for (auto& row : a)
      for (double& x : row) x = coef(rng);
    const ScalarClosure w = [a](const Vec<HyperDual>& x) {
      const HyperDual z1 = cos(x[0]), z2 = cos(x[2]);
      HyperDual out(0.0);
      HyperDual p1(1.0);
      for (int i = 0; i < 3; ++i, p1 = p1 * z1) {
        HyperDual p2(1.0);
        for (int j = 0; j < 3; ++j, p2 = p2 * z2) out = out + a[i][j] * p1 * p2;
      }
      return out;
    };
    const IntegralSuite r = integrate_closed(conformal_rescale(m.metric, w), *m.closed, q);
    CHECK(std::abs(r.weyl_energy - base) / base < 1e-6);
    CHECK(std::abs(r.euler_gb - 4.0) < 1e-6);
    // On a closed 4-manifold ∫σ₂ = 8π²χ - ¼∫|W|² is conformally invariant
    // too; the volume is not.
    CHECK(std::abs(r.sigma2_integral - base_suite.sigma2_integral) < 1e-6);
    CHECK(std::abs(r.volume - base_suite.volume) > 1e-2);
  }
}

TEST_CASE("chiral warped torus: Euler and signature integrals vanish") {
  QuadratureSpec q;
  q.tolerance = 1e-1;  // the coarse trapezoid pass is only a check
  const models::ModelInstance m =
      models::instantiate({.family = models::Family::WarpedTorusClosed});
  const IntegralSuite s = integrate_closed(m.metric, *m.closed, q);
  CHECK(s.weyl_energy > 1.0);
  CHECK(std::abs(s.euler_gb) < 1e-8);
  CHECK(std::abs(s.signature) < 1e-8);
  // Pointwise the two halves differ.
  const CurvaturePacket c = curvature(m.metric, m.sample_point);
  CHECK(std::abs(c.weyl_plus_norm2 - c.weyl_minus_norm2) > 1e-4);

  q.periodic_points = 4;
  q.tolerance = 1e9;
  const IntegralSuite plus = integrate_closed(m.metric, *m.closed, q);
  q.orientation = -1;
  const IntegralSuite minus = integrate_closed(m.metric, *m.closed, q);
  CHECK(plus.weyl_plus == doctest::Approx(minus.weyl_minus).epsilon(1e-12));
  CHECK(plus.weyl_minus == doctest::Approx(minus.weyl_plus).epsilon(1e-12));
  CHECK(plus.signature == doctest::Approx(-minus.signature).epsilon(1e-12));
  CHECK(plus.euler_gb == doctest::Approx(minus.euler_gb).epsilon(1e-12));
}

TEST_CASE("reduction order does not depend on the thread count") {
  QuadratureSpec q;
  q.threads = 1;
  const IntegralSuite a = closed_suite(models::Family::RoundSphereClosed, q);
  q.threads = 7;
  const IntegralSuite b = closed_suite(models::Family::RoundSphereClosed, q);
  CHECK(a.sigma2_integral == b.sigma2_integral);
  CHECK(a.weyl_energy == b.weyl_energy);
}

TEST_CASE("compactified hyperbolic space is a round hemisphere") {
  const Compactified h = compactify_model({});
  REQUIRE(h.report.geodesic_boundary);
  const IntegralSuite x = integrate_collar(h.metric, *h.model.fg, h.report.geodesic_boundary);
  CHECK(x.domain == DomainTag::WithBoundary);
  CHECK(std::abs(x.euler_gb - 1.0) < 1e-8);
  CHECK(std::abs(x.sigma2_integral - 8 * kPi2) < 1e-8);
  CHECK(std::abs(x.signature) < 1e-10);
  CHECK(std::abs(x.volume - 4 * kPi2 / 3) < 1e-9);

  const IntegralSuite y = double_across_boundary(x);
  CHECK(y.domain == DomainTag::ClosedDouble);
  CHECK(std::abs(y.euler_gb - 2.0) < 1e-8);
  CHECK(std::abs(y.sigma2_integral - 16 * kPi2) < 1e-8);
  CHECK(y.signature == 0.0);
  const auto [a, b] = combined_formulas(y, 2, 0);
  CHECK(std::abs(a) < 1e-7);
  CHECK(std::abs(b) < 1e-7);

  const double V = 4 * kPi2 / 3;
  CHECK(std::abs(anderson_identity_residual(1, 0.0, V)) < 1e-12);
  CHECK(anderson_identity_residual(1, 0.0, V + 1.0) ==
        doctest::Approx(anderson_identity_residual(1, 0.0, V) - 6.0).epsilon(1e-14));
  const Sigma2Bridge br = sigma2_volume_bridge(x, 1, V);
  CHECK(std::abs(br.residual) < 1e-8);
  CHECK(std::abs(br.from_euler - br.direct) < 1e-8);

}

TEST_CASE("AdS-Schwarzschild: curvature quadrature against the volume fit") {
  const Compactified a = compactify_model({.family = models::Family::AdsSchwarzschild});
  REQUIRE(a.report.geodesic_boundary);
  const IntegralSuite x = integrate_collar(a.metric, *a.model.fg, true);
  CHECK(std::abs(x.euler_gb - 2.0) < 1e-6);
  const VolumeFit fit = fit_renormalized_volume(*a.model.fg, default_volume_ladder());
  const double rel = std::abs(anderson_identity_residual(2, x.weyl_energy, fit.V)) / (16 * kPi2);
  CHECK(rel < 1e-3);
  // V = 0 exactly for m = 1; the direct σ₂ integral sees it far more sharply
  // than the default-ladder fit does.
  const Sigma2Bridge br = sigma2_volume_bridge(x, 2, fit.V);
  CHECK(std::abs(br.direct) < 1e-6);
  CHECK(std::abs(br.residual) < 6.0 * 10.0 * std::max(1e-4, std::abs(fit.stability_delta)));
}

TEST_CASE("Euler integral on X requires a totally geodesic boundary") {
  const Compactified h = compactify_model({});
  try {
    (void)integrate_collar(h.metric, *h.model.fg, false);
    FAIL("expected BoundaryNotGeodesic");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BoundaryNotGeodesic);
  }
  const IntegralSuite x = integrate_collar(h.metric, *h.model.fg, false, {}, false);
  CHECK(std::isnan(x.euler_gb));
  CHECK_THROWS_AS(double_across_boundary(x), Error);
}
