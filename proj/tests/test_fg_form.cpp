#include <chrono>
#include <cmath>
#include <numbers>

#include "cce/curvature.hpp"
#include "cce/error.hpp"
#include "cce/fg_form.hpp"
#include "cce/models.hpp"
#include "doctest.h"

using namespace cce;

namespace {

constexpr double kPi = std::numbers::pi;

double max_diff(const Matrix& a, const Matrix& b, int n) {
  double w = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) w = std::max(w, std::abs(a[i][j] - b[i][j]));
  return w;
}

Matrix scaled(const Matrix& a, double c) {
  Matrix out = a;
  for (auto& row : out)
    for (double& x : row) x *= c;
  return out;
}

double trace(const Matrix& t, const Matrix& g, int n) {
  const Matrix inv = invert(g, n);
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s += inv[i][j] * t[i][j];
  return s;
}

}  // namespace

TEST_CASE("order-two coefficient from boundary curvature") {
  const Point p = make_point({0.7, 1.1, 0.3});
  const MetricField s3 = models::round_s3();
  CHECK(max_diff(g2_closed_form(s3, 3, p), scaled(s3.metric(p), -0.5), 3) < 1e-12);
  CHECK(max_diff(g2_closed_form(models::flat_torus(3), 3, p), Matrix{}, 3) == 0.0);
  try {
    (void)g2_closed_form(models::flat_torus(2), 2, p);
    FAIL("expected UnsupportedDimension");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnsupportedDimension);
  }
  // Trace identity tr g⁽²⁾ = -R̂/4 for n = 3 on a non-Einstein boundary.
  const MetricField berger = models::berger_sphere(0.35);
  const Point q = make_point({0.4, 1.0, 0.8});
  const CurvaturePacket c = curvature(berger, q);
  CHECK(trace(g2_closed_form(berger, 3, q), c.metric, 3) ==
        doctest::Approx(-c.scalar / 4.0).epsilon(1e-12));
}

TEST_CASE("hyperbolic expansion is recovered exactly") {
  const models::ModelInstance h = models::instantiate({});
  const FGMetric& fg = *h.fg;
  const Point p = fg.collar().generic_point;
  const ExpansionSeries e = extract_expansion(fg, 3, p);
  const Matrix ghat = fg.boundary().metric(p);
  CHECK(max_diff(e.coefficient(0), ghat, 3) < 1e-10);
  CHECK(max_diff(e.coefficient(2), scaled(ghat, -0.5), 3) < 1e-8);
  CHECK(max_diff(e.coefficient(3), Matrix{}, 3) < 1e-8);
  CHECK(e.residual < 1e-8);
  CHECK(e.odd_defect < 1e-8);
  CHECK(e.trace_defect < 1e-8);
  CHECK(trace(e.coefficient(2), ghat, 3) == doctest::Approx(-1.5).epsilon(1e-8));
  CHECK(fg.boundary_volume() == doctest::Approx(2 * kPi * kPi).epsilon(1e-14));
  CHECK_THROWS_AS(extract_expansion(fg, 4, p), Error);
}

TEST_CASE("normal form is structural: the ds row of s^2 g is (1,0,0,0)") {
  const models::ModelInstance h = models::instantiate({});
  const MetricField bulk = h.fg->bulk();
  const Point x = make_point({0.7, 1.1, 0.9, 0.4});
  const Matrix g = bulk.metric(x);
  CHECK(g[0][0] * x[0] * x[0] == doctest::Approx(1.0).epsilon(1e-15));
  for (int i = 1; i < 4; ++i) CHECK(g[0][i] == 0.0);
  CHECK(einstein_residual(bulk, x, 3) < 1e-10);
  CHECK_THROWS_AS(bulk.metric(make_point({2.5, 1.1, 0.9, 0.4})), Error);
}

TEST_CASE("normal form of the hyperbolic ball profile") {
  NormalFormDiagnostics diag;
  const FGMetric fg = normal_form_from_profile(models::hyperbolic_ball_profile(), &diag);
  CHECK(diag.s_max == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(diag.gauge_defect < 1e-7);
  for (double s : {0.01, 0.1, 0.5, 1.0, 1.7}) {
    const WarpJet b = fg.warps(s)[0];
    CHECK(std::abs(b.value - (1.0 - s * s / 4.0)) < 1e-8);
    CHECK(std::abs(b.d1 + s / 2.0) < 1e-8);
    CHECK(std::abs(b.d2 + 0.5) < 1e-7);
  }
  // s = 2(1-ρ)/(1+ρ) in the ball.
  for (double rho : {0.2, 0.6, 0.95})
    CHECK(defining_function(models::hyperbolic_ball_profile(), rho) ==
          doctest::Approx(2.0 * (1.0 - rho) / (1.0 + rho)).epsilon(1e-12));
}

TEST_CASE("geodesic input is a fixed point and the normal form is unique") {
  // dρ² + sinh²ρ g_{S³}: s = 2e^{-ρ} with no further reparametrisation.
  const WarpedProfile geo = models::hyperbolic_distance_profile();
  for (double rho : {0.1, 1.0, 4.0})
    CHECK(defining_function(geo, rho) ==
          doctest::Approx(2.0 * std::exp(-rho)).epsilon(1e-12));
  const FGMetric a = normal_form_from_profile(geo);
  const FGMetric b = normal_form_from_profile(models::hyperbolic_ball_profile());
  const Point p = a.collar().generic_point;
  for (double s : {0.05, 0.3, 1.2})
    CHECK(max_diff(a.g_s(s, p), b.g_s(s, p), 3) < 1e-6);
}

TEST_CASE("AdS-Schwarzschild: Einstein in both charts") {
  const MetricField r_chart = models::ads_schwarzschild_r_chart(1.0);
  CHECK(models::ads_horizon_radius(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(models::ads_period(1.0) == doctest::Approx(kPi).epsilon(1e-15));
  for (double r : {1.05, 2.0, 7.0})
    CHECK(einstein_residual(r_chart, make_point({r, 0.3, 1.1, 0.7}), 3) < 1e-7);

  NormalFormDiagnostics diag;
  const FGMetric fg =
      normal_form_from_profile(models::ads_schwarzschild_profile(1.0), &diag);
  // Frozen from an independent mpmath quadrature of s(r) at r = r₊.
  CHECK(diag.s_max == doctest::Approx(1.34809307604511860).epsilon(1e-12));
  CHECK(diag.gauge_defect < 1e-7);
  const MetricField bulk = fg.bulk();
  for (double s : {0.02, 0.2, 0.6, 1.0, 1.3})
    CHECK(einstein_residual(bulk, make_point({s, 0.3, 1.1, 0.7}), 3) < 1e-6);
}

TEST_CASE("AdS-Schwarzschild expansion: order two matches curvature, order three is trace-free") {
  const models::ModelInstance m =
      models::instantiate({.family = models::Family::AdsSchwarzschild});
  const FGMetric& fg = *m.fg;
  const Point p = fg.collar().generic_point;
  const ExpansionSeries e = extract_expansion(fg, 3, p);
  const Matrix g2 = g2_closed_form(fg.boundary(), 3, p);
  CHECK(max_diff(e.coefficient(2), g2, 3) < 1e-5);
  CHECK(e.trace_defect < 1e-5);
  CHECK(e.odd_defect < 1e-5);
  CHECK(max_diff(e.coefficient(0), models::s1xs2_boundary().metric(p), 3) < 1e-8);
}

TEST_CASE("Berger-sphere boundary: fitted order two matches the curvature formula") {
  const FGMetric fg = normal_form_from_profile(models::taub_nut_ads_profile(0.35, 0.2, 2.0));
  const Point p = fg.collar().generic_point;
  CHECK(einstein_residual(fg.bulk(), make_point({0.1, p[0], p[1], p[2]}), 3) < 1e-6);
  const ExpansionSeries e = extract_expansion(fg, 3, p);
  const Matrix g2 = g2_closed_form(fg.boundary(), 3, p);
  CHECK(max_diff(e.coefficient(2), g2, 3) < 1e-5);
  CHECK(max_diff(e.coefficient(0), models::berger_sphere(0.35).metric(p), 3) < 1e-8);
  CHECK(e.trace_defect < 1e-5);
}

TEST_CASE("non-Einstein control and parameter errors") {
  models::ModelSpec spec;
  spec.family = models::Family::PerturbedHyperbolic;
  spec.amplitude = 0.5;
  const models::ModelInstance m = models::instantiate(spec);
  CHECK_FALSE(m.flags.einstein);
  CHECK(einstein_residual(m.metric, m.sample_point, 3) > 1e-3);

  spec.amplitude = -100.0;
  CHECK_THROWS_AS(models::instantiate(spec), Error);
  models::ModelSpec ads{.family = models::Family::AdsSchwarzschild, .mass = -1.0};
  try {
    (void)models::instantiate(ads);
    FAIL("expected ModelParameterError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ModelParameterError);
  }
  CHECK_THROWS_AS(models::family_from_string("kerr"), Error);
  CHECK(models::family_from_string("ads-schwarzschild") == models::Family::AdsSchwarzschild);
}

TEST_CASE("exact references") {
  const models::ExactReference h = models::exact_reference({});
  CHECK((*h.u)(0.5) == doctest::Approx(2.125));
  CHECK(*h.V == doctest::Approx(4 * kPi * kPi / 3));
  CHECK(*models::exact_reference({.family = models::Family::FlatTorusClosed}).weyl_energy == 0.0);
  try {
    (void)models::exact_reference({.family = models::Family::AdsSchwarzschild});
    FAIL("expected NotAvailable");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotAvailable);
  }
}
