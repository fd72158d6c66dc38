#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cce/error.hpp"
#include "cce/models.hpp"
#include "cce/volume_renorm.hpp"
#include "doctest.h"

using namespace cce;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPi2 = kPi * kPi;

// Antiderivative of s⁻⁴(1 - s²/4)³.
double F(double s) {
  return -1.0 / (3.0 * s * s * s) + 0.75 / s + 3.0 * s / 16.0 - s * s * s / 192.0;
}

double hyperbolic_volume(double eps) { return 2.0 * kPi2 * (F(2.0) - F(eps)); }

}  // namespace

TEST_CASE("hyperbolic sublevel volumes match the closed-form antiderivative") {
  const FGMetric fg = *models::instantiate({}).fg;
  for (double eps : {1.0, 0.4, 0.05, 1.9}) {
    const QuadratureResult q = sublevel_volume(fg, eps);
    CHECK(q.value == doctest::Approx(hyperbolic_volume(eps)).epsilon(1e-12));
  }
  CHECK(hyperbolic_volume(1.0) == doctest::Approx(2 * kPi2 * 13.0 / 192.0).epsilon(1e-15));
  CHECK(sublevel_volume(fg, 2.0).value == 0.0);
  CHECK_THROWS_AS(sublevel_volume(fg, 2.5), Error);
}

TEST_CASE("hyperbolic renormalized volume") {
  const FGMetric fg = *models::instantiate({}).fg;
  const VolumeFit fit = fit_renormalized_volume(fg, default_volume_ladder());
  CHECK(std::abs(fit.V - 4 * kPi2 / 3) < 1e-6);
  CHECK(std::abs(fit.c0 - 2 * kPi2 / 3) < 1e-6);
  CHECK(std::abs(fit.c2 + 1.5 * kPi2) < 1e-6);
  CHECK(fit.residual < 1e-8);
  CHECK(fit.c0_defect < 1e-6);
  CHECK(std::abs(even_power_leakage(fit)) < 1e-6);
  // The bare three-term fit is visibly contaminated by the o(1) terms.
  CHECK(std::abs(fit.three_term.coefficient(0) - 4 * kPi2 / 3) > 0.1);

  std::vector<double> halved;
  for (double e : default_volume_ladder()) halved.push_back(0.5 * e);
  CHECK(std::abs(fit_renormalized_volume(fg, halved).V - fit.V) < 1e-6);
  CHECK(std::abs(fit_renormalized_volume(fg, {0.2, 0.1, 0.05}).V - fit.V) < 1e-6);
}

TEST_CASE("renormalized volume does not depend on the boundary representative") {
  models::ModelSpec spec;
  spec.boundary_scale = 2.0;
  const FGMetric fg = *models::instantiate(spec).fg;
  const VolumeFit fit = fit_renormalized_volume(fg, default_volume_ladder());
  CHECK(std::abs(fit.V - 4 * kPi2 / 3) < 1e-5);
  CHECK(fit.c0 == doctest::Approx(fg.boundary_volume() / 3).epsilon(1e-8));
}

TEST_CASE("regression recovers synthetic coefficients exactly") {
  const std::vector<double> eps = default_volume_ladder();
  std::vector<double> y;
  for (double e : eps) y.push_back(7.25 / (e * e * e) - 3.5 / e + 1.75);
  const PowerFit fit = fit_powers(eps, y, {-3, -1, 0});
  CHECK(fit.coefficient(-3) == doctest::Approx(7.25).epsilon(1e-12));
  CHECK(fit.coefficient(-1) == doctest::Approx(-3.5).epsilon(1e-12));
  CHECK(fit.coefficient(0) == doctest::Approx(1.75).epsilon(1e-12));

  // Seven columns extrapolate roundoff in volumes of size ~6e4.
  const VolumeFit vf = fit_renormalized_volume(eps, y, 3 * 7.25);
  CHECK(std::abs(vf.V - 1.75) < 1e-9);
  CHECK(vf.c0_defect < 1e-9);
}

TEST_CASE("ladder validation and gates") {
  CHECK(refine_ladder({0.2, 0.1, 0.05}, 8).size() >= 8);
  CHECK_THROWS_AS(refine_ladder({0.1, 0.2, 0.05}, 8), Error);
  CHECK_THROWS_AS(refine_ladder({0.1, 0.05}, 8), Error);

  // A ladder spanning too little range is ill-conditioned.
  std::vector<double> tight;
  for (int i = 0; i < 8; ++i) tight.push_back(0.3 - 1e-4 * i);
  std::vector<double> y;
  for (double e : tight) y.push_back(1.0 / (e * e * e));
  try {
    (void)fit_renormalized_volume(tight, y, 3.0);
    FAIL("expected FitConditioning");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::FitConditioning);
  }

  // Noise far above tol_fit trips the residual gate.
  std::vector<double> noisy;
  const std::vector<double> eps = default_volume_ladder();
  for (std::size_t i = 0; i < eps.size(); ++i)
    noisy.push_back(1.0 / std::pow(eps[i], 3) + (i % 2 ? 0.05 : -0.05));
  try {
    (void)fit_renormalized_volume(eps, noisy, 3.0);
    FAIL("expected UnstableFit");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnstableFit);
  }
}

TEST_CASE("AdS-Schwarzschild volumes: exact r(eps) oracle and mesh self-convergence") {
  const double m = 1.0;
  const WarpedProfile profile = models::ads_schwarzschild_profile(m);
  const FGMetric fg = *models::instantiate({.family = models::Family::AdsSchwarzschild}).fg;
  const double rp = models::ads_horizon_radius(m);
  const double beta = models::ads_period(m);
  for (double eps : {0.4, 0.1}) {
    // r(ε) by bracketing the defining function; then the r-chart volume
    // (4πβ/3)(r³ - r₊³) of {r < r(ε)}.
    auto f = [&](double r) { return defining_function(profile, r) - eps; };
    boost::uintmax_t it = 200;
    const auto root = boost::math::tools::bisect(
        f, rp * 1.0000001, 100.0,
        [](double a, double b) { return std::abs(a - b) < 1e-14 * b; }, it);
    const double r = 0.5 * (root.first + root.second);
    const double exact = 4.0 * kPi * beta / 3.0 * (r * r * r - rp * rp * rp);
    const QuadratureResult q = sublevel_volume(fg, eps);
    CHECK(q.value == doctest::Approx(exact).epsilon(1e-9));
    CHECK(q.error < 1e-10 * q.value);
  }

  const VolumeFit fit = fit_renormalized_volume(fg, default_volume_ladder());
  // (4πβ/3)(m - r₊³) = 0 for m = 1.
  CHECK(std::abs(fit.V) < 1e-3);
  CHECK(fit.c0 == doctest::Approx(4 * kPi2 / 3).epsilon(1e-6));
  CHECK(std::abs(even_power_leakage(fit)) < 1e-4);
  std::ostringstream csv;
  write_volume_csv(csv, fit);
  CHECK(csv.str().rfind("# cce-csv v1 volume\n", 0) == 0);
}
