#include <cmath>
#include <numbers>
#include <random>

#include "cce/models.hpp"
#include "cce/topology.hpp"
#include "doctest.h"

using namespace cce;

namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

TopologyInputs hyperbolic_inputs() {
  TopologyInputs in;
  in.chi_X = 1;
  in.V = 4.0 * kPi2 / 3.0;
  in.weyl_energy = 0.0;
  in.yamabe_positive = true;
  return in;
}

bool has_note(const TopologyReport& r, std::string_view needle) {
  for (const auto& n : r.notes)
    if (n.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("volume upper bound") {
  const Check eq = volume_upper_bound(4.0 * kPi2 / 3.0, true);
  CHECK(eq.verdict == Verdict::Pass);
  CHECK(eq.margin == 0.0);

  const Check v13 = volume_upper_bound(13.0, true);
  CHECK(v13.verdict == Verdict::Pass);
  CHECK(v13.margin == doctest::Approx(0.1595).epsilon(1e-3));
  CHECK(v13.margin == v13.threshold - 13.0);

  CHECK(volume_upper_bound(14.0, true).verdict == Verdict::Fail);
  CHECK(volume_upper_bound(13.0, false).verdict == Verdict::NotApplicable);

  const TopologyReport rigid = topology_report(hyperbolic_inputs());
  CHECK(has_note(rigid, "equality in the volume bound"));

  TopologyInputs big = hyperbolic_inputs();
  big.V = 14.0;
  big.weyl_energy = 4.0 * (8.0 * kPi2 - 6.0 * 14.0);  // keeps the Euler identity exact
  const TopologyReport bad = topology_report(big);
  CHECK_FALSE(bad.consistent);
  CHECK(bad.conclusions.empty());
  CHECK(has_note(bad, "inputs are inconsistent"));
}

TEST_CASE("ball homeomorphism criterion") {
  CHECK(ball_homeomorphism_criterion(1, 4.0 * kPi2 / 3.0, true).verdict == Verdict::Pass);

  const Check edge = ball_homeomorphism_criterion(2, 4.0 * kPi2 / 9.0 * 2, true);
  CHECK(edge.verdict == Verdict::Boundary);
  CHECK(edge.verdict != Verdict::Pass);

  const Check low = ball_homeomorphism_criterion(2, 3.0, true);
  CHECK(low.verdict == Verdict::Fail);
  CHECK(low.margin == doctest::Approx(-5.77).epsilon(1e-3));
  CHECK(low.margin == 3.0 - low.threshold);
}

TEST_CASE("ball diffeomorphism criterion and its doubled form") {
  CHECK(ball_diffeomorphism_criterion(1, 4.0 * kPi2 / 3.0, true).verdict == Verdict::Pass);
  CHECK(ball_diffeomorphism_criterion(1, 2.0 * kPi2 / 3.0, true).verdict == Verdict::Boundary);

  const TopologyReport r = topology_report(hyperbolic_inputs());
  REQUIRE(r.consistent);
  const Check* d = r.find("doubled_weyl_vs_sigma2");
  REQUIRE(d);
  CHECK(d->value == 0.0);
  CHECK(d->threshold == doctest::Approx(16.0 * kPi2));
  CHECK(d->verdict == Verdict::Pass);
  // Both the homeomorphism chain and the diffeomorphism chain conclude.
  CHECK(r.conclusions.size() == 4);
  for (const Conclusion& c : r.conclusions) {
    REQUIRE_FALSE(c.premises.empty());
    for (const std::string& p : c.premises) {
      REQUIRE(r.find(p));
      CHECK(r.find(p)->verdict == Verdict::Pass);
    }
  }

  // With the Euler identity holding, the doubled form agrees with the V form.
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> vol(0.0, 4.0 * kPi2 / 3.0);
  for (int i = 0; i < 200; ++i) {
    const int chi = 1 + static_cast<int>(rng() % 3);
    const double V = vol(rng);
    const double W = 4.0 * (8.0 * kPi2 * chi - 6.0 * V);
    CHECK((doubled_weyl_criterion(W, V).verdict == Verdict::Pass) ==
          (ball_diffeomorphism_criterion(chi, V, true).verdict == Verdict::Pass));
  }
}

TEST_CASE("homology criteria on the double") {
  IntegralSuite y;
  y.domain = DomainTag::ClosedDouble;
  y.sigma2_integral = 16.0 * kPi2;
  const HomologyChecks h = homology_criteria(y, 2);
  CHECK(h.self_dual.verdict == Verdict::Pass);
  CHECK(h.anti_self_dual.verdict == Verdict::Pass);
  CHECK(h.total.verdict == Verdict::Pass);
  CHECK(h.self_dual.margin == doctest::Approx(16.0 * kPi2));
  CHECK(h.equivalent);

  IntegralSuite heavy = y;
  heavy.weyl_plus = 8.0 * heavy.sigma2_integral;
  CHECK(homology_criteria(heavy, 2).self_dual.verdict == Verdict::Fail);

  // Random suites satisfying the Euler identity on Y: the two forms agree.
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const int chi = 2 + 2 * static_cast<int>(rng() % 4);
    IntegralSuite s;
    s.weyl_plus = 400.0 * unit(rng);
    s.weyl_minus = 400.0 * unit(rng);
    s.weyl_energy = s.weyl_plus + s.weyl_minus;
    s.sigma2_integral = 8.0 * kPi2 * chi - 0.25 * s.weyl_energy;
    CHECK(homology_criteria(s, chi).equivalent);
  }
}

TEST_CASE("betti parity sweep") {
  CHECK(betti_parity_argument(0, 0) == std::vector<int>{0});
  CHECK(betti_parity_argument(1, 1).empty());
  CHECK(betti_parity_argument(0, 100) == std::vector<int>{0});
}

TEST_CASE("monotonicity and threshold ordering") {
  std::mt19937 rng(20260419);
  std::uniform_real_distribution<double> vol(-5.0, 20.0), step(0.0, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const int chi = 1 + static_cast<int>(rng() % 6);
    const double V = vol(rng), V2 = V + step(rng);
    const Check a = ball_homeomorphism_criterion(chi, V, true);
    const Check b = ball_diffeomorphism_criterion(chi, V, true);
    CHECK(b.threshold >= a.threshold);
    if (b.verdict == Verdict::Pass) CHECK(a.verdict == Verdict::Pass);
    if (a.verdict == Verdict::Pass)
      CHECK(ball_homeomorphism_criterion(chi, V2, true).verdict == Verdict::Pass);
    if (b.verdict == Verdict::Pass)
      CHECK(ball_diffeomorphism_criterion(chi, V2, true).verdict == Verdict::Pass);
  }
}

TEST_CASE("consistency refusal") {
  TopologyInputs in = hyperbolic_inputs();
  in.weyl_energy = 50.0;  // breaks 8π²χ = ¼∫|W|² + 6V
  const TopologyReport r = topology_report(in);
  CHECK_FALSE(r.consistent);
  CHECK(r.conclusions.empty());
  CHECK(r.find("ball_homeomorphism")->verdict == Verdict::Pass);

  in = hyperbolic_inputs();
  in.yamabe_positive = false;
  const TopologyReport n = topology_report(in);
  CHECK(n.conclusions.empty());
  CHECK(n.find("ball_diffeomorphism")->verdict == Verdict::NotApplicable);
}

TEST_CASE("pinching margin and rendering") {
  const MetricField s4 = models::round_s4();
  // Round S⁴: W = 0 and σ₂ = 8π²χ / vol = 6 pointwise.
  const double m = pinching_margin(s4, {make_point({1.0, 0.7, 1.2, 0.3}),
                                        make_point({2.0, 1.5, 0.4, 2.0})});
  CHECK(m == doctest::Approx(6.0).epsilon(1e-9));

  const std::string text = render(topology_report(hyperbolic_inputs()));
  CHECK(text.find("check.ball_diffeomorphism.verdict = pass") != std::string::npos);
  CHECK(text.find("conclusion.3.premises = ball_diffeomorphism doubled_weyl_vs_sigma2") !=
        std::string::npos);
}
