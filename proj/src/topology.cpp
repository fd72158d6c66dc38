#include "cce/topology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "cce/curvature.hpp"

namespace cce {
namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

Check lower_bound(std::string name, double value, double threshold, bool strict,
                  const TopologyOptions& opt) {
  Check c{std::move(name), strict ? "value > threshold" : "value >= threshold", value, threshold,
          value - threshold, Verdict::Fail};
  if (std::abs(c.margin) <= opt.tolerance) {
    c.verdict = strict ? Verdict::Boundary : Verdict::Pass;
  } else if (c.margin > 0.0) {
    c.verdict = Verdict::Pass;
  }
  return c;
}

Check upper_bound(std::string name, double value, double threshold, bool strict,
                  const TopologyOptions& opt) {
  Check c{std::move(name), strict ? "value < threshold" : "value <= threshold", value, threshold,
          threshold - value, Verdict::Fail};
  if (std::abs(c.margin) <= opt.tolerance) {
    c.verdict = strict ? Verdict::Boundary : Verdict::Pass;
  } else if (c.margin > 0.0) {
    c.verdict = Verdict::Pass;
  }
  return c;
}

Check not_applicable(Check c) {
  c.verdict = Verdict::NotApplicable;
  return c;
}

bool passed(const TopologyReport& r, std::string_view name) {
  const Check* c = r.find(name);
  return c && c->verdict == Verdict::Pass;
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Boundary: return "boundary";
    case Verdict::NotApplicable: return "not-applicable";
  }
  return "unknown";
}

Check volume_upper_bound(double V, bool yamabe_positive, const TopologyOptions& opt) {
  Check c = upper_bound("volume_upper_bound", V, 4.0 * kPi2 / 3.0, false, opt);
  return yamabe_positive ? c : not_applicable(c);
}

Check ball_homeomorphism_criterion(int chi, double V, bool yamabe_positive,
                                   const TopologyOptions& opt) {
  Check c = lower_bound("ball_homeomorphism", V, 4.0 * kPi2 / 9.0 * chi, true, opt);
  return yamabe_positive ? c : not_applicable(c);
}

Check ball_diffeomorphism_criterion(int chi, double V, bool yamabe_positive,
                                    const TopologyOptions& opt) {
  Check c = lower_bound("ball_diffeomorphism", V, 2.0 * kPi2 / 3.0 * chi, true, opt);
  return yamabe_positive ? c : not_applicable(c);
}

Check doubled_weyl_criterion(double weyl_energy_X, double V, const TopologyOptions& opt) {
  return upper_bound("doubled_weyl_vs_sigma2", 0.25 * 2.0 * weyl_energy_X, 12.0 * V, true, opt);
}

HomologyChecks homology_criteria(const IntegralSuite& y, int chi_Y, const TopologyOptions& opt) {
  HomologyChecks h;
  h.self_dual = upper_bound("self_dual_homology", 0.25 * y.weyl_plus, y.sigma2_integral, true, opt);
  h.anti_self_dual =
      upper_bound("anti_self_dual_homology", 0.25 * y.weyl_minus, y.sigma2_integral, true, opt);
  h.total = upper_bound("total_weyl", 0.25 * y.weyl_energy, 2.0 * y.sigma2_integral, true, opt);
  const double sigma2_euler = 8.0 * kPi2 * chi_Y - 0.25 * y.weyl_energy;
  h.total_via_euler =
      upper_bound("total_weyl_via_euler", 0.25 * y.weyl_energy, 2.0 * sigma2_euler, true, opt);
  h.equivalent = h.total.verdict == h.total_via_euler.verdict;
  return h;
}

std::vector<int> betti_parity_argument(int k_min, int k_max) {
  std::vector<int> feasible;
  for (int k = std::max(0, k_min); k <= k_max; ++k) {
    const long long chi = 2 + 2LL * k, tau = -2LL * k;
    // 2χ + 3τ > (2/3)χ, times 3.
    if (3 * (2 * chi + 3 * tau) > 2 * chi) feasible.push_back(k);
  }
  return feasible;
}

double pinching_margin(const MetricField& g, const std::vector<Point>& points) {
  double m = std::numeric_limits<double>::infinity();
  for (const Point& p : points) {
    const CurvaturePacket c = curvature(g, p);
    m = std::min(m, c.sigma2 - 0.25 * c.weyl_norm2);
  }
  return m;
}

const Check* TopologyReport::find(std::string_view name) const {
  for (const Check& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

TopologyReport topology_report(const TopologyInputs& in, const TopologyOptions& opt) {
  TopologyReport r;
  r.inputs = in;
  r.consistency_residual = anderson_identity_residual(in.chi_X, in.weyl_energy, in.V);
  const double scale = 8.0 * kPi2 * std::max(1, std::abs(in.chi_X));
  r.consistent = std::abs(r.consistency_residual) / scale <= opt.consistency_tolerance;

  const Check bound = volume_upper_bound(in.V, in.yamabe_positive, opt);
  r.checks.push_back(bound);
  r.checks.push_back(ball_homeomorphism_criterion(in.chi_X, in.V, in.yamabe_positive, opt));
  r.checks.push_back(ball_diffeomorphism_criterion(in.chi_X, in.V, in.yamabe_positive, opt));
  r.checks.push_back(doubled_weyl_criterion(in.weyl_energy, in.V, opt));
  if (in.double_suite) {
    const HomologyChecks h = homology_criteria(*in.double_suite, 2 * in.chi_X, opt);
    for (const Check& c : {h.self_dual, h.anti_self_dual, h.total, h.total_via_euler})
      r.checks.push_back(c);
    if (!h.equivalent) r.notes.push_back("total Weyl criterion disagrees with its Euler form");
  }

  if (!in.yamabe_positive) {
    r.notes.push_back("conformal infinity not of positive Yamabe type: no criterion applies");
    return r;
  }
  if (bound.verdict == Verdict::Fail) {
    r.consistent = false;
    r.notes.push_back(
        "V exceeds the positive-Yamabe volume bound: no such Einstein filling exists, inputs "
        "are inconsistent");
  }
  if (!r.consistent) {
    r.notes.push_back("Euler-characteristic identity violated: conclusions withheld");
    return r;
  }
  if (bound.verdict == Verdict::Pass && std::abs(bound.margin) <= opt.tolerance) {
    r.notes.push_back(
        "equality in the volume bound: X is hyperbolic space and its compactification the "
        "round hemisphere, whose double is the round S^4");
  }
  if (passed(r, "ball_homeomorphism")) {
    r.conclusions.push_back({"V > 0 and the first and second real cohomology of X vanish",
                             {"ball_homeomorphism"}});
    r.conclusions.push_back(
        {"the double Y has positive total sigma_2 integral", {"ball_homeomorphism"}});
    r.conclusions.push_back(
        {"X is homeomorphic to the 4-ball after passing to a finite cover; equivalently its "
         "fundamental group is finite and its universal cover is a ball",
         {"ball_homeomorphism"}});
  }
  if (passed(r, "ball_diffeomorphism") && passed(r, "doubled_weyl_vs_sigma2")) {
    r.conclusions.push_back(
        {"the double Y is diffeomorphic to S^4, so X is diffeomorphic to the 4-ball and its "
         "boundary to S^3",
         {"ball_diffeomorphism", "doubled_weyl_vs_sigma2"}});
  }
  return r;
}

std::string render(const TopologyReport& r) {
  std::ostringstream os;
  char buf[128];
  auto num = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  os << "input.chi_X = " << r.inputs.chi_X << "\n";
  os << "input.V = " << num(r.inputs.V) << "\n";
  os << "input.weyl_energy = " << num(r.inputs.weyl_energy) << "\n";
  os << "input.yamabe_positive = " << (r.inputs.yamabe_positive ? "true" : "false") << "\n";
  os << "consistency.residual = " << num(r.consistency_residual) << "\n";
  os << "consistency.ok = " << (r.consistent ? "true" : "false") << "\n";
  for (const Check& c : r.checks) {
    const std::string k = "check." + c.name + ".";
    os << k << "relation = " << c.relation << "\n";
    os << k << "value = " << num(c.value) << "\n";
    os << k << "threshold = " << num(c.threshold) << "\n";
    os << k << "margin = " << num(c.margin) << "\n";
    os << k << "verdict = " << to_string(c.verdict) << "\n";
  }
  for (std::size_t i = 0; i < r.conclusions.size(); ++i) {
    os << "conclusion." << i << " = " << r.conclusions[i].statement << "\n";
    os << "conclusion." << i << ".premises =";
    for (const std::string& p : r.conclusions[i].premises) os << " " << p;
    os << "\n";
  }
  for (std::size_t i = 0; i < r.notes.size(); ++i)
    os << "note." << i << " = " << r.notes[i] << "\n";
  return os.str();
}

}  // namespace cce
