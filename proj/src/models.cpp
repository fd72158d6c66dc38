#include "cce/models.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cce/error.hpp"

namespace cce::models {
namespace {

constexpr const char* kModule = "models";
constexpr double kPi = std::numbers::pi;

Mat<HyperDual> diagonal(std::initializer_list<HyperDual> d) {
  Mat<HyperDual> g = zero_matrix<HyperDual>();
  int i = 0;
  for (const HyperDual& x : d) {
    g[i][i] = x;
    ++i;
  }
  return g;
}

bool open_interval(double x, double lo, double hi) { return x > lo && x < hi; }

[[noreturn]] void bad_parameter(const std::string& what) {
  throw Error(ErrorKind::ModelParameterError, kModule, what);
}

// S³ of unit radius in (χ, θ, φ).
Mat<HyperDual> unit_s3(const Vec<HyperDual>& x) {
  const HyperDual a = sin(x[0]);
  const HyperDual b = sin(x[1]);
  return diagonal({1.0, a * a, a * a * b * b});
}

bool s3_chart(const Point& p) {
  return open_interval(p[0], 0.0, kPi) && open_interval(p[1], 0.0, kPi);
}

// Euler-angle blocks on S³, coordinates (ψ, θ, φ).
Mat<HyperDual> sphere2_block(const Vec<HyperDual>& x) {
  Mat<HyperDual> g = zero_matrix<HyperDual>();
  const HyperDual s = sin(x[1]);
  g[1][1] = 1.0;
  g[2][2] = s * s;
  return g;
}

Mat<HyperDual> sigma3_block(const Vec<HyperDual>& x) {
  Mat<HyperDual> g = zero_matrix<HyperDual>();
  const HyperDual c = cos(x[1]);
  g[0][0] = 1.0;
  g[0][2] = c;
  g[2][2] = c * c;
  return g;
}

bool euler_chart(const Point& p) { return open_interval(p[1], 0.0, kPi); }

// S¹×S² blocks, coordinates (φ, θ, ϑ).
Mat<HyperDual> circle_block(const Vec<HyperDual>&) { return diagonal({1.0, 0.0, 0.0}); }

Mat<HyperDual> s1xs2_sphere_block(const Vec<HyperDual>& x) {
  const HyperDual s = sin(x[1]);
  return diagonal({0.0, 1.0, s * s});
}

bool s1xs2_chart(const Point& p) { return open_interval(p[1], 0.0, kPi); }

// V(r) = r² + 1 - 2m/r factored through the horizon so it is exactly
// non-negative for r ≥ r₊.
HyperDual ads_potential(const HyperDual& r, double rp) {
  return (r - rp) * (r * r + rp * r + (rp * rp + 1.0)) / r;
}

HyperDual bump(const HyperDual& s, BumpProfile profile) {
  const HyperDual a = 2.0 - s;
  const HyperDual a4 = a * a * a * a;
  const HyperDual q = 4.0 + s * s;
  const HyperDual s2 = s * s;
  if (profile == BumpProfile::Even) {
    // (t-1)²/t⁶ with t = 1/s + s/4.
    return 256.0 * s2 * s2 * a4 / pow(q, 6.0);
  }
  // (t-1)²/t⁸
  return 4096.0 * s2 * s2 * s2 * a4 / pow(q, 8.0);
}

WarpJet jet_of(const std::function<HyperDual(const HyperDual&)>& f, double s) {
  const HyperDual y = f(HyperDual(s, 1.0, 1.0, 0.0));
  return {y.v, y.e1, y.e12};
}

FGMetric hyperbolic_fg(double lambda) {
  WarpedCollar collar;
  collar.blocks = {{3, unit_s3}};
  collar.warps = [lambda](double s) {
    const double k = 1.0 / (4.0 * lambda * lambda);
    return std::vector<WarpJet>{
        {lambda * (1.0 - k * s * s), -2.0 * lambda * k * s, -2.0 * lambda * k}};
  };
  collar.unit_volume = 2.0 * kPi * kPi;
  collar.generic_point = make_point({1.1, 0.9, 0.4});
  collar.boundary_domain = s3_chart;
  collar.boundary_label = "round S3";
  return FGMetric(3, round_s3(lambda), std::move(collar), 2.0 * lambda, true,
                  "hyperbolic");
}

FGMetric perturbed_fg(double amplitude, BumpProfile profile) {
  auto warp = [amplitude, profile](const HyperDual& s) {
    return (1.0 - 0.25 * s * s) * (1.0 + amplitude * bump(s, profile));
  };
  for (int i = 1; i < 200; ++i) {
    const double s = 2.0 * i / 200.0;
    if (!(1.0 + amplitude * bump(HyperDual(s), profile).v > 0.1)) {
      bad_parameter("perturbation amplitude destroys positivity of the collar warp");
    }
  }
  WarpedCollar collar;
  collar.blocks = {{3, unit_s3}};
  collar.warps = [warp](double s) { return std::vector<WarpJet>{jet_of(warp, s)}; };
  collar.unit_volume = 2.0 * kPi * kPi;
  collar.generic_point = make_point({1.1, 0.9, 0.4});
  collar.boundary_domain = s3_chart;
  collar.boundary_label = "round S3";
  return FGMetric(3, round_s3(1.0), std::move(collar), 2.0, false,
                  "perturbed_hyperbolic");
}

}  // namespace

Family family_from_string(std::string_view name) {
  std::string k(name);
  for (char& c : k)
    if (c == '-') c = '_';
  if (k == "hyperbolic") return Family::Hyperbolic;
  if (k == "ads_schwarzschild") return Family::AdsSchwarzschild;
  if (k == "perturbed_hyperbolic") return Family::PerturbedHyperbolic;
  if (k == "round_sphere_closed" || k == "round_sphere") return Family::RoundSphereClosed;
  if (k == "flat_torus_closed" || k == "flat_torus") return Family::FlatTorusClosed;
  if (k == "product_s2xs2_closed" || k == "s2xs2") return Family::ProductS2xS2Closed;
  if (k == "warped_torus_closed" || k == "warped_torus") return Family::WarpedTorusClosed;
  throw Error(ErrorKind::ParseError, kModule, "unknown model family '" + std::string(name) + "'");
}

std::string_view to_string(Family f) {
  switch (f) {
    case Family::Hyperbolic: return "hyperbolic";
    case Family::AdsSchwarzschild: return "ads_schwarzschild";
    case Family::PerturbedHyperbolic: return "perturbed_hyperbolic";
    case Family::RoundSphereClosed: return "round_sphere_closed";
    case Family::FlatTorusClosed: return "flat_torus_closed";
    case Family::ProductS2xS2Closed: return "product_s2xs2_closed";
    case Family::WarpedTorusClosed: return "warped_torus_closed";
  }
  return "unknown";
}

BumpProfile profile_from_string(std::string_view name) {
  if (name == "even") return BumpProfile::Even;
  if (name == "shell") return BumpProfile::Shell;
  throw Error(ErrorKind::ParseError, kModule, "unknown perturbation profile '" + std::string(name) + "'");
}

std::string_view to_string(BumpProfile p) {
  return p == BumpProfile::Even ? "even" : "shell";
}

// ---------------------------------------------------------------------------
// Metrics

MetricField hyperbolic_ball() {
  return MetricField(
      4,
      [](const Vec<HyperDual>& y) {
        const HyperDual r2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3];
        const HyperDual c = 2.0 / (1.0 - r2);
        const HyperDual c2 = c * c;
        return diagonal({c2, c2, c2, c2});
      },
      [](const Point& p) {
        return p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3] < 1.0;
      },
      "hyperbolic ball");
}

ScalarClosure hyperbolic_t() {
  return [](const Vec<HyperDual>& y) {
    const HyperDual r2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3];
    return (1.0 + r2) / (1.0 - r2);
  };
}

MetricField round_s3(double radius) {
  const double l2 = radius * radius;
  return MetricField(
      3,
      [l2](const Vec<HyperDual>& x) {
        Mat<HyperDual> g = unit_s3(x);
        for (int i = 0; i < 3; ++i) g[i][i] = l2 * g[i][i];
        return g;
      },
      s3_chart, "round S3");
}

MetricField round_s4() {
  return MetricField(
      4,
      [](const Vec<HyperDual>& x) {
        const HyperDual a = sin(x[0]), b = sin(x[1]), c = sin(x[2]);
        const HyperDual a2 = a * a, b2 = b * b, c2 = c * c;
        return diagonal({1.0, a2, a2 * b2, a2 * b2 * c2});
      },
      [](const Point& p) {
        return open_interval(p[0], 0.0, kPi) && open_interval(p[1], 0.0, kPi) &&
               open_interval(p[2], 0.0, kPi);
      },
      "round S4");
}

MetricField product_s2xs2() {
  return MetricField(
      4,
      [](const Vec<HyperDual>& x) {
        const HyperDual a = sin(x[0]), b = sin(x[2]);
        return diagonal({1.0, a * a, 1.0, b * b});
      },
      [](const Point& p) {
        return open_interval(p[0], 0.0, kPi) && open_interval(p[2], 0.0, kPi);
      },
      "S2 x S2");
}

MetricField warped_torus(double eps) {
  // Off-diagonal terms break every pointwise orientation-reversing
  // symmetry, so |W+|² ≠ |W-|² at generic points.
  return MetricField(
      4,
      [eps](const Vec<HyperDual>& x) {
        Mat<HyperDual> g = zero_matrix<HyperDual>();
        const HyperDual a = 1.0 + eps * cos(x[0]);
        const HyperDual b = 1.0 + eps * sin(x[1]);
        g[0][0] = 1.0;
        g[1][1] = 1.0;
        g[2][2] = a * a;
        g[3][3] = b * b;
        g[0][1] = (eps / 3.0) * sin(x[2] + 2.0 * x[3]);
        g[2][3] = (eps / 3.0) * cos(x[0] - x[1]);
        g[0][2] = (eps / 4.0) * sin(x[1] + x[3]);
        return g;
      },
      {}, "warped T4");
}

MetricField flat_torus(int dim) {
  return MetricField(
      dim,
      [dim](const Vec<HyperDual>&) {
        Mat<HyperDual> g = zero_matrix<HyperDual>();
        for (int i = 0; i < dim; ++i) g[i][i] = 1.0;
        return g;
      },
      {}, "flat T" + std::to_string(dim));
}

MetricField s1xs2_boundary() {
  return MetricField(
      3,
      [](const Vec<HyperDual>& x) {
        const HyperDual s = sin(x[1]);
        return diagonal({1.0, 1.0, s * s});
      },
      s1xs2_chart, "S1 x S2");
}

MetricField berger_sphere(double nut) {
  const double w = 4.0 * nut * nut;
  return MetricField(
      3,
      [w](const Vec<HyperDual>& x) {
        Mat<HyperDual> g = sphere2_block(x);
        const Mat<HyperDual> t = sigma3_block(x);
        for (int i = 0; i < 3; ++i)
          for (int j = i; j < 3; ++j) g[i][j] += w * t[i][j];
        return g;
      },
      euler_chart, "Berger S3");
}

double ads_horizon_radius(double mass) {
  if (!(mass > 0.0) || !std::isfinite(mass)) bad_parameter("AdS-Schwarzschild mass must be positive");
  // Real root of r³ + r - 2m (Cardano), polished by Newton.
  const double d = std::sqrt(mass * mass + 1.0 / 27.0);
  double r = std::cbrt(mass + d) + std::cbrt(mass - d);
  for (int i = 0; i < 3; ++i) r -= (r * r * r + r - 2.0 * mass) / (3.0 * r * r + 1.0);
  return r;
}

double ads_period(double mass) {
  const double rp = ads_horizon_radius(mass);
  return 4.0 * kPi / (2.0 * rp + 2.0 * mass / (rp * rp));
}

MetricField ads_schwarzschild_r_chart(double mass) {
  const double rp = ads_horizon_radius(mass);
  return MetricField(
      4,
      [rp](const Vec<HyperDual>& x) {
        const HyperDual V = ads_potential(x[0], rp);
        const HyperDual r2 = x[0] * x[0];
        const HyperDual s = sin(x[2]);
        return diagonal({inverse(V), V, r2, r2 * s * s});
      },
      [rp](const Point& p) { return p[0] > rp && open_interval(p[2], 0.0, kPi); },
      "AdS-Schwarzschild");
}

// ---------------------------------------------------------------------------
// Profiles

WarpedProfile hyperbolic_ball_profile() {
  WarpedProfile p;
  p.label = "hyperbolic";
  p.r_inner = 0.0;
  p.r_outer = 1.0;
  p.r_match = 0.5;
  p.lapse = [](const HyperDual& r) { return 2.0 / (1.0 - r * r); };
  p.warps = {[](const HyperDual& r) { return 2.0 * r / (1.0 - r * r); }};
  p.boundary_ratios = {1.0};
  p.blocks = {{3, unit_s3}};
  p.unit_volume = 2.0 * kPi * kPi;
  p.generic_point = make_point({1.1, 0.9, 0.4});
  p.boundary_domain = s3_chart;
  p.boundary_label = "round S3";
  p.einstein = true;
  return p;
}

WarpedProfile hyperbolic_distance_profile() {
  WarpedProfile p = hyperbolic_ball_profile();
  p.r_outer = std::numeric_limits<double>::infinity();
  p.r_match = 1.0;
  p.lapse = [](const HyperDual&) { return HyperDual(1.0); };
  p.warps = {[](const HyperDual& r) { return sinh(r); }};
  return p;
}

WarpedProfile ads_schwarzschild_profile(double mass) {
  const double rp = ads_horizon_radius(mass);
  WarpedProfile p;
  p.label = "ads_schwarzschild";
  p.r_inner = rp;
  p.r_outer = std::numeric_limits<double>::infinity();
  p.r_match = 2.0 * rp;
  p.lapse = [rp](const HyperDual& r) { return inverse(sqrt(ads_potential(r, rp))); };
  p.inner_density = [rp](double t) {
    const double r = rp + t * t;
    return 2.0 * std::sqrt(r / (r * r + rp * r + rp * rp + 1.0));
  };
  p.warps = {[rp](const HyperDual& r) { return sqrt(ads_potential(r, rp)); },
             [](const HyperDual& r) { return r; }};
  p.boundary_ratios = {1.0, 1.0};
  p.blocks = {{1, circle_block}, {2, s1xs2_sphere_block}};
  p.unit_volume = ads_period(mass) * 4.0 * kPi;
  p.generic_point = make_point({0.3, 1.1, 0.7});
  p.boundary_domain = s1xs2_chart;
  p.boundary_label = "S1 x S2";
  p.einstein = true;
  return p;
}

WarpedProfile taub_nut_ads_profile(double nut, double mass, double r_inner) {
  if (!(nut > 0.0) || !(r_inner > nut)) bad_parameter("Taub-NUT-AdS needs 0 < N < r_inner");
  const double n2 = nut * nut;
  auto F = [n2, mass](const HyperDual& r) {
    const HyperDual r2 = r * r;
    return (r2 + n2 - 2.0 * mass * r + r2 * r2 - 6.0 * n2 * r2 - 3.0 * n2 * n2) /
           (r2 - n2);
  };
  for (int i = 0; i <= 100; ++i) {
    if (!(F(HyperDual(r_inner * (1.0 + 0.1 * i))).v > 0.0))
      bad_parameter("Taub-NUT-AdS lapse not positive on the collar");
  }
  WarpedProfile p;
  p.label = "taub_nut_ads";
  p.r_inner = r_inner;
  p.r_outer = std::numeric_limits<double>::infinity();
  p.r_match = r_inner + 1.0;
  p.lapse = [F](const HyperDual& r) { return inverse(sqrt(F(r))); };
  p.warps = {[n2](const HyperDual& r) { return sqrt(r * r - n2); },
             [F, nut](const HyperDual& r) { return 2.0 * nut * sqrt(F(r)); }};
  p.boundary_ratios = {1.0, 2.0 * nut};
  p.blocks = {{2, sphere2_block}, {1, sigma3_block}};
  p.unit_volume = 16.0 * kPi * kPi;
  p.generic_point = make_point({0.4, 1.0, 0.8});
  p.boundary_domain = euler_chart;
  p.boundary_label = "Berger S3";
  p.einstein = true;
  return p;
}

// ---------------------------------------------------------------------------
// Instances

ModelInstance instantiate(const ModelSpec& spec) {
  ModelInstance m;
  m.spec = spec;
  switch (spec.family) {
    case Family::Hyperbolic: {
      const double l = spec.boundary_scale;
      if (!(l > 0.0) || !std::isfinite(l)) bad_parameter("boundary scale must be positive");
      m.flags = {true, true, true, 1, std::nullopt};
      m.metric = hyperbolic_ball();
      m.sample_point = make_point({0.3, -0.2, 0.4, 0.1});
      m.fg = hyperbolic_fg(l);
      m.boundary_description = "round S3 of radius " + std::to_string(l);
      break;
    }
    case Family::AdsSchwarzschild: {
      m.flags = {true, true, true, 2, std::nullopt};
      m.metric = ads_schwarzschild_r_chart(spec.mass);
      m.horizon_radius = ads_horizon_radius(spec.mass);
      m.period = ads_period(spec.mass);
      m.sample_point = make_point({2.0 * m.horizon_radius, 0.3, 1.1, 0.7});
      m.fg = normal_form_from_profile(ads_schwarzschild_profile(spec.mass));
      m.boundary_description = "S1 x S2, circle length " + std::to_string(m.period);
      break;
    }
    case Family::PerturbedHyperbolic: {
      if (!std::isfinite(spec.amplitude)) bad_parameter("amplitude must be finite");
      m.flags = {false, true, true, 1, std::nullopt};
      m.fg = perturbed_fg(spec.amplitude, spec.profile);
      m.metric = m.fg->bulk();
      m.sample_point = make_point({0.9, 1.1, 0.9, 0.4});
      m.boundary_description = "round S3 (non-Einstein filling)";
      break;
    }
    case Family::RoundSphereClosed: {
      m.flags = {true, true, false, 2, 0};
      m.metric = round_s4();
      m.sample_point = make_point({0.8, 1.2, 2.0, 0.4});
      m.closed = ClosedDomain{make_point({0, 0, 0, 0}), make_point({kPi, kPi, kPi, 2 * kPi}),
                              {false, false, false, true},
                              {false, false, false, true}};
      break;
    }
    case Family::FlatTorusClosed: {
      m.flags = {true, false, false, 0, 0};
      m.metric = flat_torus(4);
      m.sample_point = make_point({0.5, 1.0, 1.5, 2.0});
      m.closed = ClosedDomain{Point{}, make_point({2 * kPi, 2 * kPi, 2 * kPi, 2 * kPi}),
                              {true, true, true, true},
                              {true, true, true, true}};
      break;
    }
    case Family::ProductS2xS2Closed: {
      m.flags = {true, true, false, 4, 0};
      m.metric = product_s2xs2();
      m.sample_point = make_point({0.9, 0.4, 2.1, 1.3});
      m.closed = ClosedDomain{Point{}, make_point({kPi, 2 * kPi, kPi, 2 * kPi}),
                              {false, true, false, true},
                              {false, true, false, true}};
      break;
    }
    case Family::WarpedTorusClosed: {
      if (!(std::abs(spec.epsilon) < 0.5)) bad_parameter("warped torus needs |eps| < 0.5");
      m.flags = {false, false, false, 0, 0};
      m.metric = warped_torus(spec.epsilon);
      m.sample_point = make_point({0.7, 2.2, 1.0, 0.1});
      m.closed = ClosedDomain{Point{}, make_point({2 * kPi, 2 * kPi, 2 * kPi, 2 * kPi}),
                              {false, false, false, false},
                              {true, true, true, true}};
      break;
    }
  }
  return m;
}

ExactReference exact_reference(const ModelSpec& spec) {
  ExactReference e;
  const double pi2 = kPi * kPi;
  switch (spec.family) {
    case Family::Hyperbolic: {
      const double l = spec.boundary_scale;
      const double k = 1.0 / (4.0 * l * l);
      e.u = [k](double s) { return 1.0 / s + k * s; };
      e.warp = [l, k](double s) { return l * (1.0 - k * s * s); };
      e.V = 4.0 * pi2 / 3.0;
      e.c0 = 2.0 * pi2 * l * l * l / 3.0;
      e.c2 = -1.5 * pi2 * l;
      e.w2 = k;
      e.weyl_energy = 0.0;
      e.sigma2_integral = 8.0 * pi2;  // compactified: round hemisphere
      e.euler = 1.0;
      e.signature = 0.0;
      return e;
    }
    case Family::RoundSphereClosed:
      e.weyl_energy = 0.0;
      e.sigma2_integral = 16.0 * pi2;
      e.euler = 2.0;
      e.signature = 0.0;
      return e;
    case Family::FlatTorusClosed:
      e.weyl_energy = 0.0;
      e.sigma2_integral = 0.0;
      e.euler = 0.0;
      e.signature = 0.0;
      return e;
    case Family::ProductS2xS2Closed:
      e.weyl_energy = 256.0 * pi2 / 3.0;
      e.sigma2_integral = 32.0 * pi2 / 3.0;
      e.euler = 4.0;
      e.signature = 0.0;
      return e;
    case Family::AdsSchwarzschild:
    case Family::PerturbedHyperbolic:
    case Family::WarpedTorusClosed:
      break;
  }
  throw Error(ErrorKind::NotAvailable, kModule,
              "no closed-form reference for " + std::string(to_string(spec.family)));
}

}  // namespace cce::models
