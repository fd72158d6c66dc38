#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "cce/fg_form.hpp"
#include "cce/metric_field.hpp"

namespace cce::models {

enum class Family {
  Hyperbolic,
  AdsSchwarzschild,
  PerturbedHyperbolic,
  RoundSphereClosed,
  FlatTorusClosed,
  ProductS2xS2Closed,
  WarpedTorusClosed,
};

enum class BumpProfile { Even, Shell };

struct ModelSpec {
  Family family = Family::Hyperbolic;
  double boundary_scale = 1.0;  // hyperbolic: ĝ = λ² g_{S³}
  double mass = 1.0;            // AdS–Schwarzschild m
  double amplitude = 0.0;       // perturbed hyperbolic
  BumpProfile profile = BumpProfile::Even;
  double epsilon = 0.3;         // warped torus
};

/// Accepts the CLI spellings, e.g. "ads-schwarzschild" or "ads_schwarzschild".
Family family_from_string(std::string_view name);
std::string_view to_string(Family f);
BumpProfile profile_from_string(std::string_view name);
std::string_view to_string(BumpProfile p);

/// Coordinate box of a closed model. Cyclic coordinates drop out of the
/// metric, so quadrature replaces them by their period; periodic ones are
/// sampled with the trapezoid rule.
struct ClosedDomain {
  Point lower{};
  Point upper{};
  std::array<bool, kMaxDim> cyclic{};
  std::array<bool, kMaxDim> periodic{};
};

struct ModelFlags {
  bool einstein = false;
  bool yamabe_positive = false;
  bool conformally_compact = false;
  std::optional<int> chi;  // of X, or of the closed manifold
  std::optional<int> tau;
};

struct ModelInstance {
  ModelSpec spec;
  ModelFlags flags;
  MetricField metric;            // interior metric in its natural chart
  Point sample_point{};          // a generic interior chart point
  std::optional<FGMetric> fg;    // conformally compact families
  std::optional<ClosedDomain> closed;
  std::string boundary_description;
  double horizon_radius = 0.0;   // AdS–Schwarzschild only
  double period = 0.0;           // AdS–Schwarzschild φ-period
};

ModelInstance instantiate(const ModelSpec& spec);

struct ExactReference {
  std::optional<std::function<double(double)>> u;  // eigenfunction in s
  std::optional<double> V;
  std::optional<double> c0;
  std::optional<double> c2;
  std::optional<double> w2;
  std::optional<double> weyl_energy;
  std::optional<double> sigma2_integral;
  std::optional<double> euler;
  std::optional<double> signature;
  /// g_s as a function of s for the round-sphere block, when polynomial.
  std::optional<std::function<double(double)>> warp;
};

/// Throws NotAvailable for families without closed-form data.
ExactReference exact_reference(const ModelSpec& spec);

// Individual metrics, also used directly by tests.

/// (2/(1-|y|²))² δ on the unit ball.
MetricField hyperbolic_ball();
/// t = (1+|y|²)/(1-|y|²), the eigenfunction Δt = 4t on hyperbolic_ball().
ScalarClosure hyperbolic_t();
/// Radius-λ round S³ in hyperspherical coordinates (χ, θ, φ).
MetricField round_s3(double radius = 1.0);
/// Unit S⁴ in hyperspherical coordinates (χ₁, χ₂, χ₃, φ).
MetricField round_s4();
/// Unit S²×S² in coordinates (θ₁, φ₁, θ₂, φ₂).
MetricField product_s2xs2();
/// Non-conformally-flat, chiral metric on T⁴ = (ℝ/2πℤ)⁴.
MetricField warped_torus(double eps);
MetricField flat_torus(int dim = 4);
/// dφ² + g_{S²} in coordinates (φ, θ, ϑ).
MetricField s1xs2_boundary();
/// (2N)² σ₃² + g_{S²} on S³ in Euler angles (ψ, θ, φ).
MetricField berger_sphere(double nut);

/// AdS–Schwarzschild in (r, φ, θ, ϑ): V⁻¹dr² + V dφ² + r² g_{S²}.
MetricField ads_schwarzschild_r_chart(double mass);
double ads_horizon_radius(double mass);
/// φ-period 4π/V'(r₊) making the (r, φ) plane smooth at the horizon.
double ads_period(double mass);

/// Cohomogeneity-one profiles fed to normal_form_from_profile.
WarpedProfile hyperbolic_ball_profile();
/// The hyperbolic metric written as dρ² + sinh²ρ g_{S³}: already geodesic
/// in ρ, so s = e^{-ρ} up to normalisation.
WarpedProfile hyperbolic_distance_profile();
WarpedProfile ads_schwarzschild_profile(double mass);
/// Taub–NUT–AdS collar r ≥ r_inner with a Berger-sphere boundary. Only the
/// collar is modelled; it does not close off smoothly at r_inner.
WarpedProfile taub_nut_ads_profile(double nut, double mass, double r_inner);

}  // namespace cce::models
