#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cce/metric_field.hpp"

namespace cce {

/// Value and first two s-derivatives of one collar warp factor.
struct WarpJet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// A fixed symmetric tensor field on the boundary chart with `rank` equal
/// eigenvalues relative to the other blocks, e.g. the S² part of S¹×S².
struct CollarBlock {
  int rank = 1;
  MetricClosure tensor;
};

using WarpFunction = std::function<std::vector<WarpJet>(double s)>;

/// Cohomogeneity-one collar: g_s = Σ_k b_k(s)² T_k(x).
///
/// The blocks are mutually orthogonal, so det g_s(x) = Π_k b_k^{2 rank_k} ·
/// det(Σ_k T_k)(x). `unit_volume` is ∫_M sqrt det(Σ_k T_k) over the boundary
/// and `generic_point` a boundary chart point away from coordinate
/// singularities where symmetry-reduced quantities are sampled.
struct WarpedCollar {
  std::vector<CollarBlock> blocks;
  WarpFunction warps;
  double unit_volume = 0.0;
  Point generic_point{};
  ChartDomain boundary_domain;
  std::string boundary_label;
};

/// Asymptotically hyperbolic metric in geodesic normal form
///     g = s⁻² (ds² + g_s),   g_s → ĝ as s → 0,
/// on the collar 0 < s < s_max. When the normal form covers the whole
/// manifold, s_max is where the collar closes off (centre or horizon axis).
class FGMetric {
 public:
  FGMetric(int n, MetricField boundary, WarpedCollar collar, double s_max,
           bool flagged_einstein, std::string family);

  int n() const noexcept { return n_; }
  const MetricField& boundary() const noexcept { return boundary_; }
  const WarpedCollar& collar() const noexcept { return collar_; }
  double s_max() const noexcept { return s_max_; }
  bool flagged_einstein() const noexcept { return einstein_; }
  const std::string& family() const noexcept { return family_; }

  /// Vol(M, ĝ).
  double boundary_volume() const;

  std::vector<WarpJet> warps(double s) const;

  /// g_s(x) as an n×n matrix in the boundary chart.
  Matrix g_s(double s, const Point& x) const;

  /// J(s) = Π b_k^{rank_k}, so sqrt det g_s = J(s)·sqrt det(Σ T_k).
  double volume_factor(double s) const;

  /// d/ds log J = Σ rank_k b_k'/b_k.
  double log_volume_derivative(double s) const;

  /// s⁻²(ds² + g_s) on the chart (s, x¹..xⁿ) with 0 < s < s_max.
  MetricField bulk() const;

  /// F(s)⁻² (ds² + g_s) for a positive collar function F supplied as a
  /// hyper-dual closure in s. F = s recovers bulk().
  MetricField conformal_collar(std::function<HyperDual(const HyperDual&)> F,
                               std::string label) const;

  /// Block warps evaluated at a hyper-dual s, exact to second order.
  std::vector<HyperDual> warps(const HyperDual& s) const;

 private:
  int n_;
  MetricField boundary_;
  WarpedCollar collar_;
  double s_max_;
  bool einstein_;
  std::string family_;
};

/// g⁽²⁾ = -(1/(n-2)) (R̂ic - R̂/(2(n-1)) ĝ) at a boundary point.
Matrix g2_closed_form(const MetricField& boundary, int n, const Point& p);

struct ExpansionSeries {
  std::vector<int> orders;
  std::vector<Matrix> coefficients;  // g⁽ᵏ⁾ in the boundary chart
  std::vector<double> fit_residuals; // per-order standard error, max over entries
  std::vector<double> ladder;
  double residual = 0.0;             // max |fit - data| over entries and rungs
  double condition_number = 0.0;
  double odd_defect = 0.0;   // largest |g⁽ᵏ⁾| for odd k < n
  double trace_defect = 0.0; // |tr_ĝ g⁽ⁿ⁾| when n is odd and extracted

  const Matrix& coefficient(int order) const;
};

struct ExpansionOptions {
  double s0 = 0.2;
  double ratio = 0.7;
  int rungs = 12;
  /// Orders above max_order fitted only to absorb truncation.
  int nuisance_orders = 5;
  double max_condition = 1e8;
};

/// Geometric ladder s_k = s0 ρ^k, shrunk to stay inside the collar.
std::vector<double> expansion_ladder(const ExpansionOptions& opt, double s_max);

ExpansionSeries extract_expansion(const FGMetric& fg, int max_order,
                                  const Point& p,
                                  const ExpansionOptions& opt = {});

/// Tabulated g_s samples at one boundary point.
struct CollarSamples {
  int n = 3;
  Point boundary_point{};
  std::vector<double> s;
  std::vector<Matrix> g;
};

ExpansionSeries extract_expansion(const CollarSamples& samples, int max_order,
                                  const ExpansionOptions& opt = {});

CollarSamples sample_collar(const FGMetric& fg, const Point& p,
                            const std::vector<double>& ladder);

/// Cohomogeneity-one input  g = α(r)² dr² + Σ_k β_k(r)² T_k  with the
/// conformal boundary at r → r_outer (finite or +∞) and the collar closing
/// at r_inner. `boundary_ratios[k]` = lim β_k/β_0 fixes ĝ = Σ c_k² T_k.
struct WarpedProfile {
  std::string label;
  double r_inner = 0.0;
  double r_outer = 0.0;
  double r_match = 0.0;
  std::function<HyperDual(const HyperDual&)> lapse;
  /// Optional 2t·α(r_inner + t²), smooth at t = 0 when the lapse has a
  /// square-root singularity at a horizon. Used for distances to r_inner.
  std::function<double(double t)> inner_density;
  std::vector<std::function<HyperDual(const HyperDual&)>> warps;
  std::vector<double> boundary_ratios;
  std::vector<CollarBlock> blocks;
  double unit_volume = 0.0;
  Point generic_point{};
  ChartDomain boundary_domain;
  std::string boundary_label;
  bool einstein = false;
  int n = 3;
};

struct NormalFormDiagnostics {
  double gauge_defect = 0.0;  // max | |ds|²_{s²g} - 1 | on the check grid
  double s_max = 0.0;
};

/// Integrates the normal-geodesic equation dρ/dr = α(r) for the boundary
/// distance, sets s = e^{-ρ} normalised so that s·β_0 → 1, and inverts
/// s(r) to express the collar warps as functions of s.
FGMetric normal_form_from_profile(const WarpedProfile& profile,
                                  NormalFormDiagnostics* diagnostics = nullptr);

/// s(r) for a profile, exposed for verification.
double defining_function(const WarpedProfile& profile, double r);

}  // namespace cce
