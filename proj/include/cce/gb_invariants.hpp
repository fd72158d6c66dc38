#pragma once

#include <string_view>
#include <utility>

#include "cce/fg_form.hpp"
#include "cce/models.hpp"

namespace cce {

enum class DomainTag { WithBoundary, ClosedDouble, ClosedModel };

std::string_view to_string(DomainTag tag);

/// Curvature integrals of a Riemannian 4-manifold. |W|² is the full
/// contraction W_ijkl W^ijkl, so
///     8π² χ = ∫ (¼|W|² + σ₂(A)),     48π² τ = ∫ (|W⁺|² - |W⁻|²).
/// Each *_error is the change under one mesh doubling.
struct IntegralSuite {
  DomainTag domain = DomainTag::ClosedModel;
  double volume = 0.0;
  double weyl_energy = 0.0;
  double weyl_plus = 0.0;
  double weyl_minus = 0.0;
  double sigma2_integral = 0.0;
  double euler_gb = 0.0;  // NaN when the boundary term was not requested
  double signature = 0.0;
  double volume_error = 0.0;
  double weyl_energy_error = 0.0;
  double weyl_plus_error = 0.0;
  double weyl_minus_error = 0.0;
  double sigma2_error = 0.0;
  bool boundary_geodesic = true;
  long evaluations = 0;
};

struct QuadratureSpec {
  /// Gauss–Legendre points per panel on bounded, non-periodic axes.
  int order = 12;
  /// Panels per such axis on the coarse mesh; the fine mesh doubles them.
  int panels = 1;
  /// Coarse panels along the collar coordinate s ∈ (0, s_max).
  int collar_panels = 4;
  /// Trapezoid points per periodic axis on the coarse mesh.
  int periodic_points = 8;
  /// Allowed mesh-doubling change, relative to max(1, |integral|).
  double tolerance = 1e-7;
  int orientation = 1;
  /// 0 picks the hardware concurrency.
  int threads = 0;
};

/// Closed model on a coordinate box: cyclic axes contribute their period,
/// periodic axes the trapezoid rule, the rest tensor Gauss–Legendre.
IntegralSuite integrate_closed(const MetricField& g, const models::ClosedDomain& box,
                               const QuadratureSpec& q = {});

/// X with boundary {s = 0}, for a metric on the collar chart (s, x) of a
/// cohomogeneity-one FG metric with homogeneous boundary: integrands are
/// sampled at the collar's generic point and weighted by the boundary
/// unit volume. The Euler number needs a totally geodesic boundary, so
/// with `require_euler` a false `boundary_geodesic` raises BoundaryNotGeodesic.
IntegralSuite integrate_collar(const MetricField& g, const FGMetric& fg, bool boundary_geodesic,
                               const QuadratureSpec& q = {}, bool require_euler = true);

/// Mirror double Y = X ∪ (-X) across a totally geodesic boundary. The
/// mirror copy reverses orientation, so W⁺ and W⁻ trade places and τ(Y) = 0.
IntegralSuite double_across_boundary(const IntegralSuite& x);

/// 8π²χ(X) - ¼∫|W|² - 6V.
double anderson_identity_residual(int chi, double weyl_energy, double V);

struct Sigma2Bridge {
  double direct = 0.0;      // ∫σ₂ of the compactified metric
  double six_V = 0.0;
  double from_euler = 0.0;  // 8π²χ - ¼∫|W|²
  double residual = 0.0;    // direct - 6V
};

/// Compares ∫_X σ₂ of the compactification with 6V and with the Euler route.
Sigma2Bridge sigma2_volume_bridge(const IntegralSuite& compactified, int chi, double V);

/// (4π²(2χ+3τ) - ½∫|W⁺|² - ∫σ₂,  4π²(2χ-3τ) - ½∫|W⁻|² - ∫σ₂) with χ and τ
/// from the suite's own Euler and signature integrals.
std::pair<double, double> combined_formulas(const IntegralSuite& closed);
/// Same with topological χ and τ supplied.
std::pair<double, double> combined_formulas(const IntegralSuite& closed, int chi, int tau);

}  // namespace cce
