#pragma once

#include <boost/rational.hpp>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "cce/fg_form.hpp"

namespace cce {

/// Roots of k(k - n) - (n + 1), i.e. (-1, n + 1), by integer arithmetic.
std::pair<int, int> indicial_roots(int n);

struct AsymptoticCoefficients {
  int n = 3;
  double scalar_curvature = 0.0;  // R̂ at the sample point
  double w2 = 0.0;                // R̂ / (4n(n-1))
  /// Set when R̂ is recognised as a small-denominator rational.
  std::optional<boost::rational<long long>> w2_exact;
  /// n odd: u = 1/s + w2 s + O(s²) carries no s⁰ term.
  bool constant_term_absent = true;
};

boost::rational<long long> w2_rational(boost::rational<long long> scalar_curvature, int n);

AsymptoticCoefficients asymptotic_coefficients(const MetricField& boundary, int n,
                                               const Point& p);

struct EigenfunctionOptions {
  /// Chebyshev–Lobatto intervals on [0, s_max].
  int intervals = 96;
  /// Largest accepted |Δu - (n+1)u| off the collocation nodes.
  double pde_tolerance = 1e-6;
};

/// Radial eigenfunction u = 1/s + w2 s + s² φ(s) with Δu = (n+1)u, regular
/// where the collar closes. ψ = s²φ is stored as nodal values with its first
/// two spectral derivatives; solving for ψ keeps the forcing free of s⁻².
struct EigenfunctionSolution {
  double s_max = 0.0;
  double w2 = 0.0;
  double scalar_curvature = 0.0;  // R̂
  std::vector<double> grid;       // ascending, grid[0] = 0, grid.back() = s_max
  std::vector<double> psi, dpsi, ddpsi;
  std::vector<double> u_values;   // +inf at s = 0
  double asymptotic_residual = 0.0;
  double pde_residual = 0.0;

  /// (ψ, ψ', ψ'') at s ∈ [0, s_max].
  WarpJet psi_jet(double s) const;
  double phi(double s) const;
  double u(double s) const;
  double du(double s) const;
  /// F = s·u = 1 + w2 s² + s³ φ, the collar factor of u⁻²g.
  HyperDual collar_function(const HyperDual& s) const;
  /// u² - |du|²_g = u² - s² u'², free of the 1/s cancellation.
  double gradient_defect(double s) const;
};

/// Solves the reduced ODE  s²u'' + (s² ∂_s log J - (n-1)s) u' = (n+1) u  for
/// n = 3. Throws SolverFailure when the residual gate fails and
/// PositivityViolation if u ≤ 0 on the grid.
EigenfunctionSolution solve_eigenfunction(const FGMetric& fg,
                                          const EigenfunctionOptions& opt = {});

/// u⁻²g = F⁻²(ds² + g_s) on the collar chart, including s = 0.
MetricField compactified_metric(const EigenfunctionSolution& sol, const FGMetric& fg);

/// R[u⁻²g] = n(n+1)(u² - |du|²) at p = (s, x); s = 0 gives the limit 2R̂.
double compactified_scalar(const EigenfunctionSolution& sol, const FGMetric& fg,
                           const Point& p);

struct CompactificationReport {
  double second_fundamental_form = 0.0;  // sup |κ| over blocks at s = 0
  double min_scalar_gap = 0.0;           // min over grid of R[u⁻²g] - 2R̂
  double boundary_scalar = 0.0;          // R[u⁻²g] at s = 0
  double bochner_residual = 0.0;         // sup |-Δ(u²-|du|²) - 2|Ddu - ug|²|
  double scalar_crosscheck = 0.0;        // |curvature pipeline - formula|
  double tolerance = 0.0;
  bool geodesic_boundary = false;
  bool scalar_bound = false;
  bool bochner = false;
};

CompactificationReport compactification_checks(const EigenfunctionSolution& sol,
                                               const FGMetric& fg, double tolerance = 1e-4);

/// `# cce-csv v1 eigenfunction` then s,u,phi,scalar,bochner_residual per node.
void write_eigenfunction_csv(std::ostream& os, const EigenfunctionSolution& sol,
                             const FGMetric& fg);

}  // namespace cce
