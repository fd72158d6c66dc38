#pragma once

#include <iosfwd>
#include <vector>

#include "cce/fg_form.hpp"

namespace cce {

struct VolumeOptions {
  /// Relative mesh-doubling error allowed in each sublevel volume.
  double tol_quadrature = 1e-10;
  /// Absolute residual allowed in the regression (volume units).
  double tol_fit = 1e-4;
  /// ε exponents of the regression basis; must contain -3, -1 and 0.
  std::vector<int> basis = {-3, -1, 0, 1, 2, 3, 4};
  double max_condition = 1e8;
};

std::vector<double> default_volume_ladder();

/// Inserts geometric midpoints until the ladder has at least `min_rungs`
/// entries. Requires ≥ 3 strictly decreasing positive rungs.
std::vector<double> refine_ladder(const std::vector<double>& ladder, int min_rungs);

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // |fine - coarse| from mesh doubling
};

/// Vol({s > ε}) = Vol_unit · ∫_ε^{s_max} s⁻⁴ J(s) ds.
QuadratureResult sublevel_volume(const FGMetric& fg, double eps,
                                 const VolumeOptions& opt = {});

struct PowerFit {
  std::vector<int> basis;
  std::vector<double> coefficients;
  double residual = 0.0;  // max |fit - data|
  double condition_number = 0.0;

  double coefficient(int power) const;
};

/// Least squares of y against ε^p for p in basis, columns scaled to unit norm.
PowerFit fit_powers(const std::vector<double>& eps, const std::vector<double>& y,
                    const std::vector<int>& basis, double max_condition = 1e8);

struct VolumeFit {
  std::vector<double> epsilons;
  std::vector<double> volumes;
  std::vector<double> quadrature_errors;
  double c0 = 0.0;  // ε⁻³
  double c2 = 0.0;  // ε⁻¹
  double V = 0.0;
  double residual = 0.0;
  double boundary_volume = 0.0;
  double condition_number = 0.0;
  PowerFit fit;
  /// V after dropping the largest rung, minus V.
  double stability_delta = 0.0;
  /// |c0 - Vol(M, ĝ)/3|.
  double c0_defect = 0.0;
  /// The bare {ε⁻³, ε⁻¹, 1} fit, kept to show o(1) contamination.
  PowerFit three_term;
};

VolumeFit fit_renormalized_volume(const FGMetric& fg, const std::vector<double>& ladder,
                                  const VolumeOptions& opt = {});

/// Same regression and gates on precomputed samples.
VolumeFit fit_renormalized_volume(const std::vector<double>& eps,
                                  const std::vector<double>& volumes,
                                  double boundary_volume, const VolumeOptions& opt = {});

/// Coefficient of ε⁻² when it is added to the basis (dropping the top power
/// to keep a residual degree of freedom). Vanishes for Einstein fillings.
double even_power_leakage(const VolumeFit& fit, const VolumeOptions& opt = {});

void write_volume_csv(std::ostream& os, const VolumeFit& fit);

}  // namespace cce
