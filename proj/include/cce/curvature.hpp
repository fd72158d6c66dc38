#pragma once

#include <optional>

#include "cce/metric_field.hpp"
#include "cce/tensor.hpp"

namespace cce {

// Sign convention, fixed here and nowhere else:
//
//   R_{ijkl} = K (g_ik g_jl - g_il g_jk)   on a space of constant curvature K,
//   Ric_{jl} = g^{ik} R_{ijkl},
//
// so round spheres have positive sectional and scalar curvature. The Weyl
// norm is the full contraction |W|^2 = W_{ijkl} W^{ijkl}.

/// Pointwise curvature bundle. `schouten` is Rc - R/(2(n-1)) g, which in
/// dimension four is Rc - R/6 g; `sigma2` is the second elementary symmetric
/// function of its eigenvalues relative to g.
struct CurvaturePacket {
  int dim = 0;
  int orientation = 1;
  Matrix metric{};
  Matrix inverse{};
  Rank4 riemann{};
  Matrix ricci{};
  double scalar = 0.0;
  Matrix traceless_ricci{};
  Matrix schouten{};
  double sigma2 = 0.0;                  // R²/24 - |E|²/2 in 4d
  double sigma2_from_eigenvalues = 0.0; // Σ_{a<b} λ_a λ_b
  Rank4 weyl{};
  std::optional<Rank4> weyl_plus;
  std::optional<Rank4> weyl_minus;
  double weyl_norm2 = 0.0;
  double weyl_plus_norm2 = 0.0;
  double weyl_minus_norm2 = 0.0;
};

Rank3 christoffel(const MetricField& m, const Point& p);
Rank3 christoffel(const MetricJet& jet, const Matrix& inverse);

/// orientation = ±1 selects which star eigenspace is called self-dual.
CurvaturePacket curvature(const MetricField& m, const Point& p,
                          int orientation = 1);
CurvaturePacket curvature(const MetricJet& jet, int orientation = 1);

/// ‖Rc + n g‖ measured with g.
double einstein_residual(const MetricField& m, const Point& p, int n);
double einstein_residual(const CurvaturePacket& c, int n);

/// Laplace–Beltrami operator div grad f (non-negative on eigenfunctions of
/// growth type, e.g. Δ cosh r = 4 cosh r on H⁴).
double laplacian(const MetricField& m, const ScalarClosure& f, const Point& p);

/// g-norm squared of a lowered rank-4 tensor.
double norm2(const Rank4& t, const Matrix& inverse, int dim);

/// g-norm of a lowered symmetric 2-tensor.
double norm(const Matrix& t, const Matrix& inverse, int dim);

// Invariant diagnostics, each the largest absolute violation found.

/// Pair symmetries and the cyclic identity of a Riemann-type tensor.
double bianchi_defect(const Rank4& r, int dim);
/// All g-traces of the Weyl tensor.
double weyl_trace_defect(const CurvaturePacket& c);
/// | |W|² - |W⁺|² - |W⁻|² |.
double hodge_split_defect(const CurvaturePacket& c);
/// |σ₂ closed form - σ₂ from eigenvalues|.
double sigma2_defect(const CurvaturePacket& c);

}  // namespace cce
