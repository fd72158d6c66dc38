#include "cce/compactify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <numbers>
#include <ostream>
#include <string>

#include "cce/curvature.hpp"
#include "cce/error.hpp"

namespace cce {
namespace {

constexpr const char* kModule = "compactify";

// Chebyshev–Lobatto nodes x_j = cos(πj/N) mapped to s = s_max(1 - x)/2, so
// the nodes ascend from s = 0. Returns d/ds.
Eigen::MatrixXd chebyshev_derivative(int N, double s_max, std::vector<double>& s) {
  Eigen::VectorXd x(N + 1);
  s.resize(N + 1);
  for (int j = 0; j <= N; ++j) {
    x(j) = std::cos(std::numbers::pi * j / N);
    s[j] = 0.5 * s_max * (1.0 - x(j));
  }
  s.front() = 0.0;
  s.back() = s_max;
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(N + 1, N + 1);
  for (int i = 0; i <= N; ++i) {
    const double ci = (i == 0 || i == N) ? 2.0 : 1.0;
    for (int j = 0; j <= N; ++j) {
      if (i == j) continue;
      const double cj = (j == 0 || j == N) ? 2.0 : 1.0;
      D(i, j) = ci / cj * (((i + j) % 2) ? -1.0 : 1.0) / (x(i) - x(j));
    }
    // Negative-sum diagonal keeps D·1 = 0 to roundoff.
    D(i, i) = -D.row(i).sum();
  }
  return D * (-2.0 / s_max);
}

// Barycentric interpolation on the same nodes.
double interpolate(const std::vector<double>& s, const std::vector<double>& f, double t) {
  const int N = static_cast<int>(s.size()) - 1;
  double num = 0.0, den = 0.0;
  for (int j = 0; j <= N; ++j) {
    const double d = t - s[j];
    if (d == 0.0) return f[j];
    double w = (j % 2) ? -1.0 : 1.0;
    if (j == 0 || j == N) w *= 0.5;
    num += w / d * f[j];
    den += w / d;
  }
  return num / den;
}

std::vector<double> multiply(const Eigen::MatrixXd& D, const std::vector<double>& f) {
  const Eigen::VectorXd v = D * Eigen::Map<const Eigen::VectorXd>(f.data(), f.size());
  return {v.data(), v.data() + v.size()};
}

// -L[1/s + w2 s] = ℓ(1 - w2 s²) + 6 w2 s with ℓ = ∂_s log J. Kept
// undivided: numeric warps give ℓ only to ~1e-16/s near the boundary.
double forcing(const FGMetric& fg, double w2, double s) {
  return fg.log_volume_derivative(s) * (1.0 - w2 * s * s) + 6.0 * w2 * s;
}

// Δu - 4u = s²ψ'' + (s²ℓ - 2s)ψ' - 4ψ - forcing.
double pde_defect(const FGMetric& fg, const EigenfunctionSolution& sol, double s) {
  const WarpJet p = sol.psi_jet(s);
  const double l = fg.log_volume_derivative(s);
  return s * s * p.d2 + (s * s * l - 2.0 * s) * p.d1 - 4.0 * p.value - forcing(fg, sol.w2, s);
}

// -Δ(u² - |du|²) - 2|Ddu - ug|² at every node except s_max, where the
// closing axis makes ∂_s log J singular.
std::vector<double> bochner_profile(const EigenfunctionSolution& sol, const FGMetric& fg) {
  const int N = static_cast<int>(sol.grid.size()) - 1;
  std::vector<double> scratch;
  const Eigen::MatrixXd D = chebyshev_derivative(N, sol.s_max, scratch);
  std::vector<double> Q(N + 1);
  for (int j = 0; j <= N; ++j) Q[j] = sol.gradient_defect(sol.grid[j]);
  const std::vector<double> dQ = multiply(D, Q);
  const std::vector<double> ddQ = multiply(D, dQ);

  std::vector<double> out(N, 0.0);
  for (int j = 0; j < N; ++j) {
    const double s = sol.grid[j];
    const double v = sol.w2 * s + sol.psi[j];
    const double dv = sol.w2 + sol.dpsi[j];
    const double ddv = sol.ddpsi[j];
    const std::vector<WarpJet> b = fg.warps(s);
    const double l = fg.log_volume_derivative(s);
    double hess = std::pow(s * s * ddv + s * dv - v, 2);
    for (std::size_t k = 0; k < b.size(); ++k) {
      const double beta = b[k].d1 / b[k].value;
      hess += fg.collar().blocks[k].rank * std::pow(-s * dv - v - beta + s * s * beta * dv, 2);
    }
    const double lap = s * s * ddQ[j] + (s * s * l - 2.0 * s) * dQ[j];
    out[j] = -lap - 2.0 * hess;
  }
  return out;
}

}  // namespace

std::pair<int, int> indicial_roots(int n) {
  if (n < 1) throw Error(ErrorKind::DomainError, kModule, "indicial roots need n ≥ 1");
  // k² - nk - (n+1): discriminant (n+2)².
  const long long disc = 1LL * n * n + 4LL * (n + 1);
  long long r = std::llround(std::sqrt(static_cast<double>(disc)));
  while (r * r > disc) --r;
  while ((r + 1) * (r + 1) <= disc) ++r;
  if (r * r != disc || (n + r) % 2 != 0) {
    throw Error(ErrorKind::DomainError, kModule, "indicial roots are not integers");
  }
  return {static_cast<int>((n - r) / 2), static_cast<int>((n + r) / 2)};
}

boost::rational<long long> w2_rational(boost::rational<long long> scalar_curvature, int n) {
  if (n < 2) throw Error(ErrorKind::UnsupportedDimension, kModule, "w2 needs n ≥ 2");
  return scalar_curvature / boost::rational<long long>(4LL * n * (n - 1));
}

namespace {

// Continued-fraction recognition with denominator ≤ max_den.
std::optional<boost::rational<long long>> recognise(double x, long long max_den, double tol) {
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double y = x;
  for (int it = 0; it < 40; ++it) {
    const double a = std::floor(y);
    if (std::abs(a) > 1e12) break;
    const long long ai = static_cast<long long>(a);
    const long long p2 = ai * p1 + p0, q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    if (std::abs(static_cast<double>(p2) / q2 - x) <= tol * std::max(1.0, std::abs(x))) {
      return boost::rational<long long>(p2, q2);
    }
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    const double frac = y - a;
    if (frac == 0.0) break;
    y = 1.0 / frac;
  }
  return std::nullopt;
}

}  // namespace

AsymptoticCoefficients asymptotic_coefficients(const MetricField& boundary, int n,
                                               const Point& p) {
  if (n < 2) throw Error(ErrorKind::UnsupportedDimension, kModule, "w2 needs n ≥ 2");
  AsymptoticCoefficients out;
  out.n = n;
  out.scalar_curvature = curvature(boundary, p).scalar;
  out.w2 = out.scalar_curvature / (4.0 * n * (n - 1));
  if (const auto r = recognise(out.scalar_curvature, 1000, 1e-12)) {
    out.w2_exact = w2_rational(*r, n);
  }
  out.constant_term_absent = (n % 2) == 1;
  return out;
}

WarpJet EigenfunctionSolution::psi_jet(double s) const {
  if (!(s >= 0.0 && s <= s_max)) {
    throw Error(ErrorKind::DomainError, kModule, "s outside [0, s_max]");
  }
  return {interpolate(grid, psi, s), interpolate(grid, dpsi, s), interpolate(grid, ddpsi, s)};
}

double EigenfunctionSolution::phi(double s) const {
  const WarpJet p = psi_jet(s);
  return s > 0.0 ? p.value / (s * s) : 0.5 * p.d2;
}

double EigenfunctionSolution::u(double s) const {
  return 1.0 / s + w2 * s + psi_jet(s).value;
}

double EigenfunctionSolution::du(double s) const {
  return -1.0 / (s * s) + w2 + psi_jet(s).d1;
}

HyperDual EigenfunctionSolution::collar_function(const HyperDual& s) const {
  const WarpJet p = psi_jet(s.v);
  const double x = s.v;
  return lift(s, 1.0 + w2 * x * x + x * p.value, 2.0 * w2 * x + p.value + x * p.d1,
              2.0 * w2 + 2.0 * p.d1 + x * p.d2);
}

double EigenfunctionSolution::gradient_defect(double s) const {
  // With u = 1/s + v: u² - s²u'² = (2/s + v - s v')(v + s v').
  const WarpJet p = psi_jet(s);
  const double v = w2 * s + p.value;
  const double dv = w2 + p.d1;
  const double v_over_s = w2 + (s > 0.0 ? p.value / s : p.d1);
  return 2.0 * v_over_s + 2.0 * dv + v * v - s * s * dv * dv;
}

EigenfunctionSolution solve_eigenfunction(const FGMetric& fg, const EigenfunctionOptions& opt) {
  if (fg.n() != 3) {
    throw Error(ErrorKind::UnsupportedDimension, kModule,
                "eigenfunction solve is implemented for n = 3 only");
  }
  if (opt.intervals < 8) {
    throw Error(ErrorKind::DomainError, kModule, "need at least 8 collocation intervals");
  }
  // The regularity row assumes the collar closes off at s_max.
  if (!(fg.volume_factor(fg.s_max() * (1.0 - 1e-6)) < 1e-3 * fg.volume_factor(0.5 * fg.s_max()))) {
    throw Error(ErrorKind::DomainError, kModule,
                "collar does not close at s_max; no interior regularity condition");
  }
  EigenfunctionSolution sol;
  sol.s_max = fg.s_max();
  const AsymptoticCoefficients ac =
      asymptotic_coefficients(fg.boundary(), 3, fg.collar().generic_point);
  sol.scalar_curvature = ac.scalar_curvature;
  sol.w2 = ac.w2;

  const int N = opt.intervals;
  const Eigen::MatrixXd D = chebyshev_derivative(N, sol.s_max, sol.grid);
  const Eigen::MatrixXd D2 = D * D;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N + 1, N + 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N + 1);
  for (int i = 1; i < N; ++i) {
    const double s = sol.grid[i];
    const double l = fg.log_volume_derivative(s);
    A.row(i) = s * s * D2.row(i) + (s * s * l - 2.0 * s) * D.row(i);
    A(i, i) -= 4.0;
    rhs(i) = forcing(fg, sol.w2, s);
  }
  // ψ(0) = 0 excludes the growing 1/s branch.
  A(0, 0) = 1.0;
  // Regularity at the closing axis: u'(s_max) = 0.
  const double sm = sol.s_max;
  A.row(N) = D.row(N);
  rhs(N) = 1.0 / (sm * sm) - sol.w2;

  const Eigen::VectorXd psi = A.partialPivLu().solve(rhs);
  if (!psi.allFinite()) {
    throw Error(ErrorKind::SolverFailure, kModule, "collocation system is singular");
  }
  sol.psi.assign(psi.data(), psi.data() + psi.size());
  sol.dpsi = multiply(D, sol.psi);
  sol.ddpsi = multiply(D2, sol.psi);

  sol.u_values.resize(N + 1);
  sol.u_values[0] = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= N; ++j) {
    const double s = sol.grid[j];
    sol.u_values[j] = 1.0 / s + sol.w2 * s + sol.psi[j];
    if (!(sol.u_values[j] > 0.0)) {
      throw Error(ErrorKind::PositivityViolation, kModule,
                  "eigenfunction is not positive at s = " + std::to_string(s));
    }
  }

  // Off-node residual at the midpoints of the interior intervals.
  for (int j = 1; j + 1 < N; ++j) {
    const double s = 0.5 * (sol.grid[j] + sol.grid[j + 1]);
    sol.pde_residual = std::max(sol.pde_residual, std::abs(pde_defect(fg, sol, s)));
  }
  for (int j = 1; j <= N && sol.grid[j] <= 0.1 * sm; ++j) {
    const double s = sol.grid[j];
    sol.asymptotic_residual = std::max(sol.asymptotic_residual, std::abs(s * sol.psi[j]));
  }
  if (!(sol.pde_residual <= opt.pde_tolerance)) {
    throw Error(ErrorKind::SolverFailure, kModule,
                "eigenfunction residual " + std::to_string(sol.pde_residual) +
                    " exceeds the tolerance");
  }
  return sol;
}

MetricField compactified_metric(const EigenfunctionSolution& sol, const FGMetric& fg) {
  const auto shared = std::make_shared<EigenfunctionSolution>(sol);
  return fg.conformal_collar(
      [shared](const HyperDual& s) { return shared->collar_function(s); },
      "u^-2 g (" + fg.family() + ")");
}

double compactified_scalar(const EigenfunctionSolution& sol, const FGMetric& fg,
                           const Point& p) {
  const double s = p[0];
  if (!(s >= 0.0 && s <= sol.s_max) || fg.n() != 3) {
    throw Error(ErrorKind::DomainError, kModule, "point outside the solved collar");
  }
  return 12.0 * sol.gradient_defect(s);
}

CompactificationReport compactification_checks(const EigenfunctionSolution& sol,
                                               const FGMetric& fg, double tolerance) {
  CompactificationReport rep;
  rep.tolerance = tolerance;

  // Principal curvatures of {s = 0} in F⁻²(ds² + g_s): κ_k = F b_k'/b_k - F'.
  const HyperDual F0 = sol.collar_function(HyperDual(0.0, 1.0, 1.0, 0.0));
  for (const WarpJet& b : fg.warps(0.0)) {
    rep.second_fundamental_form =
        std::max(rep.second_fundamental_form, std::abs(F0.v * b.d1 / b.value - F0.e1));
  }

  const double two_rhat = 2.0 * sol.scalar_curvature;
  rep.boundary_scalar = 12.0 * sol.gradient_defect(0.0);
  rep.min_scalar_gap = std::numeric_limits<double>::infinity();
  for (double s : sol.grid) {
    rep.min_scalar_gap = std::min(rep.min_scalar_gap, 12.0 * sol.gradient_defect(s) - two_rhat);
  }

  for (double r : bochner_profile(sol, fg))
    rep.bochner_residual = std::max(rep.bochner_residual, std::abs(r));

  // Independent pipeline: curvature of the explicit metric u⁻²g.
  const MetricField gt = compactified_metric(sol, fg);
  const Point& x = fg.collar().generic_point;
  for (double frac : {0.1, 0.35, 0.6, 0.85}) {
    const double s = frac * sol.s_max;
    const Point q = make_point({s, x[0], x[1], x[2]});
    rep.scalar_crosscheck = std::max(
        rep.scalar_crosscheck, std::abs(curvature(gt, q).scalar - compactified_scalar(sol, fg, q)));
  }

  rep.geodesic_boundary = rep.second_fundamental_form < tolerance;
  rep.scalar_bound = rep.min_scalar_gap >= -tolerance;
  rep.bochner = rep.bochner_residual < tolerance;
  return rep;
}

void write_eigenfunction_csv(std::ostream& os, const EigenfunctionSolution& sol,
                             const FGMetric& fg) {
  const std::vector<double> bochner = bochner_profile(sol, fg);
  char line[256];
  os << "# cce-csv v1 eigenfunction\n";
  os << "s,u,phi,scalar,bochner_residual\n";
  for (std::size_t j = 1; j < sol.grid.size(); ++j) {
    const double s = sol.grid[j];
    const double b = j < bochner.size() ? bochner[j] : std::numeric_limits<double>::quiet_NaN();
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.6e\n", s, sol.u_values[j],
                  sol.phi(s), 12.0 * sol.gradient_defect(s), b);
    os << line;
  }
}

}  // namespace cce
