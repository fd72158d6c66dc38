#include "cce/volume_renorm.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "cce/error.hpp"

namespace cce {
namespace {

constexpr const char* kModule = "volume_renorm";

double panel_integral(const FGMetric& fg, double a, double b) {
  return boost::math::quadrature::gauss<double, 20>::integrate(
      [&fg](double s) { return fg.volume_factor(s) / (s * s * s * s); }, a, b);
}

// Geometric panels ε·2^k, the last one ending at s_max; `split` halves each.
double composite(const FGMetric& fg, double eps, int split) {
  double total = 0.0;
  double a = eps;
  while (a < fg.s_max()) {
    const double b = std::min(2.0 * a, fg.s_max());
    const double h = (b - a) / split;
    for (int k = 0; k < split; ++k) total += panel_integral(fg, a + k * h, a + (k + 1) * h);
    a = b;
  }
  return total;
}

void require_ladder(const std::vector<double>& ladder) {
  if (ladder.size() < 3) {
    throw Error(ErrorKind::DomainError, kModule, "ε-ladder needs at least 3 rungs");
  }
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (!(ladder[i] > 0.0) || (i > 0 && !(ladder[i] < ladder[i - 1]))) {
      throw Error(ErrorKind::DomainError, kModule,
                  "ε-ladder must be positive and strictly decreasing");
    }
  }
}

}  // namespace

std::vector<double> default_volume_ladder() {
  return {0.4, 0.3, 0.22, 0.16, 0.12, 0.09, 0.065, 0.05};
}

std::vector<double> refine_ladder(const std::vector<double>& ladder, int min_rungs) {
  require_ladder(ladder);
  std::vector<double> out = ladder;
  while (static_cast<int>(out.size()) < min_rungs) {
    std::vector<double> next;
    for (std::size_t i = 0; i + 1 < out.size(); ++i) {
      next.push_back(out[i]);
      next.push_back(std::sqrt(out[i] * out[i + 1]));
    }
    next.push_back(out.back());
    out = std::move(next);
  }
  return out;
}

QuadratureResult sublevel_volume(const FGMetric& fg, double eps, const VolumeOptions& opt) {
  if (fg.n() != 3) {
    throw Error(ErrorKind::UnsupportedDimension, kModule,
                "volume renormalization is implemented for n = 3 only");
  }
  if (!(eps > 0.0) || eps > fg.s_max()) {
    throw Error(ErrorKind::DomainError, kModule, "ε must lie in (0, s_max]");
  }
  if (eps == fg.s_max()) return {};
  const double unit = fg.collar().unit_volume;
  const double coarse = unit * composite(fg, eps, 1);
  const double fine = unit * composite(fg, eps, 2);
  QuadratureResult out{fine, std::abs(fine - coarse)};
  if (!(out.error <= opt.tol_quadrature * std::max(1.0, std::abs(fine)))) {
    throw Error(ErrorKind::QuadratureTolerance, kModule,
                "sublevel volume did not settle under mesh doubling at ε = " +
                    std::to_string(eps));
  }
  return out;
}

double PowerFit::coefficient(int power) const {
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (basis[i] == power) return coefficients[i];
  throw Error(ErrorKind::DomainError, kModule,
              "power " + std::to_string(power) + " is not in the fit basis");
}

PowerFit fit_powers(const std::vector<double>& eps, const std::vector<double>& y,
                    const std::vector<int>& basis, double max_condition) {
  const int rows = static_cast<int>(eps.size());
  const int cols = static_cast<int>(basis.size());
  if (rows != static_cast<int>(y.size()) || rows < cols) {
    throw Error(ErrorKind::FitConditioning, kModule,
                "fewer samples than regression columns");
  }
  // Rows are weighted by ε^{-p_min} so every sample carries comparable
  // relative precision; the reported residual is in unweighted units.
  const int pmin = *std::min_element(basis.begin(), basis.end());
  Eigen::VectorXd w(rows);
  for (int r = 0; r < rows; ++r) w(r) = std::pow(eps[r], -pmin);
  Eigen::MatrixXd A(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) A(r, c) = w(r) * std::pow(eps[r], basis[c]);
  const Eigen::VectorXd colnorm = A.colwise().norm();
  for (int c = 0; c < cols; ++c) A.col(c) /= colnorm(c);

  PowerFit out;
  out.basis = basis;
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(A).singularValues();
  out.condition_number = sv(0) / sv(sv.size() - 1);
  if (!(out.condition_number <= max_condition)) {
    throw Error(ErrorKind::FitConditioning, kModule,
                "volume regression condition number exceeds the limit");
  }
  Eigen::VectorXd b(rows);
  for (int r = 0; r < rows; ++r) b(r) = w(r) * y[r];
  const Eigen::VectorXd x = A.colPivHouseholderQr().solve(b);
  out.residual = ((A * x - b).array() / w.array()).cwiseAbs().maxCoeff();
  out.coefficients.resize(cols);
  for (int c = 0; c < cols; ++c) out.coefficients[c] = x(c) / colnorm(c);
  return out;
}

VolumeFit fit_renormalized_volume(const std::vector<double>& eps,
                                  const std::vector<double>& volumes,
                                  double boundary_volume, const VolumeOptions& opt) {
  for (int p : {-3, -1, 0}) {
    if (std::find(opt.basis.begin(), opt.basis.end(), p) == opt.basis.end()) {
      throw Error(ErrorKind::DomainError, kModule, "fit basis must contain ε⁻³, ε⁻¹ and 1");
    }
  }
  VolumeFit out;
  out.epsilons = eps;
  out.volumes = volumes;
  out.boundary_volume = boundary_volume;
  out.fit = fit_powers(eps, volumes, opt.basis, opt.max_condition);
  out.c0 = out.fit.coefficient(-3);
  out.c2 = out.fit.coefficient(-1);
  out.V = out.fit.coefficient(0);
  out.residual = out.fit.residual;
  out.condition_number = out.fit.condition_number;
  out.c0_defect = std::abs(out.c0 - boundary_volume / 3.0);
  out.three_term = fit_powers(eps, volumes, {-3, -1, 0}, opt.max_condition);

  if (!(out.residual <= opt.tol_fit)) {
    throw Error(ErrorKind::UnstableFit, kModule,
                "volume regression residual exceeds the fit tolerance");
  }
  // Stability gate: drop the largest rung.
  const std::size_t top = std::max_element(eps.begin(), eps.end()) - eps.begin();
  std::vector<double> e2, v2;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (i == top) continue;
    e2.push_back(eps[i]);
    v2.push_back(volumes[i]);
  }
  const PowerFit dropped = fit_powers(e2, v2, opt.basis, opt.max_condition);
  out.stability_delta = dropped.coefficient(0) - out.V;
  if (!(std::abs(out.stability_delta) < 10.0 * opt.tol_fit)) {
    throw Error(ErrorKind::UnstableFit, kModule,
                "renormalized volume moves when the largest rung is dropped");
  }
  return out;
}

VolumeFit fit_renormalized_volume(const FGMetric& fg, const std::vector<double>& ladder,
                                  const VolumeOptions& opt) {
  if (fg.n() != 3) {
    throw Error(ErrorKind::UnsupportedDimension, kModule,
                "volume renormalization is implemented for n = 3 only");
  }
  // One spare rung for the residual and one for the stability refit.
  const std::vector<double> eps =
      refine_ladder(ladder, static_cast<int>(opt.basis.size()) + 1);
  if (!(eps.front() < fg.s_max())) {
    throw Error(ErrorKind::DomainError, kModule, "ε-ladder leaves the collar");
  }
  std::vector<double> vols, errs;
  for (double e : eps) {
    const QuadratureResult q = sublevel_volume(fg, e, opt);
    vols.push_back(q.value);
    errs.push_back(q.error);
  }
  VolumeFit out = fit_renormalized_volume(eps, vols, fg.boundary_volume(), opt);
  out.quadrature_errors = std::move(errs);
  return out;
}

double even_power_leakage(const VolumeFit& fit, const VolumeOptions& opt) {
  std::vector<int> basis = {-3, -2, -1, 0};
  for (int p : opt.basis)
    if (p > 0) basis.push_back(p);
  while (basis.size() + 1 > fit.epsilons.size()) basis.pop_back();
  return fit_powers(fit.epsilons, fit.volumes, basis, opt.max_condition).coefficient(-2);
}

void write_volume_csv(std::ostream& os, const VolumeFit& fit) {
  char line[256];
  os << "# cce-csv v1 volume\n";
  os << "epsilon,volume,quadrature_error,fitted,deviation\n";
  for (std::size_t i = 0; i < fit.epsilons.size(); ++i) {
    const double e = fit.epsilons[i];
    double f = 0.0;
    for (std::size_t c = 0; c < fit.fit.basis.size(); ++c)
      f += fit.fit.coefficients[c] * std::pow(e, fit.fit.basis[c]);
    const double qe = i < fit.quadrature_errors.size() ? fit.quadrature_errors[i] : 0.0;
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.6e,%.17g,%.6e\n", e, fit.volumes[i], qe,
                  f, fit.volumes[i] - f);
    os << line;
  }
}

}  // namespace cce
