#include "cce/fg_form.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <memory>
#include <utility>

#include "cce/curvature.hpp"
#include "cce/error.hpp"

namespace cce {
namespace {

constexpr const char* kModule = "fg_form";

// Below this s the numeric normal form is evaluated at the floor; the
// warps differ from their limits by O(s²) there, far below double noise.
constexpr double kSFloor = 1e-7;

Vec<HyperDual> lift_point(const Point& x, int n) {
  Vec<HyperDual> out{};
  for (int i = 0; i < n; ++i) out[i] = HyperDual(x[i]);
  return out;
}

double contract(const Matrix& inv, const Matrix& t, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s += inv[i][j] * t[i][j];
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// FGMetric

FGMetric::FGMetric(int n, MetricField boundary, WarpedCollar collar, double s_max,
                   bool flagged_einstein, std::string family)
    : n_(n),
      boundary_(std::move(boundary)),
      collar_(std::move(collar)),
      s_max_(s_max),
      einstein_(flagged_einstein),
      family_(std::move(family)) {
  if (n < 2 || n + 1 > kMaxDim) {
    throw Error(ErrorKind::UnsupportedDimension, kModule,
                "normal forms are built for boundary dimension 2 or 3");
  }
  if (boundary_.dim() != n) {
    throw Error(ErrorKind::UnsupportedDimension, kModule,
                "boundary metric dimension differs from n");
  }
  if (!(s_max > 0.0)) {
    throw Error(ErrorKind::DomainError, kModule, "collar extent must be positive");
  }
  int rank = 0;
  for (const CollarBlock& b : collar_.blocks) rank += b.rank;
  if (rank != n || !collar_.warps) {
    throw Error(ErrorKind::ModelParameterError, kModule,
                "collar block ranks must sum to n and warps must be set");
  }
}

std::vector<WarpJet> FGMetric::warps(double s) const { return collar_.warps(s); }

std::vector<HyperDual> FGMetric::warps(const HyperDual& s) const {
  const std::vector<WarpJet> jets = collar_.warps(s.v);
  std::vector<HyperDual> out;
  out.reserve(jets.size());
  for (const WarpJet& j : jets) out.push_back(lift(s, j.value, j.d1, j.d2));
  return out;
}

double FGMetric::boundary_volume() const {
  return collar_.unit_volume * volume_factor(0.0);
}

Matrix FGMetric::g_s(double s, const Point& x) const {
  const std::vector<WarpJet> b = warps(s);
  const Vec<HyperDual> xh = lift_point(x, n_);
  Matrix g{};
  for (std::size_t k = 0; k < collar_.blocks.size(); ++k) {
    const Mat<HyperDual> t = collar_.blocks[k].tensor(xh);
    const double w = b[k].value * b[k].value;
    for (int i = 0; i < n_; ++i)
      for (int j = i; j < n_; ++j) g[i][j] += w * t[i][j].v;
  }
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < i; ++j) g[i][j] = g[j][i];
  return g;
}

double FGMetric::volume_factor(double s) const {
  const std::vector<WarpJet> b = warps(s);
  double J = 1.0;
  for (std::size_t k = 0; k < collar_.blocks.size(); ++k)
    J *= std::pow(b[k].value, collar_.blocks[k].rank);
  return J;
}

double FGMetric::log_volume_derivative(double s) const {
  const std::vector<WarpJet> b = warps(s);
  double q = 0.0;
  for (std::size_t k = 0; k < collar_.blocks.size(); ++k)
    q += collar_.blocks[k].rank * b[k].d1 / b[k].value;
  return q;
}

MetricField FGMetric::conformal_collar(std::function<HyperDual(const HyperDual&)> F,
                                       std::string label) const {
  const int n = n_;
  const WarpedCollar collar = collar_;
  const double s_max = s_max_;
  const MetricField boundary = boundary_;
  // Shares the warp evaluation with warps(const HyperDual&).
  auto self = std::make_shared<FGMetric>(*this);
  MetricClosure closure = [self, F = std::move(F), n, collar](const Vec<HyperDual>& x) {
    Mat<HyperDual> g = zero_matrix<HyperDual>();
    const HyperDual s = x[0];
    const std::vector<HyperDual> b = self->warps(s);
    Vec<HyperDual> y{};
    for (int i = 0; i < n; ++i) y[i] = x[i + 1];
    const HyperDual f = F(s);
    const HyperDual c = inverse(f * f);
    g[0][0] = c;
    for (std::size_t k = 0; k < collar.blocks.size(); ++k) {
      const Mat<HyperDual> t = collar.blocks[k].tensor(y);
      const HyperDual w = c * b[k] * b[k];
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) g[i + 1][j + 1] += w * t[i][j];
    }
    return g;
  };
  ChartDomain domain = [s_max, boundary, n](const Point& p) {
    if (!(p[0] > 0.0 && p[0] < s_max)) return false;
    Point y{};
    for (int i = 0; i < n; ++i) y[i] = p[i + 1];
    return boundary.contains(y);
  };
  return MetricField(n + 1, std::move(closure), std::move(domain), std::move(label));
}

MetricField FGMetric::bulk() const {
  return conformal_collar([](const HyperDual& s) { return s; }, family_ + " (normal form)");
}

// ---------------------------------------------------------------------------
// Expansion coefficients

Matrix g2_closed_form(const MetricField& boundary, int n, const Point& p) {
  if (n <= 2) {
    throw Error(ErrorKind::UnsupportedDimension, kModule,
                "the order-two coefficient formula is singular for n = 2");
  }
  if (boundary.dim() != n) {
    throw Error(ErrorKind::UnsupportedDimension, kModule,
                "boundary metric dimension differs from n");
  }
  const CurvaturePacket c = curvature(boundary, p);
  Matrix out{};
  const double shift = c.scalar / (2.0 * (n - 1));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out[i][j] = -(c.ricci[i][j] - shift * c.metric[i][j]) / (n - 2);
  return out;
}

const Matrix& ExpansionSeries::coefficient(int order) const {
  for (std::size_t i = 0; i < orders.size(); ++i)
    if (orders[i] == order) return coefficients[i];
  throw Error(ErrorKind::DomainError, kModule,
              "order " + std::to_string(order) + " was not extracted");
}

std::vector<double> expansion_ladder(const ExpansionOptions& opt, double s_max) {
  if (opt.rungs < 2 || !(opt.ratio > 0.0 && opt.ratio < 1.0) || !(opt.s0 > 0.0)) {
    throw Error(ErrorKind::DomainError, kModule, "invalid expansion ladder options");
  }
  // Keep the top rung well inside the collar.
  const double s0 = std::min(opt.s0, 0.5 * s_max);
  std::vector<double> out(opt.rungs);
  for (int k = 0; k < opt.rungs; ++k) out[k] = s0 * std::pow(opt.ratio, k);
  return out;
}

CollarSamples sample_collar(const FGMetric& fg, const Point& p,
                            const std::vector<double>& ladder) {
  CollarSamples out;
  out.n = fg.n();
  out.boundary_point = p;
  out.s = ladder;
  out.g.reserve(ladder.size());
  for (double s : ladder) {
    if (!(s > 0.0 && s < fg.s_max())) {
      throw Error(ErrorKind::DomainError, kModule, "ladder rung outside the collar");
    }
    out.g.push_back(fg.g_s(s, p));
  }
  return out;
}

ExpansionSeries extract_expansion(const FGMetric& fg, int max_order, const Point& p,
                                  const ExpansionOptions& opt) {
  if (!fg.boundary().contains(p)) {
    throw Error(ErrorKind::DomainError, kModule, "boundary point outside the chart");
  }
  return extract_expansion(sample_collar(fg, p, expansion_ladder(opt, fg.s_max())),
                           max_order, opt);
}

ExpansionSeries extract_expansion(const CollarSamples& samples, int max_order,
                                  const ExpansionOptions& opt) {
  const int n = samples.n;
  if (max_order < 0 || max_order > n) {
    throw Error(ErrorKind::DomainError, kModule,
                "coefficients above order n are global data and are not extracted");
  }
  if (n % 2 == 0 && max_order >= n) {
    throw Error(ErrorKind::UnsupportedDimension, kModule,
                "even n carries a logarithmic term at order n");
  }
  const int top = max_order + std::max(0, opt.nuisance_orders);
  const int cols = top + 1;
  const int rows = static_cast<int>(samples.s.size());
  if (rows != static_cast<int>(samples.g.size()) || rows < cols + 1) {
    throw Error(ErrorKind::FitConditioning, kModule,
                "too few collar samples for the requested expansion order");
  }

  double scale = 0.0;
  for (double s : samples.s) scale = std::max(scale, std::abs(s));
  Eigen::MatrixXd A(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) A(r, c) = std::pow(samples.s[r] / scale, c);
  Eigen::VectorXd colnorm = A.colwise().norm();
  for (int c = 0; c < cols; ++c) A.col(c) /= colnorm(c);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  ExpansionSeries out;
  out.ladder = samples.s;
  out.condition_number = sv(0) / sv(sv.size() - 1);
  if (!(out.condition_number <= opt.max_condition)) {
    throw Error(ErrorKind::FitConditioning, kModule,
                "expansion fit condition number exceeds the limit");
  }
  // diag((AᵀA)⁻¹) of the scaled design.
  const Eigen::MatrixXd V = svd.matrixV();
  Eigen::VectorXd covdiag = Eigen::VectorXd::Zero(cols);
  for (int c = 0; c < cols; ++c)
    for (int k = 0; k < cols; ++k) covdiag(c) += std::pow(V(c, k) / sv(k), 2);

  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  std::vector<Matrix> coeff(cols, Matrix{});
  std::vector<double> se(cols, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      Eigen::VectorXd y(rows);
      for (int r = 0; r < rows; ++r) y(r) = samples.g[r][i][j];
      const Eigen::VectorXd x = qr.solve(y);
      const Eigen::VectorXd res = A * x - y;
      out.residual = std::max(out.residual, res.cwiseAbs().maxCoeff());
      const double sigma2 = res.squaredNorm() / std::max(1, rows - cols);
      for (int c = 0; c < cols; ++c) {
        const double unscale = 1.0 / (colnorm(c) * std::pow(scale, c));
        coeff[c][i][j] = coeff[c][j][i] = x(c) * unscale;
        se[c] = std::max(se[c], std::sqrt(sigma2 * covdiag(c)) * unscale);
      }
    }
  }

  for (int k = 0; k <= max_order; ++k) {
    out.orders.push_back(k);
    out.coefficients.push_back(coeff[k]);
    out.fit_residuals.push_back(se[k]);
  }
  const Matrix inv = invert(coeff[0], n);
  for (int k = 1; k < std::min(n, max_order + 1); k += 2)
    out.odd_defect = std::max(out.odd_defect, norm(coeff[k], inv, n));
  if (n % 2 == 1 && max_order >= n)
    out.trace_defect = std::abs(contract(inv, coeff[n], n));
  return out;
}

// ---------------------------------------------------------------------------
// Normal form from a cohomogeneity-one profile

namespace {

using Profile1D = std::function<HyperDual(const HyperDual&)>;

double value_and_slope(const Profile1D& f, double r, double* slope) {
  const HyperDual y = f(HyperDual(r, 1.0, 0.0, 0.0));
  if (slope) *slope = y.e1;
  return y.v;
}

[[noreturn]] void characteristic_failure(const std::string& what) {
  throw Error(ErrorKind::CharacteristicFailure, kModule, what);
}

double gauss20(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss<double, 20>::integrate(f, a, b);
}

/// x ↦ ∫_a^x f for a smooth integrand, tabulated once on adaptively
/// bisected Gauss–Legendre panels so each query costs one partial panel.
class CumulativeQuadrature {
 public:
  CumulativeQuadrature() = default;
  CumulativeQuadrature(std::function<double(double)> f, double a, double b, double tol)
      : f_(std::move(f)) {
    knots_.push_back(a);
    cum_.push_back(0.0);
    refine(a, b, gauss20(f_, a, b), tol, 0);
  }

  double total() const { return cum_.back(); }

  double from_start(double x) const {
    if (x <= knots_.front()) return 0.0;
    if (x >= knots_.back()) return total();
    const std::size_t i =
        std::upper_bound(knots_.begin(), knots_.end(), x) - knots_.begin() - 1;
    if (x == knots_[i]) return cum_[i];
    return cum_[i] + gauss20(f_, knots_[i], x);
  }

 private:
  void refine(double a, double b, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double left = gauss20(f_, a, m);
    const double right = gauss20(f_, m, b);
    if (!std::isfinite(left + right)) characteristic_failure("profile integrand is not finite");
    if (std::abs(left + right - whole) <= tol) {
      knots_.push_back(b);
      cum_.push_back(cum_.back() + left + right);
      return;
    }
    if (depth > 48) characteristic_failure("profile quadrature did not converge");
    refine(a, m, left, tol, depth + 1);
    refine(m, b, right, tol, depth + 1);
  }

  std::function<double(double)> f_;
  std::vector<double> knots_;
  std::vector<double> cum_;
};

/// log s as a function of r. Far out, log s = -log β₀ - ∫_r^{r_out}(β₀'/β₀ - α);
/// inside the matching radius the normal-geodesic equation d log s/dr = -α is
/// integrated inward from there, so neither the boundary nor the closing end
/// is ever evaluated directly.
class Characteristic {
 public:
  explicit Characteristic(WarpedProfile p) : p_(std::move(p)) {
    const bool ordered = p_.r_inner < p_.r_match &&
                         (std::isinf(p_.r_outer) || p_.r_match < p_.r_outer);
    if (!ordered || !p_.lapse || p_.warps.empty() ||
        p_.warps.size() != p_.blocks.size() ||
        p_.boundary_ratios.size() != p_.warps.size()) {
      characteristic_failure(
          "profile must satisfy r_inner < r_match < r_outer with one warp per block");
    }
    build_tail();
    build_inner();
    K_ = -std::log(beta0(p_.r_match)) - tail(p_.r_match);
    log_s_max_ = K_ + inner_.total();
    if (!std::isfinite(K_) || !std::isfinite(log_s_max_)) {
      characteristic_failure("normal-geodesic integrals diverged");
    }
  }

  double s_max() const { return std::exp(log_s_max_); }

  double alpha(double r, double* slope = nullptr) const {
    return value_and_slope(p_.lapse, r, slope);
  }

  double log_s(double r) const {
    if (std::isnan(r)) characteristic_failure("defining function evaluated at NaN");
    if (r >= p_.r_match) return -std::log(beta0(r)) - tail(r);
    r = std::max(r, p_.r_inner);
    const double pos = p_.inner_density ? std::sqrt(r - p_.r_inner) : r;
    return log_s_max_ - inner_.from_start(pos);
  }

  /// r with log s(r) = target; log s decreases strictly in r.
  double invert(double target) const {
    if (target >= log_s_max_) return p_.r_inner;
    auto f = [&](double r) { return log_s(r) - target; };
    double a = p_.r_match, fa = f(a);
    double b = a, fb = fa;
    if (fa > 0.0) {
      // Move outward until the sign changes.
      for (int k = 1; fb > 0.0; ++k) {
        if (k > 200) characteristic_failure("no bracket toward the conformal boundary");
        a = b;
        fa = fb;
        b = std::isinf(p_.r_outer) ? 2.0 * b + std::exp(-target)
                                   : p_.r_outer - (p_.r_outer - p_.r_match) * std::ldexp(1.0, -k);
        fb = f(b);
        // Pull back from overflow of the profile closures.
        for (int j = 0; !std::isfinite(fb); ++j) {
          if (j > 200) characteristic_failure("profile closures overflow before the target s");
          b = 0.5 * (a + b);
          fb = f(b);
        }
      }
    } else {
      a = p_.r_inner;
      fa = log_s_max_ - target;
    }
    if (!(fa >= 0.0 && fb <= 0.0)) characteristic_failure("non-monotone defining function");
    boost::uintmax_t iters = 200;
    const auto tol = [](double x, double y) {
      return std::abs(x - y) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                    std::max(std::abs(x), std::abs(y));
    };
    const auto root = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
    return 0.5 * (root.first + root.second);
  }

  std::vector<WarpJet> jets(double s) const {
    if (!(s > 0.0)) s = kSFloor;
    s = std::max(s, kSFloor);
    const double r0 = invert(std::log(s));
    double da = 0.0;
    const double a = alpha(r0, &da);
    const double r1 = -1.0 / (s * a);
    const double r2 = (a + s * da * r1) / ((s * a) * (s * a));
    const HyperDual sh(s, 1.0, 1.0, 0.0);
    const HyperDual rh(r0, r1, r1, r2);
    std::vector<WarpJet> out;
    out.reserve(p_.warps.size());
    for (const Profile1D& w : p_.warps) {
      const HyperDual b = sh * w(rh);
      out.push_back({b.v, b.e1, b.e12});
    }
    return out;
  }

 private:
  static constexpr double kPanelTol = 1e-15;

  double beta0(double r) const { return p_.warps[0](HyperDual(r)).v; }

  // ∫_r^{r_out} (β₀'/β₀ - α) in a variable x ∈ (0, 1] with x = 0 at the
  // conformal boundary: x = r_match/r, or linear when r_out is finite.
  void build_tail() {
    auto f = [this](double r) {
      double db = 0.0;
      const double b = value_and_slope(p_.warps[0], r, &db);
      return db / b - alpha(r);
    };
    const double rc = p_.r_match;
    if (std::isinf(p_.r_outer)) {
      // The integrand is O(r⁻³) for asymptotically hyperbolic profiles, so
      // it is dropped where the profile closures overflow.
      tail_ = CumulativeQuadrature(
          [f, rc](double x) {
            const double v = f(rc / x) * rc / (x * x);
            return std::isfinite(v) ? v : 0.0;
          },
          0.0, 1.0, kPanelTol);
    } else {
      const double w = p_.r_outer - rc;
      const double ro = p_.r_outer;
      tail_ = CumulativeQuadrature([f, w, ro](double x) { return f(ro - x * w) * w; }, 0.0,
                                   1.0, kPanelTol);
    }
  }

  double tail(double r) const {
    const double x = std::isinf(p_.r_outer) ? p_.r_match / r
                                            : (p_.r_outer - r) / (p_.r_outer - p_.r_match);
    return tail_.from_start(x);
  }

  // ∫_{r_inner}^{r} α, in t = sqrt(r - r_inner) when a smooth density is given.
  void build_inner() {
    if (p_.inner_density) {
      inner_ = CumulativeQuadrature(p_.inner_density, 0.0,
                                    std::sqrt(p_.r_match - p_.r_inner), kPanelTol);
    } else {
      inner_ = CumulativeQuadrature([this](double r) { return alpha(r); }, p_.r_inner,
                                    p_.r_match, kPanelTol);
    }
  }

  WarpedProfile p_;
  CumulativeQuadrature tail_;
  CumulativeQuadrature inner_;
  double K_ = 0.0;
  double log_s_max_ = 0.0;
};

}  // namespace

double defining_function(const WarpedProfile& profile, double r) {
  return std::exp(Characteristic(profile).log_s(r));
}

FGMetric normal_form_from_profile(const WarpedProfile& profile,
                                  NormalFormDiagnostics* diagnostics) {
  auto ch = std::make_shared<const Characteristic>(profile);
  const double s_max = ch->s_max();
  const int n = profile.n;

  // Single-entry memo: a curvature jet evaluates the closure ten times at
  // the same s, each needing a root solve.
  struct Memo {
    const Characteristic* owner = nullptr;
    double s = std::numeric_limits<double>::quiet_NaN();
    std::vector<WarpJet> jets;
  };
  WarpFunction warps = [ch](double s) {
    thread_local Memo memo;
    if (memo.owner != ch.get() || memo.s != s) {
      memo.jets = ch->jets(s);
      memo.owner = ch.get();
      memo.s = s;
    }
    return memo.jets;
  };

  // Gauge check |ds|²_{s²g} = (d log s/dr)²/α² = 1 on a grid, with the
  // derivative taken by Richardson-extrapolated differences of log s.
  double gauge = 0.0;
  double prev_r = profile.r_inner;
  for (int j = 0; j < 12; ++j) {
    const double s = s_max * std::pow(0.6, j + 0.25);
    const double r = ch->invert(std::log(s));
    if (!(r > prev_r)) {
      throw Error(ErrorKind::CharacteristicFailure, kModule,
                  "defining function is not monotone in r");
    }
    prev_r = r;
    double h = 1e-3 * std::min(r - profile.r_inner, std::max(1.0, std::abs(r)));
    if (!std::isinf(profile.r_outer)) h = std::min(h, 1e-3 * (profile.r_outer - r));
    auto d = [&](double step) {
      return (ch->log_s(r + step) - ch->log_s(r - step)) / (2.0 * step);
    };
    const double slope = (4.0 * d(0.5 * h) - d(h)) / 3.0;
    gauge = std::max(gauge, std::abs(std::pow(slope / ch->alpha(r), 2) - 1.0));
  }
  if (!(gauge <= 1e-7)) {
    throw Error(ErrorKind::CharacteristicFailure, kModule,
                "normal-form gauge condition violated on the check grid");
  }

  // Warps must approach the advertised boundary representative.
  const double s_test = std::min(1e-4, 1e-2 * s_max);
  const std::vector<WarpJet> near = ch->jets(s_test);
  for (std::size_t k = 0; k < near.size(); ++k) {
    const double c = profile.boundary_ratios[k];
    if (!(std::abs(near[k].value - c) <= 1e-6 * std::max(1.0, c))) {
      throw Error(ErrorKind::CharacteristicFailure, kModule,
                  "collar warp does not approach its boundary ratio");
    }
  }

  const std::vector<CollarBlock> blocks = profile.blocks;
  const std::vector<double> ratios = profile.boundary_ratios;
  MetricClosure hat = [blocks, ratios, n](const Vec<HyperDual>& x) {
    Mat<HyperDual> g = zero_matrix<HyperDual>();
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      const Mat<HyperDual> t = blocks[k].tensor(x);
      const double w = ratios[k] * ratios[k];
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) g[i][j] += w * t[i][j];
    }
    return g;
  };
  MetricField boundary(n, std::move(hat), profile.boundary_domain,
                       profile.boundary_label);

  WarpedCollar collar;
  collar.blocks = profile.blocks;
  collar.warps = std::move(warps);
  collar.unit_volume = profile.unit_volume;
  collar.generic_point = profile.generic_point;
  collar.boundary_domain = profile.boundary_domain;
  collar.boundary_label = profile.boundary_label;

  if (diagnostics) {
    diagnostics->gauge_defect = gauge;
    diagnostics->s_max = s_max;
  }
  return FGMetric(n, std::move(boundary), std::move(collar), s_max, profile.einstein,
                  profile.label);
}

}  // namespace cce
