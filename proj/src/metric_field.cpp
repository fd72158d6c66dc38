#include "cce/metric_field.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "cce/error.hpp"

namespace cce {
namespace {

constexpr const char* kModule = "tensor_core";

Eigen::MatrixXd to_eigen(const Matrix& g, int dim) {
  Eigen::MatrixXd m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = g[i][j];
  return m;
}

Vec<HyperDual> seed(const Point& p, int dim) {
  Vec<HyperDual> x{};
  for (int i = 0; i < dim; ++i) x[i] = HyperDual(p[i]);
  return x;
}

}  // namespace

MetricField::MetricField(int dim, MetricClosure closure, ChartDomain domain,
                         std::string label)
    : dim_(dim),
      closure_(std::move(closure)),
      domain_(std::move(domain)),
      label_(std::move(label)) {
  if (dim < 2 || dim > kMaxDim) {
    throw Error(ErrorKind::UnsupportedDimension, kModule,
                "metric dimension must lie in [2, 4]");
  }
}

MetricField MetricField::with_central_differences(CentralDifference fd) const {
  MetricField out = *this;
  out.scheme_ = DerivativeScheme::CentralDifference;
  out.fd_ = fd;
  return out;
}

MetricField MetricField::with_analytic_derivatives() const {
  MetricField out = *this;
  out.scheme_ = DerivativeScheme::AnalyticClosure;
  return out;
}

bool MetricField::contains(const Point& p) const {
  for (int i = 0; i < dim_; ++i)
    if (!std::isfinite(p[i])) return false;
  return !domain_ || domain_(p);
}

Mat<HyperDual> MetricField::evaluate(const Vec<HyperDual>& x) const {
  Mat<HyperDual> g = closure_(x);
  // Only the upper triangle is read: symmetry is structural.
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < i; ++j) g[i][j] = g[j][i];
  return g;
}

Matrix MetricField::evaluate_values(const Point& p) const {
  const Mat<HyperDual> gh = evaluate(seed(p, dim_));
  Matrix g{};
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) g[i][j] = gh[i][j].v;
  return g;
}

Matrix MetricField::metric(const Point& p) const {
  if (!contains(p)) {
    throw Error(ErrorKind::DomainError, kModule,
                "point outside the chart domain of " + label_);
  }
  Matrix g = evaluate_values(p);
  require_positive_definite(g, dim_);
  return g;
}

MetricJet MetricField::jet(const Point& p) const {
  if (!contains(p)) {
    throw Error(ErrorKind::DomainError, kModule,
                "point outside the chart domain of " + label_);
  }
  MetricJet j = scheme_ == DerivativeScheme::AnalyticClosure
                    ? analytic_jet(p)
                    : difference_jet(p);
  require_positive_definite(j.g, dim_);
  return j;
}

MetricJet MetricField::analytic_jet(const Point& p) const {
  MetricJet out;
  out.dim = dim_;
  for (int k = 0; k < dim_; ++k) {
    for (int l = k; l < dim_; ++l) {
      Vec<HyperDual> x = seed(p, dim_);
      x[k].e1 = 1.0;
      x[l].e2 = 1.0;
      const Mat<HyperDual> g = evaluate(x);
      for (int i = 0; i < dim_; ++i) {
        for (int j = 0; j < dim_; ++j) {
          out.g[i][j] = g[i][j].v;
          out.dg[k][i][j] = g[i][j].e1;
          out.dg[l][i][j] = g[i][j].e2;
          out.ddg[k][l][i][j] = g[i][j].e12;
          out.ddg[l][k][i][j] = g[i][j].e12;
        }
      }
    }
  }
  return out;
}

MetricJet MetricField::difference_jet(const Point& p) const {
  const int levels = std::max(1, fd_.richardson_levels);
  const int n = dim_;
  auto shifted = [&](int a, double da, int b, double db) {
    Point q = p;
    if (a >= 0) q[a] += da;
    if (b >= 0) q[b] += db;
    return evaluate_values(q);
  };

  // Per level: first derivatives [k] and second derivatives [k][l].
  struct Level {
    Rank3 d1{};
    Rank4 d2{};
  };
  std::vector<Level> table(levels);
  const Matrix g0 = evaluate_values(p);
  for (int lv = 0; lv < levels; ++lv) {
    const double h = fd_.step / std::pow(2.0, lv);
    Level& L = table[lv];
    for (int k = 0; k < n; ++k) {
      const Matrix gp = shifted(k, h, -1, 0.0);
      const Matrix gm = shifted(k, -h, -1, 0.0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          L.d1[k][i][j] = (gp[i][j] - gm[i][j]) / (2.0 * h);
          L.d2[k][k][i][j] = (gp[i][j] - 2.0 * g0[i][j] + gm[i][j]) / (h * h);
        }
      for (int l = k + 1; l < n; ++l) {
        const Matrix gpp = shifted(k, h, l, h);
        const Matrix gpm = shifted(k, h, l, -h);
        const Matrix gmp = shifted(k, -h, l, h);
        const Matrix gmm = shifted(k, -h, l, -h);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            const double v =
                (gpp[i][j] - gpm[i][j] - gmp[i][j] + gmm[i][j]) / (4.0 * h * h);
            L.d2[k][l][i][j] = v;
            L.d2[l][k][i][j] = v;
          }
      }
    }
  }

  // Richardson tableau on the h² error expansion.
  double worst = 0.0;
  for (int col = 1; col < levels; ++col) {
    const double factor = std::pow(4.0, col);
    std::vector<Level> next(levels - col);
    for (int lv = 0; lv + 1 < static_cast<int>(table.size()); ++lv) {
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            next[lv].d1[k][i][j] =
                (factor * table[lv + 1].d1[k][i][j] - table[lv].d1[k][i][j]) /
                (factor - 1.0);
            for (int l = 0; l < n; ++l)
              next[lv].d2[k][l][i][j] = (factor * table[lv + 1].d2[k][l][i][j] -
                                         table[lv].d2[k][l][i][j]) /
                                        (factor - 1.0);
          }
    }
    if (col == levels - 1) {
      const Level& prev = table.back();
      const Level& best = next.back();
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            worst = std::max(worst, std::abs(best.d1[k][i][j] - prev.d1[k][i][j]) /
                                        std::max(1.0, std::abs(best.d1[k][i][j])));
            for (int l = 0; l < n; ++l)
              worst = std::max(
                  worst, std::abs(best.d2[k][l][i][j] - prev.d2[k][l][i][j]) /
                             std::max(1.0, std::abs(best.d2[k][l][i][j])));
          }
    }
    table = std::move(next);
  }
  if (worst > fd_.tolerance) {
    throw Error(ErrorKind::DerivativeTolerance, kModule,
                "Richardson extrapolation did not settle on " + label_);
  }

  MetricJet out;
  out.dim = n;
  out.g = g0;
  out.dg = table.front().d1;
  out.ddg = table.front().d2;
  return out;
}

MetricField conformal_rescale(const MetricField& g, ScalarClosure w) {
  const MetricClosure base = g.closure();
  const int dim = g.dim();
  MetricClosure scaled = [base, w = std::move(w), dim](const Vec<HyperDual>& x) {
    Mat<HyperDual> m = base(x);
    const HyperDual factor = exp(2.0 * w(x));
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) m[i][j] = factor * m[i][j];
    return m;
  };
  MetricField out(dim, std::move(scaled),
                  [g](const Point& p) { return g.contains(p); },
                  g.label() + " (conformal)");
  if (g.scheme() == DerivativeScheme::CentralDifference)
    out = out.with_central_differences(g.difference_settings());
  return out;
}

void require_positive_definite(const Matrix& g, int dim) {
  const Eigen::MatrixXd m = to_eigen(g, dim);
  double scale = 1.0;
  for (int k = 1; k <= dim; ++k) {
    scale *= std::max(std::abs(m(k - 1, k - 1)), 1e-300);
    const double minor = m.topLeftCorner(k, k).determinant();
    if (!std::isfinite(minor)) {
      throw Error(ErrorKind::SingularMetric, kModule, "non-finite metric minor");
    }
    if (std::abs(minor) <= 1e-14 * scale) {
      throw Error(ErrorKind::SingularMetric, kModule,
                  "metric matrix is numerically singular");
    }
    if (minor < 0.0) {
      throw Error(ErrorKind::NonPositiveMetric, kModule,
                  "leading principal minor " + std::to_string(k) +
                      " is negative");
    }
  }
}

Matrix invert(const Matrix& g, int dim) {
  const Eigen::MatrixXd inv = to_eigen(g, dim).inverse();
  Matrix out{};
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) out[i][j] = 0.5 * (inv(i, j) + inv(j, i));
  return out;
}

}  // namespace cce
