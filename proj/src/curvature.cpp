#include "cce/curvature.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "cce/error.hpp"

namespace cce {
namespace {

using Eigen::MatrixXd;

MatrixXd to_eigen(const Matrix& g, int dim) {
  MatrixXd m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = g[i][j];
  return m;
}

// t'_{abcd} = t_{ijkl} M^i_a M^j_b M^k_c M^l_d, one index at a time.
Rank4 transform(const Rank4& t, const MatrixXd& M, int n) {
  Rank4 a{}, b{};
  for (int p = 0; p < n; ++p)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (int i = 0; i < n; ++i) s += t[i][j][k][l] * M(i, p);
          a[p][j][k][l] = s;
        }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (int j = 0; j < n; ++j) s += a[p][j][k][l] * M(j, q);
          b[p][q][k][l] = s;
        }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (int k = 0; k < n; ++k) s += b[p][q][k][l] * M(k, r);
          a[p][q][r][l] = s;
        }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int u = 0; u < n; ++u) {
          double s = 0.0;
          for (int l = 0; l < n; ++l) s += a[p][q][r][l] * M(l, u);
          b[p][q][r][u] = s;
        }
  return b;
}

// Oriented basis of Λ² for an orthonormal coframe; the star maps slot I to
// slot I + 3 and back.
constexpr int kPairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {2, 3}, {3, 1}, {1, 2}};

struct SlotSign {
  int slot;
  double sign;
};

SlotSign slot_of(int a, int b) {
  for (int I = 0; I < 6; ++I) {
    if (kPairs[I][0] == a && kPairs[I][1] == b) return {I, 1.0};
    if (kPairs[I][0] == b && kPairs[I][1] == a) return {I, -1.0};
  }
  return {-1, 0.0};
}

void split_weyl(CurvaturePacket& c) {
  const MatrixXd G = to_eigen(c.metric, 4);
  const Eigen::LLT<MatrixXd> llt(G);
  const MatrixXd L = llt.matrixL();
  const MatrixXd F = L.transpose().inverse();  // F^T G F = I, det F > 0

  const Rank4 wf = transform(c.weyl, F, 4);
  Eigen::Matrix<double, 6, 6> op;
  for (int I = 0; I < 6; ++I)
    for (int J = 0; J < 6; ++J)
      op(I, J) = wf[kPairs[I][0]][kPairs[I][1]][kPairs[J][0]][kPairs[J][1]];

  Eigen::Matrix<double, 6, 6> star = Eigen::Matrix<double, 6, 6>::Zero();
  for (int I = 0; I < 3; ++I) {
    star(I, I + 3) = c.orientation;
    star(I + 3, I) = c.orientation;
  }
  const Eigen::Matrix<double, 6, 6> id = Eigen::Matrix<double, 6, 6>::Identity();
  const Eigen::Matrix<double, 6, 6> pplus = 0.5 * (id + star);
  const Eigen::Matrix<double, 6, 6> pminus = 0.5 * (id - star);
  const Eigen::Matrix<double, 6, 6> opp = pplus * op * pplus;
  const Eigen::Matrix<double, 6, 6> opm = pminus * op * pminus;

  auto rebuild = [&](const Eigen::Matrix<double, 6, 6>& m) {
    Rank4 frame{};
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        if (a == b) continue;
        const SlotSign ab = slot_of(a, b);
        for (int d = 0; d < 4; ++d)
          for (int e = 0; e < 4; ++e) {
            if (d == e) continue;
            const SlotSign de = slot_of(d, e);
            frame[a][b][d][e] = ab.sign * de.sign * m(ab.slot, de.slot);
          }
      }
    return transform(frame, L.transpose(), 4);
  };

  c.weyl_plus = rebuild(opp);
  c.weyl_minus = rebuild(opm);
  c.weyl_plus_norm2 = 4.0 * opp.squaredNorm();
  c.weyl_minus_norm2 = 4.0 * opm.squaredNorm();
}

}  // namespace

double norm2(const Rank4& t, const Matrix& inverse, int dim) {
  const Rank4 up = transform(t, to_eigen(inverse, dim), dim);
  double s = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      for (int k = 0; k < dim; ++k)
        for (int l = 0; l < dim; ++l) s += t[i][j][k][l] * up[i][j][k][l];
  return s;
}

double norm(const Matrix& t, const Matrix& inverse, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b)
          s += t[i][j] * t[a][b] * inverse[i][a] * inverse[j][b];
  return std::sqrt(std::max(0.0, s));
}

Rank3 christoffel(const MetricJet& jet, const Matrix& inverse) {
  const int n = jet.dim;
  Rank3 first{};  // Γ_{l i j}
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        first[l][i][j] =
            0.5 * (jet.dg[i][j][l] + jet.dg[j][i][l] - jet.dg[l][i][j]);
  Rank3 out{};
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += inverse[k][l] * first[l][i][j];
        out[k][i][j] = s;
      }
  return out;
}

Rank3 christoffel(const MetricField& m, const Point& p) {
  const MetricJet jet = m.jet(p);
  return christoffel(jet, invert(jet.g, jet.dim));
}

CurvaturePacket curvature(const MetricJet& jet, int orientation) {
  const int n = jet.dim;
  CurvaturePacket c;
  c.dim = n;
  c.orientation = orientation >= 0 ? 1 : -1;
  c.metric = jet.g;
  c.inverse = invert(jet.g, n);
  const Rank3 gam = christoffel(jet, c.inverse);
  const auto& g = jet.g;
  const auto& dd = jet.ddg;

  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int cc = 0; cc < n; ++cc)
        for (int d = 0; d < n; ++d) {
          double r = 0.5 * (dd[b][cc][a][d] + dd[a][d][b][cc] -
                            dd[b][d][a][cc] - dd[a][cc][b][d]);
          for (int e = 0; e < n; ++e)
            for (int f = 0; f < n; ++f)
              r += g[e][f] *
                   (gam[e][b][cc] * gam[f][a][d] - gam[e][b][d] * gam[f][a][cc]);
          c.riemann[a][b][cc][d] = r;
        }

  for (int b = 0; b < n; ++b)
    for (int d = 0; d < n; ++d) {
      double s = 0.0;
      for (int a = 0; a < n; ++a)
        for (int cc = 0; cc < n; ++cc)
          s += c.inverse[a][cc] * c.riemann[a][b][cc][d];
      c.ricci[b][d] = s;
    }
  for (int b = 0; b < n; ++b)
    for (int d = 0; d < b; ++d) {
      const double avg = 0.5 * (c.ricci[b][d] + c.ricci[d][b]);
      c.ricci[b][d] = c.ricci[d][b] = avg;
    }
  c.scalar = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) c.scalar += c.inverse[i][j] * c.ricci[i][j];

  const double schouten_shift = c.scalar / (2.0 * (n - 1));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      c.traceless_ricci[i][j] = c.ricci[i][j] - c.scalar / n * g[i][j];
      c.schouten[i][j] = c.ricci[i][j] - schouten_shift * g[i][j];
    }

  // σ₂ through the spectrum of g⁻¹A.
  {
    const MatrixXd A = to_eigen(c.schouten, n);
    const MatrixXd G = to_eigen(g, n);
    const Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(A, G);
    const Eigen::VectorXd lam = es.eigenvalues();
    double s2 = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) s2 += lam(a) * lam(b);
    c.sigma2_from_eigenvalues = s2;
  }
  if (n == 4) {
    const double e = norm(c.traceless_ricci, c.inverse, n);
    c.sigma2 = c.scalar * c.scalar / 24.0 - 0.5 * e * e;
  } else {
    double tr = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) tr += c.inverse[i][j] * c.schouten[i][j];
    const double a = norm(c.schouten, c.inverse, n);
    c.sigma2 = 0.5 * (tr * tr - a * a);
  }

  if (n >= 3) {
    const double k1 = 1.0 / (n - 2);
    const double k2 = c.scalar / ((n - 1.0) * (n - 2.0));
    const auto& rc = c.ricci;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            c.weyl[i][j][k][l] =
                c.riemann[i][j][k][l] -
                k1 * (rc[i][k] * g[j][l] - rc[i][l] * g[j][k] +
                      rc[j][l] * g[i][k] - rc[j][k] * g[i][l]) +
                k2 * (g[i][k] * g[j][l] - g[i][l] * g[j][k]);
    c.weyl_norm2 = norm2(c.weyl, c.inverse, n);
  }
  if (n == 4) split_weyl(c);
  return c;
}

CurvaturePacket curvature(const MetricField& m, const Point& p, int orientation) {
  return curvature(m.jet(p), orientation);
}

double einstein_residual(const CurvaturePacket& c, int n) {
  Matrix t{};
  for (int i = 0; i < c.dim; ++i)
    for (int j = 0; j < c.dim; ++j) t[i][j] = c.ricci[i][j] + n * c.metric[i][j];
  return norm(t, c.inverse, c.dim);
}

double einstein_residual(const MetricField& m, const Point& p, int n) {
  if (m.dim() != n + 1) {
    throw Error(ErrorKind::UnsupportedDimension, "tensor_core",
                "Einstein normalization Ric = -n g needs dim = n + 1");
  }
  return einstein_residual(curvature(m, p), n);
}

double laplacian(const MetricField& m, const ScalarClosure& f, const Point& p) {
  const int n = m.dim();
  const MetricJet jet = m.jet(p);
  const Matrix inv = invert(jet.g, n);
  const Rank3 gam = christoffel(jet, inv);
  double grad[kMaxDim] = {};
  double hess[kMaxDim][kMaxDim] = {};
  for (int k = 0; k < n; ++k)
    for (int l = k; l < n; ++l) {
      Vec<HyperDual> x{};
      for (int i = 0; i < n; ++i) x[i] = HyperDual(p[i]);
      x[k].e1 = 1.0;
      x[l].e2 = 1.0;
      const HyperDual v = f(x);
      grad[k] = v.e1;
      grad[l] = v.e2;
      hess[k][l] = hess[l][k] = v.e12;
    }
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double h = hess[i][j];
      for (int k = 0; k < n; ++k) h -= gam[k][i][j] * grad[k];
      s += inv[i][j] * h;
    }
  return s;
}

double bianchi_defect(const Rank4& r, int n) {
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double v = r[i][j][k][l];
          worst = std::max({worst, std::abs(v + r[j][i][k][l]),
                            std::abs(v + r[i][j][l][k]),
                            std::abs(v - r[k][l][i][j]),
                            std::abs(v + r[i][k][l][j] + r[i][l][j][k])});
        }
  return worst;
}

double weyl_trace_defect(const CurvaturePacket& c) {
  const int n = c.dim;
  double worst = 0.0;
  // By the pair symmetries every trace reduces to g^{ik} W_{ijkl}.
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) {
      double s = 0.0;
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) s += c.inverse[i][k] * c.weyl[i][j][k][l];
      worst = std::max(worst, std::abs(s));
    }
  return worst;
}

double hodge_split_defect(const CurvaturePacket& c) {
  if (!c.weyl_plus) return 0.0;
  return std::abs(c.weyl_norm2 - c.weyl_plus_norm2 - c.weyl_minus_norm2);
}

double sigma2_defect(const CurvaturePacket& c) {
  return std::abs(c.sigma2 - c.sigma2_from_eigenvalues);
}

}  // namespace cce
