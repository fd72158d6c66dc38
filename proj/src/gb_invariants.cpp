#include "cce/gb_invariants.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "cce/curvature.hpp"
#include "cce/error.hpp"

namespace cce {
namespace {

constexpr const char* kModule = "gb_invariants";
constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

struct Rule {
  std::vector<double> x;
  std::vector<double> w;
};

Rule gauss_legendre(int order, double a, double b, int panels) {
  std::vector<double> t, tw;
  for (double z : boost::math::legendre_p_zeros<double>(order)) {
    const double d = boost::math::legendre_p_prime(order, z);
    const double wz = 2.0 / ((1.0 - z * z) * d * d);
    t.push_back(z);
    tw.push_back(wz);
    if (z != 0.0) {
      t.push_back(-z);
      tw.push_back(wz);
    }
  }
  Rule r;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    for (std::size_t i = 0; i < t.size(); ++i) {
      r.x.push_back(lo + 0.5 * h * (t[i] + 1.0));
      r.w.push_back(0.5 * h * tw[i]);
    }
  }
  return r;
}

Rule axis_rule(const models::ClosedDomain& box, int axis, const QuadratureSpec& q, int refine) {
  const double a = box.lower[axis], b = box.upper[axis];
  if (box.cyclic[axis]) return {{0.5 * (a + b)}, {b - a}};
  if (box.periodic[axis]) {
    const int m = q.periodic_points * refine;
    Rule r;
    // Offset by half a step keeps nodes off the chart seam.
    for (int k = 0; k < m; ++k) {
      r.x.push_back(a + (k + 0.5) * (b - a) / m);
      r.w.push_back((b - a) / m);
    }
    return r;
  }
  return gauss_legendre(q.order, a, b, q.panels * refine);
}

// Densities in the order volume, |W|², |W⁺|², |W⁻|², σ₂; each already
// multiplied by sqrt det g.
using Sample = std::array<double, 5>;

Sample sample(const MetricField& g, const Point& p, int orientation) {
  const CurvaturePacket c = curvature(g, p, orientation);
  Eigen::Matrix4d m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = c.metric[i][j];
  const double vol = std::sqrt(m.determinant());
  return {vol, vol * c.weyl_norm2, vol * c.weyl_plus_norm2, vol * c.weyl_minus_norm2,
          vol * c.sigma2};
}

// Evaluates f at every index in parallel, then reduces in index order so the
// result does not depend on the thread count.
template <class F>
Sample reduce(long count, int threads, F&& f) {
  std::vector<Sample> values(count);
  int nt = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  nt = std::clamp(nt, 1, 64);
  nt = static_cast<int>(std::min<long>(nt, std::max<long>(1, count / 64)));
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex guard;
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (long i = t; i < count; i += nt) values[i] = f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(guard);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  Sample total{};
  for (const Sample& v : values)
    for (int k = 0; k < 5; ++k) total[k] += v[k];
  return total;
}

Sample closed_pass(const MetricField& g, const models::ClosedDomain& box,
                   const QuadratureSpec& q, int refine, long& evaluations) {
  std::array<Rule, 4> rules;
  long count = 1;
  for (int a = 0; a < 4; ++a) {
    rules[a] = axis_rule(box, a, q, refine);
    count *= static_cast<long>(rules[a].x.size());
  }
  evaluations += count;
  return reduce(count, q.threads, [&](long idx) {
    Point p{};
    double w = 1.0;
    long rest = idx;
    for (int a = 3; a >= 0; --a) {
      const long n = static_cast<long>(rules[a].x.size());
      const long k = rest % n;
      rest /= n;
      p[a] = rules[a].x[k];
      w *= rules[a].w[k];
    }
    Sample s = sample(g, p, q.orientation);
    for (double& v : s) v *= w;
    return s;
  });
}

IntegralSuite assemble(const Sample& coarse, const Sample& fine, DomainTag tag,
                       const QuadratureSpec& q) {
  IntegralSuite out;
  out.domain = tag;
  out.volume = fine[0];
  out.weyl_energy = fine[1];
  out.weyl_plus = fine[2];
  out.weyl_minus = fine[3];
  out.sigma2_integral = fine[4];
  out.volume_error = std::abs(fine[0] - coarse[0]);
  out.weyl_energy_error = std::abs(fine[1] - coarse[1]);
  out.weyl_plus_error = std::abs(fine[2] - coarse[2]);
  out.weyl_minus_error = std::abs(fine[3] - coarse[3]);
  out.sigma2_error = std::abs(fine[4] - coarse[4]);
  out.euler_gb = (0.25 * out.weyl_energy + out.sigma2_integral) / (8.0 * kPi2);
  out.signature = (out.weyl_plus - out.weyl_minus) / (48.0 * kPi2);
  const double errs[] = {out.volume_error, out.weyl_energy_error, out.weyl_plus_error,
                         out.weyl_minus_error, out.sigma2_error};
  for (int k = 0; k < 5; ++k) {
    if (!(errs[k] <= q.tolerance * std::max(1.0, std::abs(fine[k])))) {
      throw Error(ErrorKind::QuadratureTolerance, kModule,
                  "curvature integral did not settle under mesh doubling (change " +
                      std::to_string(errs[k]) + ")");
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(DomainTag tag) {
  switch (tag) {
    case DomainTag::WithBoundary: return "X-with-boundary";
    case DomainTag::ClosedDouble: return "closed-double";
    case DomainTag::ClosedModel: return "closed-model";
  }
  return "unknown";
}

IntegralSuite integrate_closed(const MetricField& g, const models::ClosedDomain& box,
                               const QuadratureSpec& q) {
  if (g.dim() != 4) {
    throw Error(ErrorKind::UnsupportedDimension, kModule, "curvature integrals need dim 4");
  }
  long evals = 0;
  const Sample coarse = closed_pass(g, box, q, 1, evals);
  const Sample fine = closed_pass(g, box, q, 2, evals);
  IntegralSuite out = assemble(coarse, fine, DomainTag::ClosedModel, q);
  out.evaluations = evals;
  return out;
}

IntegralSuite integrate_collar(const MetricField& g, const FGMetric& fg, bool boundary_geodesic,
                               const QuadratureSpec& q, bool require_euler) {
  if (g.dim() != 4 || fg.n() != 3) {
    throw Error(ErrorKind::UnsupportedDimension, kModule, "curvature integrals need dim 4");
  }
  if (require_euler && !boundary_geodesic) {
    throw Error(ErrorKind::BoundaryNotGeodesic, kModule,
                "Euler integral without boundary term needs a totally geodesic boundary");
  }
  const Point& x = fg.collar().generic_point;
  // sqrt det(Σ T_k)(x) from g_s = Σ b_k² T_k at an interior reference slice.
  const double s_ref = 0.5 * fg.s_max();
  Eigen::Matrix3d gs;
  const Matrix gsm = fg.g_s(s_ref, x);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) gs(i, j) = gsm[i][j];
  const double t_density = std::sqrt(gs.determinant()) / fg.volume_factor(s_ref);
  const double scale = fg.collar().unit_volume / t_density;

  long evals = 0;
  auto pass = [&](int refine) {
    const Rule r = gauss_legendre(q.order, 0.0, fg.s_max(), q.collar_panels * refine);
    evals += static_cast<long>(r.x.size());
    return reduce(static_cast<long>(r.x.size()), q.threads, [&](long i) {
      Sample s = sample(g, make_point({r.x[i], x[0], x[1], x[2]}), q.orientation);
      for (double& v : s) v *= r.w[i] * scale;
      return s;
    });
  };
  const Sample coarse = pass(1);
  const Sample fine = pass(2);
  IntegralSuite out = assemble(coarse, fine, DomainTag::WithBoundary, q);
  out.boundary_geodesic = boundary_geodesic;
  out.evaluations = evals;
  if (!boundary_geodesic) out.euler_gb = std::numeric_limits<double>::quiet_NaN();
  return out;
}

IntegralSuite double_across_boundary(const IntegralSuite& x) {
  if (x.domain != DomainTag::WithBoundary || !x.boundary_geodesic) {
    throw Error(ErrorKind::BoundaryNotGeodesic, kModule,
                "doubling needs X with a totally geodesic boundary");
  }
  IntegralSuite y = x;
  y.domain = DomainTag::ClosedDouble;
  y.volume *= 2.0;
  y.weyl_energy *= 2.0;
  y.sigma2_integral *= 2.0;
  y.weyl_plus = x.weyl_plus + x.weyl_minus;
  y.weyl_minus = x.weyl_minus + x.weyl_plus;
  y.euler_gb = 2.0 * x.euler_gb;
  y.signature = 0.0;
  y.volume_error *= 2.0;
  y.weyl_energy_error *= 2.0;
  y.sigma2_error *= 2.0;
  y.weyl_plus_error = x.weyl_plus_error + x.weyl_minus_error;
  y.weyl_minus_error = y.weyl_plus_error;
  return y;
}

double anderson_identity_residual(int chi, double weyl_energy, double V) {
  return 8.0 * kPi2 * chi - 0.25 * weyl_energy - 6.0 * V;
}

Sigma2Bridge sigma2_volume_bridge(const IntegralSuite& compactified, int chi, double V) {
  Sigma2Bridge b;
  b.direct = compactified.sigma2_integral;
  b.six_V = 6.0 * V;
  b.from_euler = 8.0 * kPi2 * chi - 0.25 * compactified.weyl_energy;
  b.residual = b.direct - b.six_V;
  return b;
}

std::pair<double, double> combined_formulas(const IntegralSuite& s) {
  const double chi = s.euler_gb, tau = s.signature;
  return {4.0 * kPi2 * (2.0 * chi + 3.0 * tau) - 0.5 * s.weyl_plus - s.sigma2_integral,
          4.0 * kPi2 * (2.0 * chi - 3.0 * tau) - 0.5 * s.weyl_minus - s.sigma2_integral};
}

std::pair<double, double> combined_formulas(const IntegralSuite& s, int chi, int tau) {
  IntegralSuite t = s;
  t.euler_gb = chi;
  t.signature = tau;
  return combined_formulas(t);
}

}  // namespace cce
