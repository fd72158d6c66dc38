#pragma once

#include <cmath>

namespace cce {

/// Hyper-dual number a + b·e1 + c·e2 + d·e1e2 with e1² = e2² = 0.
///
/// Evaluating a smooth function at x + e1·u + e2·v yields the value, the two
/// directional derivatives and the mixed second derivative D²f(u, v) without
/// truncation error. This is how metric closures deliver exact first and
/// second partial derivatives to the curvature engine.
struct HyperDual {
  double v = 0.0;   // value
  double e1 = 0.0;  // d/du
  double e2 = 0.0;  // d/dv
  double e12 = 0.0; // d²/dudv

  constexpr HyperDual() = default;
  constexpr HyperDual(double value) : v(value) {}  // NOLINT(implicit)
  constexpr HyperDual(double value, double d1, double d2, double d12)
      : v(value), e1(d1), e2(d2), e12(d12) {}

  constexpr HyperDual& operator+=(const HyperDual& o) {
    v += o.v; e1 += o.e1; e2 += o.e2; e12 += o.e12;
    return *this;
  }
  constexpr HyperDual& operator-=(const HyperDual& o) {
    v -= o.v; e1 -= o.e1; e2 -= o.e2; e12 -= o.e12;
    return *this;
  }
  constexpr HyperDual& operator*=(const HyperDual& o) {
    *this = HyperDual(v * o.v, v * o.e1 + e1 * o.v, v * o.e2 + e2 * o.v,
                      v * o.e12 + e1 * o.e2 + e2 * o.e1 + e12 * o.v);
    return *this;
  }
  HyperDual& operator/=(const HyperDual& o);
};

/// Apply a scalar function given its value and first two derivatives at x.v.
constexpr HyperDual lift(const HyperDual& x, double f, double df, double d2f) {
  return {f, df * x.e1, df * x.e2, df * x.e12 + d2f * x.e1 * x.e2};
}

constexpr HyperDual operator-(const HyperDual& a) {
  return {-a.v, -a.e1, -a.e2, -a.e12};
}
constexpr HyperDual operator+(HyperDual a, const HyperDual& b) { return a += b; }
constexpr HyperDual operator-(HyperDual a, const HyperDual& b) { return a -= b; }
constexpr HyperDual operator*(HyperDual a, const HyperDual& b) { return a *= b; }

inline HyperDual inverse(const HyperDual& a) {
  const double r = 1.0 / a.v;
  return lift(a, r, -r * r, 2.0 * r * r * r);
}
inline HyperDual& HyperDual::operator/=(const HyperDual& o) {
  return *this *= inverse(o);
}
inline HyperDual operator/(const HyperDual& a, const HyperDual& b) {
  return a * inverse(b);
}

constexpr bool operator<(const HyperDual& a, const HyperDual& b) { return a.v < b.v; }
constexpr bool operator>(const HyperDual& a, const HyperDual& b) { return a.v > b.v; }

inline HyperDual sqrt(const HyperDual& a) {
  const double r = std::sqrt(a.v);
  return lift(a, r, 0.5 / r, -0.25 / (r * a.v));
}
inline HyperDual exp(const HyperDual& a) {
  const double e = std::exp(a.v);
  return lift(a, e, e, e);
}
inline HyperDual log(const HyperDual& a) {
  return lift(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v));
}
inline HyperDual sin(const HyperDual& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return lift(a, s, c, -s);
}
inline HyperDual cos(const HyperDual& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return lift(a, c, -s, -c);
}
inline HyperDual sinh(const HyperDual& a) {
  const double s = std::sinh(a.v), c = std::cosh(a.v);
  return lift(a, s, c, s);
}
inline HyperDual cosh(const HyperDual& a) {
  const double s = std::sinh(a.v), c = std::cosh(a.v);
  return lift(a, c, s, c);
}
inline HyperDual pow(const HyperDual& a, double p) {
  const double f = std::pow(a.v, p);
  return lift(a, f, p * f / a.v, p * (p - 1.0) * f / (a.v * a.v));
}

/// Overloads used by templated metric closures so the same source serves
/// plain doubles and hyper-dual numbers.
inline double value_of(double x) { return x; }
inline double value_of(const HyperDual& x) { return x.v; }

}  // namespace cce
