#pragma once

#include <functional>
#include <string>

#include "cce/hyperdual.hpp"
#include "cce/tensor.hpp"

namespace cce {

/// Metric coefficients as a function of chart coordinates. Closures are
/// evaluated on hyper-dual coordinates so derivatives are exact; plain values
/// are obtained by passing coordinates with vanishing infinitesimal parts.
using MetricClosure = std::function<Mat<HyperDual>(const Vec<HyperDual>&)>;
using ScalarClosure = std::function<HyperDual(const Vec<HyperDual>&)>;

/// Chart metadata: the open coordinate region where evaluation is allowed.
/// Coordinate singularities (poles, axes, horizons) lie outside it.
using ChartDomain = std::function<bool(const Point&)>;

enum class DerivativeScheme { AnalyticClosure, CentralDifference };

struct CentralDifference {
  double step = 1e-4;
  int richardson_levels = 2;
  /// Largest tolerated change between the last two Richardson levels,
  /// relative to max(1, |derivative|).
  double tolerance = 1e-4;
};

/// g, ∂_k g_ij and ∂_k ∂_l g_ij at one point.
struct MetricJet {
  int dim = 0;
  Matrix g{};
  Rank3 dg{};   // [k][i][j]
  Rank4 ddg{};  // [k][l][i][j]
};

class MetricField {
 public:
  MetricField() = default;
  MetricField(int dim, MetricClosure closure, ChartDomain domain = {},
              std::string label = {});

  int dim() const noexcept { return dim_; }
  const std::string& label() const noexcept { return label_; }
  DerivativeScheme scheme() const noexcept { return scheme_; }
  const CentralDifference& difference_settings() const noexcept { return fd_; }
  const MetricClosure& closure() const noexcept { return closure_; }

  /// Same metric, derivatives by Richardson-extrapolated central differences.
  MetricField with_central_differences(CentralDifference fd = {}) const;
  MetricField with_analytic_derivatives() const;

  bool contains(const Point& p) const;

  /// Symmetric coefficient matrix at p. Throws DomainError outside the chart,
  /// SingularMetric / NonPositiveMetric when the leading minors fail.
  Matrix metric(const Point& p) const;

  MetricJet jet(const Point& p) const;

 private:
  Mat<HyperDual> evaluate(const Vec<HyperDual>& x) const;
  Matrix evaluate_values(const Point& p) const;
  MetricJet analytic_jet(const Point& p) const;
  MetricJet difference_jet(const Point& p) const;

  int dim_ = 0;
  MetricClosure closure_;
  ChartDomain domain_;
  std::string label_;
  DerivativeScheme scheme_ = DerivativeScheme::AnalyticClosure;
  CentralDifference fd_{};
};

/// e^{2w} g for a scalar closure w on the same chart.
MetricField conformal_rescale(const MetricField& g, ScalarClosure w);

/// Throws unless all leading principal minors of the dim×dim block are
/// positive.
void require_positive_definite(const Matrix& g, int dim);

Matrix invert(const Matrix& g, int dim);

}  // namespace cce
