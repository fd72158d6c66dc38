#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cce/gb_invariants.hpp"

namespace cce {

enum class Verdict { Pass, Fail, Boundary, NotApplicable };

std::string_view to_string(Verdict v);

/// One inequality evaluated on the inputs. margin = value - threshold for
/// lower bounds and threshold - value for upper bounds, so a positive margin
/// always means the inequality holds.
struct Check {
  std::string name;
  std::string relation;  // "value > threshold", "value <= threshold", ...
  double value = 0.0;
  double threshold = 0.0;
  double margin = 0.0;
  Verdict verdict = Verdict::NotApplicable;
};

struct TopologyOptions {
  /// Strict inequalities within this absolute margin get Verdict::Boundary.
  double tolerance = 1e-9;
  /// Largest |8π²χ - ¼∫|W|² - 6V| / (8π² max(1, |χ|)) accepted as consistent.
  double consistency_tolerance = 1e-3;
};

/// V ≤ 4π²/3 for positive conformal infinity (non-strict; equality is the
/// rigid case of hyperbolic space).
Check volume_upper_bound(double V, bool yamabe_positive, const TopologyOptions& opt = {});

/// V > (4π²/9) χ(X): sufficient for X to be a ball up to a finite cover.
Check ball_homeomorphism_criterion(int chi, double V, bool yamabe_positive,
                                   const TopologyOptions& opt = {});

/// V > (2π²/3) χ(X): sufficient for X to be diffeomorphic to the ball.
Check ball_diffeomorphism_criterion(int chi, double V, bool yamabe_positive,
                                    const TopologyOptions& opt = {});

/// The doubled form of the diffeomorphism criterion: ¼∫_Y|W|² < ∫_Y σ₂ with
/// ∫_Y|W|² = 2∫_X|W|² and ∫_Y σ₂ = 12V.
Check doubled_weyl_criterion(double weyl_energy_X, double V, const TopologyOptions& opt = {});

struct HomologyChecks {
  Check self_dual;       // ¼∫|W⁺|² < ∫σ₂
  Check anti_self_dual;  // ¼∫|W⁻|² < ∫σ₂
  Check total;           // ¼∫|W|²  < 2∫σ₂
  /// `total` recomputed with ∫σ₂ = 8π²χ(Y) - ¼∫|W|²; agreement of the two
  /// verdicts is the arithmetic form of their equivalence.
  Check total_via_euler;
  bool equivalent = false;
};

/// Vanishing criteria for the (anti-)self-dual second homology of a closed Y.
HomologyChecks homology_criteria(const IntegralSuite& closed_Y, int chi_Y,
                                 const TopologyOptions& opt = {});

/// k ≥ 0 in [k_min, k_max] with 2χ + 3τ > (2/3)χ for χ = 2 + 2k, τ = -2k,
/// decided in exact integer arithmetic.
std::vector<int> betti_parity_argument(int k_min = 0, int k_max = 100);

/// min over the points of σ₂ - ¼|W|², reported informationally.
double pinching_margin(const MetricField& g, const std::vector<Point>& points);

struct TopologyInputs {
  int chi_X = 1;
  double V = 0.0;
  double weyl_energy = 0.0;  // ∫_X |W|²
  bool yamabe_positive = false;
  /// Optional closed-double suite for the homology criteria.
  std::optional<IntegralSuite> double_suite;
};

struct Conclusion {
  std::string statement;
  std::vector<std::string> premises;  // names of checks, all passing
};

struct TopologyReport {
  TopologyInputs inputs;
  double consistency_residual = 0.0;  // 8π²χ - ¼∫|W|² - 6V
  bool consistent = true;
  std::vector<Check> checks;
  std::vector<Conclusion> conclusions;
  std::vector<std::string> notes;

  const Check* find(std::string_view name) const;
};

TopologyReport topology_report(const TopologyInputs& in, const TopologyOptions& opt = {});

/// Key-value rendering: one `check.<name>.<field> = value` line per field,
/// then conclusions and notes.
std::string render(const TopologyReport& r);

}  // namespace cce
