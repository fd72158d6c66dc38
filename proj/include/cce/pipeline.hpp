#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cce/compactify.hpp"
#include "cce/gb_invariants.hpp"
#include "cce/models.hpp"
#include "cce/topology.hpp"
#include "cce/volume_renorm.hpp"

namespace cce {

struct RunConfig {
  models::ModelSpec model;
  /// Empty means the default ladder.
  std::vector<double> ladder;
  VolumeOptions volume;
  QuadratureSpec quadrature;
  EigenfunctionOptions eigenfunction;
  TopologyOptions topology;
  double identity_tolerance = 1e-8;   // Bianchi, Weyl traces, Hodge split, σ₂
  double einstein_tolerance = 1e-6;   // ‖Rc + 3g‖ on Einstein fillings
  double compactify_tolerance = 1e-4;
  double consistency_tolerance = 1e-3;  // relative Euler-identity residual
  std::string output_dir = "cce-out";
  bool write_report = true;
  bool write_tables = true;
  /// Negative control: perturbs one Riemann component before the symmetry check.
  bool inject_riemann_fault = false;
};

/// Throws ParseError on bad values: non-positive tolerances, a ladder that is
/// not strictly decreasing and positive.
void validate(const RunConfig& cfg);

/// Reads the sections model / numerics / outputs of a JSON document into cfg.
/// Absent keys keep their current values.
void merge_config_json(RunConfig& cfg, std::string_view text);

/// Comma-separated decimals, e.g. "0.2,0.1,0.05".
std::vector<double> parse_ladder(std::string_view text);

struct Gate {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Ordered key-value record; rendered as `key = value` lines.
class KeyValues {
 public:
  void add(std::string key, double value);
  void add(std::string key, long value);
  void add(std::string key, std::string value);
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  std::optional<std::string> get(std::string_view key) const;
  void write(std::ostream& os) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// %.17g: round-trips doubles exactly.
std::string format_number(double x);

struct AnalysisResult {
  models::ModelInstance model;
  std::vector<Gate> gates;
  KeyValues report;
  std::optional<VolumeFit> volume;
  std::optional<EigenfunctionSolution> eigenfunction;
  std::optional<CompactificationReport> compactification;
  std::optional<IntegralSuite> integrals;
  std::optional<IntegralSuite> double_integrals;
  std::optional<TopologyReport> topology;

  bool ok() const;
};

/// model -> curvature -> volume fit -> compactification -> integrals -> topology.
/// Library errors propagate unchanged.
AnalysisResult run_analysis(const RunConfig& cfg);

/// Volume fit only.
AnalysisResult run_volume(const RunConfig& cfg);

/// Pointwise packet at p (the model's sample point when absent).
KeyValues curvature_dump(const RunConfig& cfg, const std::optional<Point>& p);

/// Invariant suites without the topology layer: curvature identities,
/// Bochner, conformal invariance of the Weyl energy, combined formulas.
/// Runs on the given families; the non-Einstein family is a negative control
/// whose gate passes when its Bochner flag trips.
AnalysisResult run_checks(const RunConfig& cfg, const std::vector<models::Family>& families);

/// Writes report.txt and the CSV tables present in r into cfg.output_dir.
void write_artifacts(const RunConfig& cfg, const AnalysisResult& r);

/// `# cce-csv v1 integrals` then quantity,value,error rows.
void write_integrals_csv(std::ostream& os, const IntegralSuite& s);

/// Short human-readable block; every number is also in report.txt.
std::string summary(const AnalysisResult& r);

}  // namespace cce
