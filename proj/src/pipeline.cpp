#include "cce/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cce/curvature.hpp"
#include "cce/error.hpp"
#include "json.hpp"

namespace cce {
namespace {

constexpr const char* kModule = "pipeline";
constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

[[noreturn]] void parse_error(const std::string& what) {
  throw Error(ErrorKind::ParseError, kModule, what);
}

void gate(AnalysisResult& r, std::string name, double value, double tolerance) {
  const bool pass = std::isfinite(value) && value <= tolerance;
  r.report.add("gate." + name + ".value", value);
  r.report.add("gate." + name + ".tolerance", tolerance);
  r.report.add("gate." + name + ".pass", std::string(pass ? "true" : "false"));
  r.gates.push_back({std::move(name), value, tolerance, pass});
}

void flag_gate(AnalysisResult& r, std::string name, bool pass) {
  r.report.add("gate." + name + ".pass", std::string(pass ? "true" : "false"));
  r.gates.push_back({std::move(name), pass ? 0.0 : 1.0, 0.0, pass});
}

void add_suite(KeyValues& kv, const std::string& prefix, const IntegralSuite& s) {
  kv.add(prefix + ".domain", std::string(to_string(s.domain)));
  kv.add(prefix + ".volume", s.volume);
  kv.add(prefix + ".weyl_energy", s.weyl_energy);
  kv.add(prefix + ".weyl_plus", s.weyl_plus);
  kv.add(prefix + ".weyl_minus", s.weyl_minus);
  kv.add(prefix + ".sigma2", s.sigma2_integral);
  kv.add(prefix + ".euler", s.euler_gb);
  kv.add(prefix + ".signature", s.signature);
  kv.add(prefix + ".evaluations", s.evaluations);
}

// Scale-free identity defects at one point. The fault hook perturbs R_0123
// alone, breaking the pair symmetry R_0123 = R_2301.
void curvature_stage(AnalysisResult& r, const RunConfig& cfg, const std::string& prefix,
                     const MetricField& g, const Point& p, bool check_einstein) {
  CurvaturePacket c = curvature(g, p);
  if (cfg.inject_riemann_fault) c.riemann[0][1][2][3] += 1e-3;
  double size = 1.0;
  for (int i = 0; i < c.dim; ++i)
    for (int j = 0; j < c.dim; ++j)
      for (int k = 0; k < c.dim; ++k)
        for (int l = 0; l < c.dim; ++l) size = std::max(size, std::abs(c.riemann[i][j][k][l]));
  r.report.add(prefix + ".scalar", c.scalar);
  r.report.add(prefix + ".sigma2", c.sigma2);
  r.report.add(prefix + ".weyl_norm2", c.weyl_norm2);
  r.report.add(prefix + ".weyl_plus_norm2", c.weyl_plus_norm2);
  r.report.add(prefix + ".weyl_minus_norm2", c.weyl_minus_norm2);
  gate(r, prefix + ".bianchi", bianchi_defect(c.riemann, c.dim) / size, cfg.identity_tolerance);
  gate(r, prefix + ".weyl_trace", weyl_trace_defect(c) / size, cfg.identity_tolerance);
  gate(r, prefix + ".hodge_split", hodge_split_defect(c) / (size * size), cfg.identity_tolerance);
  gate(r, prefix + ".sigma2_forms", sigma2_defect(c) / (size * size), cfg.identity_tolerance);
  const double er = einstein_residual(c, 3);
  if (check_einstein) {
    gate(r, prefix + ".einstein", er, cfg.einstein_tolerance);
  } else {
    r.report.add(prefix + ".einstein_residual", er);
  }
}

void volume_stage(AnalysisResult& r, const RunConfig& cfg, const FGMetric& fg) {
  const std::vector<double> ladder = cfg.ladder.empty() ? default_volume_ladder() : cfg.ladder;
  const VolumeFit fit = fit_renormalized_volume(fg, ladder, cfg.volume);
  r.report.add("volume.V", fit.V);
  r.report.add("volume.c0", fit.c0);
  r.report.add("volume.c2", fit.c2);
  r.report.add("volume.boundary_volume", fit.boundary_volume);
  r.report.add("volume.residual", fit.residual);
  r.report.add("volume.condition_number", fit.condition_number);
  r.report.add("volume.stability_delta", fit.stability_delta);
  r.report.add("volume.rungs", static_cast<long>(fit.epsilons.size()));
  gate(r, "volume.c0_defect", fit.c0_defect, cfg.volume.tol_fit);
  r.volume = fit;
}

void compactify_stage(AnalysisResult& r, const RunConfig& cfg, const FGMetric& fg) {
  const EigenfunctionSolution sol = solve_eigenfunction(fg, cfg.eigenfunction);
  const CompactificationReport rep = compactification_checks(sol, fg, cfg.compactify_tolerance);
  r.report.add("eigenfunction.w2", sol.w2);
  r.report.add("eigenfunction.boundary_scalar_hat", sol.scalar_curvature);
  r.report.add("eigenfunction.pde_residual", sol.pde_residual);
  r.report.add("eigenfunction.asymptotic_residual", sol.asymptotic_residual);
  r.report.add("compactify.boundary_scalar", rep.boundary_scalar);
  r.report.add("compactify.min_scalar_gap", rep.min_scalar_gap);
  r.report.add("compactify.scalar_crosscheck", rep.scalar_crosscheck);
  gate(r, "compactify.second_fundamental_form", rep.second_fundamental_form, rep.tolerance);
  gate(r, "compactify.scalar_bound", std::max(0.0, -rep.min_scalar_gap), rep.tolerance);
  gate(r, "compactify.bochner", rep.bochner_residual, rep.tolerance);
  r.eigenfunction = sol;
  r.compactification = rep;
}

std::string csv_path(const RunConfig& cfg, const char* name) {
  return (std::filesystem::path(cfg.output_dir) / name).string();
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

void validate(const RunConfig& cfg) {
  const std::pair<const char*, double> tols[] = {
      {"tol-quadrature", cfg.volume.tol_quadrature},
      {"tol-fit", cfg.volume.tol_fit},
      {"quadrature tolerance", cfg.quadrature.tolerance},
      {"identity tolerance", cfg.identity_tolerance},
      {"einstein tolerance", cfg.einstein_tolerance},
      {"compactify tolerance", cfg.compactify_tolerance},
      {"consistency tolerance", cfg.consistency_tolerance},
      {"topology tolerance", cfg.topology.tolerance},
  };
  for (const auto& [name, v] : tols) {
    if (!(v > 0.0) || !std::isfinite(v)) parse_error(std::string(name) + " must be positive");
  }
  for (std::size_t i = 0; i < cfg.ladder.size(); ++i) {
    if (!(cfg.ladder[i] > 0.0)) parse_error("ladder rungs must be positive");
    if (i > 0 && !(cfg.ladder[i] < cfg.ladder[i - 1]))
      parse_error("ladder must be strictly decreasing");
  }
  if (!cfg.ladder.empty() && cfg.ladder.size() < 3) parse_error("ladder needs at least 3 rungs");
  if (cfg.eigenfunction.intervals < 8) parse_error("eigenfunction intervals must be >= 8");
}

std::vector<double> parse_ladder(std::string_view text) {
  std::vector<double> out;
  while (!text.empty()) {
    const std::size_t comma = text.find(',');
    std::string item(text.substr(0, comma));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      parse_error("bad ladder entry '" + item + "'");
    }
    if (used != item.size()) parse_error("bad ladder entry '" + item + "'");
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

void merge_config_json(RunConfig& cfg, std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
    if (auto m = doc.find("model"); m != doc.end()) {
      if (m->contains("family"))
        cfg.model.family = models::family_from_string(m->at("family").get<std::string>());
      if (m->contains("m")) cfg.model.mass = m->at("m").get<double>();
      if (m->contains("mass")) cfg.model.mass = m->at("mass").get<double>();
      if (m->contains("amplitude")) cfg.model.amplitude = m->at("amplitude").get<double>();
      if (m->contains("profile"))
        cfg.model.profile = models::profile_from_string(m->at("profile").get<std::string>());
      if (m->contains("boundary_scale"))
        cfg.model.boundary_scale = m->at("boundary_scale").get<double>();
      if (m->contains("epsilon")) cfg.model.epsilon = m->at("epsilon").get<double>();
    }
    if (auto n = doc.find("numerics"); n != doc.end()) {
      if (n->contains("ladder")) cfg.ladder = n->at("ladder").get<std::vector<double>>();
      if (n->contains("tol_quadrature"))
        cfg.volume.tol_quadrature = n->at("tol_quadrature").get<double>();
      if (n->contains("tol_fit")) cfg.volume.tol_fit = n->at("tol_fit").get<double>();
      if (n->contains("tol_integrals"))
        cfg.quadrature.tolerance = n->at("tol_integrals").get<double>();
      if (n->contains("intervals"))
        cfg.eigenfunction.intervals = n->at("intervals").get<int>();
      if (n->contains("threads")) cfg.quadrature.threads = n->at("threads").get<int>();
      if (n->contains("collar_panels"))
        cfg.quadrature.collar_panels = n->at("collar_panels").get<int>();
    }
    if (auto o = doc.find("outputs"); o != doc.end()) {
      if (o->contains("dir")) cfg.output_dir = o->at("dir").get<std::string>();
      if (o->contains("report")) cfg.write_report = o->at("report").get<bool>();
      if (o->contains("tables")) cfg.write_tables = o->at("tables").get<bool>();
    }
  } catch (const nlohmann::json::exception& e) {
    parse_error(std::string("config: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Records

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void KeyValues::add(std::string key, double value) {
  entries_.emplace_back(std::move(key), format_number(value));
}
void KeyValues::add(std::string key, long value) {
  entries_.emplace_back(std::move(key), std::to_string(value));
}
void KeyValues::add(std::string key, std::string value) {
  entries_.emplace_back(std::move(key), std::move(value));
}

std::optional<std::string> KeyValues::get(std::string_view key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return v;
  return std::nullopt;
}

void KeyValues::write(std::ostream& os) const {
  for (const auto& [k, v] : entries_) os << k << " = " << v << "\n";
}

bool AnalysisResult::ok() const {
  return std::all_of(gates.begin(), gates.end(), [](const Gate& g) { return g.pass; });
}

// ---------------------------------------------------------------------------
// Runs

AnalysisResult run_analysis(const RunConfig& cfg) {
  validate(cfg);
  AnalysisResult r;
  r.model = models::instantiate(cfg.model);
  const models::ModelInstance& m = r.model;
  r.report.add("model.family", std::string(models::to_string(m.spec.family)));
  if (m.spec.family == models::Family::AdsSchwarzschild) {
    r.report.add("model.mass", m.spec.mass);
    r.report.add("model.horizon_radius", m.horizon_radius);
    r.report.add("model.period", m.period);
  }
  if (m.spec.family == models::Family::PerturbedHyperbolic)
    r.report.add("model.amplitude", m.spec.amplitude);
  r.report.add("model.einstein", std::string(m.flags.einstein ? "true" : "false"));
  r.report.add("model.yamabe_positive", std::string(m.flags.yamabe_positive ? "true" : "false"));
  if (m.flags.chi) r.report.add("model.chi", static_cast<long>(*m.flags.chi));
  if (!m.boundary_description.empty()) r.report.add("model.boundary", m.boundary_description);

  // Closed models are Einstein with positive constant, so Rc + 3g is gated
  // only on fillings.
  curvature_stage(r, cfg, "curvature", m.metric, m.sample_point, m.flags.conformally_compact);

  if (m.closed) {
    const IntegralSuite s = integrate_closed(m.metric, *m.closed, cfg.quadrature);
    add_suite(r.report, "integrals", s);
    if (m.flags.chi && m.flags.tau) {
      const auto [a, b] = combined_formulas(s, *m.flags.chi, *m.flags.tau);
      const double scale = 8.0 * kPi2 * std::max(1, std::abs(*m.flags.chi));
      gate(r, "integrals.euler_vs_topology", std::abs(s.euler_gb - *m.flags.chi), 1e-6);
      gate(r, "integrals.combined_plus", std::abs(a) / scale, 1e-6);
      gate(r, "integrals.combined_minus", std::abs(b) / scale, 1e-6);
    }
    r.integrals = s;
    return r;
  }
  if (!m.fg) return r;

  const FGMetric& fg = *m.fg;
  if (m.flags.einstein) {
    volume_stage(r, cfg, fg);
  } else {
    // Without the Einstein condition the expansion has extra powers and the
    // fit may legitimately refuse; record that and keep going.
    try {
      volume_stage(r, cfg, fg);
    } catch (const Error& e) {
      r.report.add("volume.error", std::string(e.what()));
    }
  }
  compactify_stage(r, cfg, fg);

  const MetricField cg = compactified_metric(*r.eigenfunction, fg);
  const bool geodesic = r.compactification->geodesic_boundary;
  const IntegralSuite x = integrate_collar(cg, fg, geodesic, cfg.quadrature, false);
  add_suite(r.report, "integrals", x);
  r.integrals = x;

  if (!m.flags.einstein || !m.flags.chi || !r.volume) {
    r.report.add("topology.note",
                 std::string("filling is not Einstein: no topology conclusions are drawn"));
    return r;
  }
  const int chi = *m.flags.chi;
  const double V = r.volume->V;
  const double scale = 8.0 * kPi2 * std::max(1, std::abs(chi));
  const double residual = anderson_identity_residual(chi, x.weyl_energy, V);
  r.report.add("identity.euler_residual", residual);
  gate(r, "identity.euler_relative", std::abs(residual) / scale, cfg.consistency_tolerance);
  const Sigma2Bridge br = sigma2_volume_bridge(x, chi, V);
  r.report.add("identity.sigma2_direct", br.direct);
  r.report.add("identity.six_V", br.six_V);
  r.report.add("identity.sigma2_from_euler", br.from_euler);

  TopologyInputs in;
  in.chi_X = chi;
  in.V = V;
  in.weyl_energy = x.weyl_energy;
  in.yamabe_positive = m.flags.yamabe_positive;
  if (geodesic) {
    r.double_integrals = double_across_boundary(x);
    add_suite(r.report, "double", *r.double_integrals);
    in.double_suite = r.double_integrals;
  }
  TopologyOptions topt = cfg.topology;
  topt.consistency_tolerance = cfg.consistency_tolerance;
  r.topology = topology_report(in, topt);
  std::istringstream lines(render(*r.topology));
  for (std::string line; std::getline(lines, line);) {
    const std::size_t eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq);
    if (key.rfind("input.", 0) == 0) continue;  // already in model.* and volume.*
    r.report.add("topology." + key, line.substr(eq + 3));
  }
  return r;
}

AnalysisResult run_volume(const RunConfig& cfg) {
  validate(cfg);
  AnalysisResult r;
  r.model = models::instantiate(cfg.model);
  r.report.add("model.family", std::string(models::to_string(r.model.spec.family)));
  if (!r.model.fg) {
    throw Error(ErrorKind::NotAvailable, kModule, "volume fit needs a conformally compact model");
  }
  volume_stage(r, cfg, *r.model.fg);
  return r;
}

KeyValues curvature_dump(const RunConfig& cfg, const std::optional<Point>& p) {
  validate(cfg);
  const models::ModelInstance m = models::instantiate(cfg.model);
  const Point at = p.value_or(m.sample_point);
  AnalysisResult r;
  r.report.add("model.family", std::string(models::to_string(m.spec.family)));
  for (int i = 0; i < m.metric.dim(); ++i) r.report.add("point." + std::to_string(i), at[i]);
  curvature_stage(r, cfg, "curvature", m.metric, at, false);
  const CurvaturePacket c = curvature(m.metric, at);
  for (int i = 0; i < c.dim; ++i)
    for (int j = i; j < c.dim; ++j)
      r.report.add("ricci." + std::to_string(i) + std::to_string(j), c.ricci[i][j]);
  return r.report;
}

AnalysisResult run_checks(const RunConfig& cfg, const std::vector<models::Family>& families) {
  validate(cfg);
  AnalysisResult r;
  for (models::Family f : families) {
    models::ModelSpec spec = cfg.model;
    spec.family = f;
    // The non-Einstein control needs an amplitude that actually perturbs.
    if (f == models::Family::PerturbedHyperbolic && spec.amplitude == 0.0) spec.amplitude = 0.5;
    const models::ModelInstance m = models::instantiate(spec);
    const std::string name(models::to_string(f));
    curvature_stage(r, cfg, name + ".curvature", m.metric, m.sample_point, false);

    if (m.fg) {
      const EigenfunctionSolution sol = solve_eigenfunction(*m.fg, cfg.eigenfunction);
      const CompactificationReport rep =
          compactification_checks(sol, *m.fg, cfg.compactify_tolerance);
      const double er = einstein_residual(m.metric, m.sample_point, 3);
      if (m.flags.einstein) {
        gate(r, name + ".einstein", er, cfg.einstein_tolerance);
        gate(r, name + ".bochner", rep.bochner_residual, rep.tolerance);
      } else {
        r.report.add(name + ".einstein_residual", er);
        r.report.add(name + ".bochner_residual", rep.bochner_residual);
        flag_gate(r, name + ".negative_control", er > cfg.einstein_tolerance && !rep.bochner);
      }
    }
    if (m.closed && m.flags.chi && m.flags.tau) {
      QuadratureSpec q = cfg.quadrature;
      if (f == models::Family::WarpedTorusClosed) q.tolerance = std::max(q.tolerance, 1e-1);
      const IntegralSuite s = integrate_closed(m.metric, *m.closed, q);
      const auto [a, b] = combined_formulas(s, *m.flags.chi, *m.flags.tau);
      const double scale = 8.0 * kPi2 * std::max(1, std::abs(*m.flags.chi));
      gate(r, name + ".combined_plus", std::abs(a) / scale, 1e-6);
      gate(r, name + ".combined_minus", std::abs(b) / scale, 1e-6);

      if (f == models::Family::ProductS2xS2Closed) {
        QuadratureSpec qc = q;
        qc.panels = 2;
        const IntegralSuite base = integrate_closed(m.metric, *m.closed, qc);
        const ScalarClosure w = [](const Vec<HyperDual>& x) {
          const HyperDual z1 = cos(x[0]), z2 = cos(x[2]);
          return 0.2 * z1 - 0.15 * z2 + 0.1 * z1 * z2;
        };
        const IntegralSuite s2 = integrate_closed(conformal_rescale(m.metric, w), *m.closed, qc);
        gate(r, name + ".conformal_weyl",
             std::abs(s2.weyl_energy - base.weyl_energy) / base.weyl_energy, 1e-6);
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Artifacts

void write_integrals_csv(std::ostream& os, const IntegralSuite& s) {
  os << "# cce-csv v1 integrals " << to_string(s.domain) << "\n";
  os << "quantity,value,error\n";
  auto row = [&](const char* name, double v, double e) {
    os << name << "," << format_number(v) << "," << format_number(e) << "\n";
  };
  row("volume", s.volume, s.volume_error);
  row("weyl_energy", s.weyl_energy, s.weyl_energy_error);
  row("weyl_plus", s.weyl_plus, s.weyl_plus_error);
  row("weyl_minus", s.weyl_minus, s.weyl_minus_error);
  row("sigma2", s.sigma2_integral, s.sigma2_error);
  row("euler", s.euler_gb, s.sigma2_error / (8.0 * kPi2));
  row("signature", s.signature, (s.weyl_plus_error + s.weyl_minus_error) / (48.0 * kPi2));
}

void write_artifacts(const RunConfig& cfg, const AnalysisResult& r) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) {
    throw Error(ErrorKind::DomainError, kModule,
                "cannot create output directory " + cfg.output_dir + ": " + ec.message());
  }
  auto open = [&](const char* name) {
    std::ofstream os(csv_path(cfg, name));
    if (!os) throw Error(ErrorKind::DomainError, kModule, std::string("cannot write ") + name);
    return os;
  };
  if (cfg.write_report) {
    std::ofstream os = open("report.txt");
    os << "# cce-report v1\n";
    r.report.write(os);
  }
  if (!cfg.write_tables) return;
  if (r.volume) {
    std::ofstream os = open("volume.csv");
    write_volume_csv(os, *r.volume);
  }
  if (r.eigenfunction && r.model.fg) {
    std::ofstream os = open("eigenfunction.csv");
    write_eigenfunction_csv(os, *r.eigenfunction, *r.model.fg);
  }
  if (r.integrals) {
    std::ofstream os = open("integrals.csv");
    write_integrals_csv(os, *r.integrals);
  }
  if (r.double_integrals) {
    std::ofstream os = open("double_integrals.csv");
    write_integrals_csv(os, *r.double_integrals);
  }
  if (r.topology) {
    std::ofstream os = open("topology.txt");
    os << render(*r.topology);
  }
}

std::string summary(const AnalysisResult& r) {
  std::ostringstream os;
  auto show = [&](const char* label, const char* key) {
    if (auto v = r.report.get(key)) os << "  " << label << ": " << *v << "\n";
  };
  os << "model " << models::to_string(r.model.spec.family) << "\n";
  show("renormalized volume V", "volume.V");
  show("Weyl energy", "integrals.weyl_energy");
  show("sigma2 integral", "integrals.sigma2");
  show("Euler characteristic", "integrals.euler");
  show("signature", "integrals.signature");
  show("Euler identity residual", "identity.euler_residual");
  if (r.topology) {
    for (const Check& c : r.topology->checks)
      os << "  check " << c.name << ": " << to_string(c.verdict)
         << " (margin " << format_number(c.margin) << ")\n";
    for (const Conclusion& c : r.topology->conclusions) os << "  => " << c.statement << "\n";
    for (const std::string& n : r.topology->notes) os << "  note: " << n << "\n";
  }
  std::size_t failed = 0;
  for (const Gate& g : r.gates) {
    if (!g.pass) {
      ++failed;
      os << "  gate FAILED " << g.name << ": " << format_number(g.value) << " > "
         << format_number(g.tolerance) << "\n";
    }
  }
  os << "  gates: " << r.gates.size() - failed << "/" << r.gates.size() << " pass\n";
  return os.str();
}

}  // namespace cce
