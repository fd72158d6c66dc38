// Batch front end. Exit status: 0 all gates pass, 1 a gate failed or a
// module raised, 2 the command line or configuration did not parse.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "cce/error.hpp"
#include "cce/pipeline.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct Flags {
  std::string config;
  std::string model;
  std::optional<double> mass;
  std::optional<double> amplitude;
  std::string ladder;
  std::optional<double> tol_quadrature;
  std::optional<double> tol_fit;
  std::string out;
  std::optional<int> threads;
  std::string point;
  bool inject_fault = false;
};

cce::RunConfig build_config(const Flags& f) {
  cce::RunConfig cfg;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw cce::Error(cce::ErrorKind::ParseError, "cli", "cannot read " + f.config);
    std::stringstream text;
    text << in.rdbuf();
    cce::merge_config_json(cfg, text.str());
  }
  if (!f.model.empty()) cfg.model.family = cce::models::family_from_string(f.model);
  if (f.mass) cfg.model.mass = *f.mass;
  if (f.amplitude) cfg.model.amplitude = *f.amplitude;
  if (!f.ladder.empty()) cfg.ladder = cce::parse_ladder(f.ladder);
  if (f.tol_quadrature) cfg.volume.tol_quadrature = *f.tol_quadrature;
  if (f.tol_fit) cfg.volume.tol_fit = *f.tol_fit;
  if (!f.out.empty()) cfg.output_dir = f.out;
  if (f.threads) cfg.quadrature.threads = *f.threads;
  cfg.inject_riemann_fault = f.inject_fault;
  cce::validate(cfg);
  return cfg;
}

std::optional<cce::Point> parse_point(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const std::vector<double> xs = cce::parse_ladder(text);
  if (xs.size() != 4) throw cce::Error(cce::ErrorKind::ParseError, "cli", "--point needs 4 values");
  return cce::make_point({xs[0], xs[1], xs[2], xs[3]});
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON run configuration (model, numerics, outputs)");
  sub->add_option("--model", f.model, "model family, e.g. hyperbolic, ads-schwarzschild");
  sub->add_option("--m", f.mass, "AdS-Schwarzschild mass");
  sub->add_option("--amplitude", f.amplitude, "perturbation amplitude");
  sub->add_option("--ladder", f.ladder, "comma-separated decreasing epsilons");
  sub->add_option("--tol-quadrature", f.tol_quadrature, "sublevel-volume quadrature tolerance");
  sub->add_option("--tol-fit", f.tol_fit, "volume regression tolerance");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--threads", f.threads, "quadrature threads, 0 = hardware");
  sub->add_flag("--inject-fault", f.inject_fault,
                "perturb one Riemann component (negative control)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks for conformally compact Einstein 4-manifolds"};
  app.require_subcommand(1);
  Flags f;
  CLI::App* analyze = app.add_subcommand("analyze", "full pipeline and topology report");
  CLI::App* check = app.add_subcommand("check", "invariant suites only");
  CLI::App* volume = app.add_subcommand("volume", "renormalized volume fit only");
  CLI::App* curv = app.add_subcommand("curvature", "pointwise curvature packet");
  for (CLI::App* sub : {analyze, check, volume, curv}) add_common(sub, f);
  curv->add_option("--point", f.point, "chart point a,b,c,d");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  cce::RunConfig cfg;
  std::optional<cce::Point> point;
  try {
    cfg = build_config(f);
    point = parse_point(f.point);
  } catch (const cce::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (curv->parsed()) {
      cce::curvature_dump(cfg, point).write(std::cout);
      return kOk;
    }
    cce::AnalysisResult r;
    if (analyze->parsed()) {
      r = cce::run_analysis(cfg);
    } else if (volume->parsed()) {
      r = cce::run_volume(cfg);
    } else {
      using cce::models::Family;
      std::vector<Family> families;
      if (!f.model.empty() || !f.config.empty()) {
        families = {cfg.model.family};
      } else {
        families = {Family::Hyperbolic,        Family::AdsSchwarzschild,
                    Family::PerturbedHyperbolic, Family::RoundSphereClosed,
                    Family::FlatTorusClosed,   Family::ProductS2xS2Closed,
                    Family::WarpedTorusClosed};
      }
      r = cce::run_checks(cfg, families);
    }
    cce::write_artifacts(cfg, r);
    std::cout << cce::summary(r);
    return r.ok() ? kOk : kFailed;
  } catch (const cce::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
}
