// mcflab: command-line driver for the graphical mean curvature flow experiments.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mcf/errors.hpp"
#include "mcf/experiments.hpp"
#include "mcf/explicit_solutions.hpp"
#include "mcf/solver.hpp"

namespace fs = std::filesystem;

namespace {

int summarize(const mcf::ReportBundle& bundle, const fs::path& dir) {
  for (const auto& r : bundle.reports) {
    if (!r.pass) {
      std::cout << "FAIL " << r.name << ": measured " << r.measured << ", bound " << r.bound
                << ", margin " << r.margin << '\n';
    }
  }
  std::cout << bundle.experiment << ": " << bundle.reports.size() << " checks, "
            << bundle.failures() << " failed; output in " << dir.string() << '\n';
  return bundle.all_pass() ? 0 : 1;
}

mcf::ScalarField simulate_initial(const std::string& initial, const mcf::ExperimentSpec& spec,
                                  mcf::Boundary& boundary) {
  constexpr double pi = std::numbers::pi;
  const int res = spec.resolution == 0 ? 400 : spec.resolution;
  if (initial == "grim-reaper") {
    const mcf::GrimReaper gr{1.0, 0.0, 0.0, +1};
    const auto grid = mcf::Grid::line(pi / 8.0, 7.0 * pi / 8.0, res + 1);
    boundary = mcf::Boundary::exact([gr](const mcf::Point& p, double t) { return gr.value(p[0], t); });
    return mcf::ScalarField::sample(grid, [&](const mcf::Point& p) { return gr.value(p[0], 0.0); });
  }
  if (initial == "sharpness-gradient") {
    const double L = 4.0 * pi / spec.lambda;
    return mcf::initial_data_prop12(spec.lambda, mcf::Grid::line(-L, L, 2 * res + 1));
  }
  if (initial == "sharpness-area") {
    const double L = 2.0 * pi + 2.0;
    return mcf::initial_data_prop32(spec.k, mcf::Grid::line(-L, L, 2 * res + 1));
  }
  if (initial == "random") {
    const double rho = std::sqrt(2.0 * spec.n + 1.0) * spec.r;
    const auto grid = spec.n == 1 ? mcf::Grid::line(-rho, rho, res + 1)
                                  : mcf::Grid::square(-rho, rho, res + 1);
    return mcf::random_initial_data(grid, rho, spec.seed);
  }
  throw mcf::ParameterError("unknown initial data '" + initial + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graphical mean curvature flow experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string output;
  int threads = 0;
  app.add_option("--config", config_path, "key = value file with experiment parameters");
  app.add_option("-o,--output", output, "output directory");
  app.add_option("--threads", threads, "worker threads (0 = hardware)");

  mcf::ExperimentSpec cli;
  std::string scheme_name;
  std::string initial = "grim-reaper";
  double t_end = 1.0;

  auto* sim = app.add_subcommand("simulate", "evolve initial data and export the trajectory");
  sim->add_option("--initial", initial, "grim-reaper | sharpness-gradient | sharpness-area | random");
  auto* sim_lambda = sim->add_option("--lambda", cli.lambda);
  auto* sim_k = sim->add_option("--k", cli.k);
  auto* sim_n = sim->add_option("--n", cli.n);
  auto* sim_seed = sim->add_option("--seed", cli.seed);
  auto* sim_res = sim->add_option("--resolution", cli.resolution);
  auto* sim_dt = sim->add_option("--dt", cli.dt);
  auto* sim_scheme = sim->add_option("--scheme", scheme_name, "semi-implicit | explicit-euler");
  sim->add_option("--t-end", t_end);

  auto* sg = app.add_subcommand("sharpness-gradient", "gradient estimate sharpness construction");
  auto* sg_lambda = sg->add_option("--lambda", cli.lambda);
  auto* sg_res = sg->add_option("--resolution", cli.resolution, "nodes per probe distance");
  auto* sg_tol = sg->add_option("--tolerance", cli.tolerance);
  auto* sg_graded = sg->add_flag("--graded", cli.graded);
  auto* sg_dt = sg->add_option("--dt", cli.dt);

  auto* sa = app.add_subcommand("sharpness-area", "area estimate sharpness construction");
  auto* sa_k = sa->add_option("--k", cli.k);
  auto* sa_res = sa->add_option("--resolution", cli.resolution, "nodes per strip");
  auto* sa_tol = sa->add_option("--tolerance", cli.tolerance);
  auto* sa_dt = sa->add_option("--dt", cli.dt);

  auto* es = app.add_subcommand("estimate-suite", "estimate checks on random smooth flows");
  auto* es_n = es->add_option("--n", cli.n);
  auto* es_count = es->add_option("--count", cli.count);
  auto* es_seed = es->add_option("--seed", cli.seed);
  auto* es_r = es->add_option("--r", cli.r);
  auto* es_res = es->add_option("--resolution", cli.resolution);

  auto* cv = app.add_subcommand("convergence", "solver convergence against translators");
  auto* cv_problem = cv->add_option("--problem", cli.problem, "grim-reaper | translating-pair | flat");
  auto* cv_levels = cv->add_option("--levels", cli.levels);
  auto* cv_res = cv->add_option("--resolution", cli.resolution);
  auto* cv_scheme = cv->add_option("--scheme", scheme_name);

  auto* is = app.add_subcommand("identity-suite", "energy and heat-operator identities");
  auto* is_levels = is->add_option("--levels", cli.levels);
  auto* is_res = is->add_option("--resolution", cli.resolution);

  std::string format = "csv";
  std::string input;
  auto* rp = app.add_subcommand("report", "print the report of a finished run");
  rp->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  rp->add_option("input", input, "run directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (rp->parsed()) {
      std::ifstream in(fs::path(input) / "report.json");
      if (!in) throw mcf::Error("no report.json in " + input);
      const auto j = nlohmann::ordered_json::parse(in);
      std::vector<mcf::EstimateReport> reports;
      for (const auto& e : j) reports.push_back(mcf::report_from_json(e));
      if (format == "csv") mcf::write_reports_csv(reports, std::cout);
      else mcf::write_reports_json(reports, std::cout);
      for (const auto& r : reports) {
        if (!r.pass) return 1;
      }
      return 0;
    }

    mcf::ExperimentSpec spec;
    if (!config_path.empty()) spec = mcf::load_config(fs::path(config_path));
    // Command-line values override the config file.
    auto take = [&](CLI::Option* opt, auto member) {
      if (opt->count() > 0) spec.*member = cli.*member;
    };
    using S = mcf::ExperimentSpec;
    for (auto* o : {sim_lambda, sg_lambda}) take(o, &S::lambda);
    for (auto* o : {sim_k, sa_k}) take(o, &S::k);
    for (auto* o : {sim_n, es_n}) take(o, &S::n);
    for (auto* o : {sim_seed, es_seed}) take(o, &S::seed);
    for (auto* o : {sim_res, sg_res, sa_res, es_res, cv_res, is_res}) take(o, &S::resolution);
    for (auto* o : {sim_dt, sg_dt, sa_dt}) take(o, &S::dt);
    for (auto* o : {sg_tol, sa_tol}) take(o, &S::tolerance);
    for (auto* o : {cv_levels, is_levels}) take(o, &S::levels);
    take(sg_graded, &S::graded);
    take(es_count, &S::count);
    take(es_r, &S::r);
    take(cv_problem, &S::problem);
    if (sim_scheme->count() > 0 || cv_scheme->count() > 0) spec.scheme = mcf::parse_scheme(scheme_name);
    if (app.get_option("--threads")->count() > 0) spec.threads = threads;
    if (!output.empty()) spec.output = output;

    if (sim->parsed()) {
      mcf::Boundary boundary = mcf::Boundary::frozen();
      const auto u0 = simulate_initial(initial, spec, boundary);
      mcf::SolverConfig cfg;
      cfg.scheme = spec.scheme;
      cfg.t_end = t_end;
      if (spec.dt > 0.0) cfg.dt_fixed = spec.dt;
      cfg.boundary = boundary;
      for (int q = 1; q < 20; ++q) cfg.snapshot_times.push_back(q * t_end / 20.0);
      mcf::ReportBundle bundle;
      bundle.experiment = "simulate";
      bundle.trajectory = mcf::evolve(u0, cfg);
      const fs::path dir = spec.output.empty() ? fs::path("runs/simulate") : fs::path(spec.output);
      bundle.write(dir);
      std::cout << "simulate: " << bundle.trajectory->size() << " snapshots; output in "
                << dir.string() << '\n';
      return 0;
    }

    if (sg->parsed()) spec.kind = mcf::ExperimentKind::SharpnessGradient;
    else if (sa->parsed()) spec.kind = mcf::ExperimentKind::SharpnessArea;
    else if (es->parsed()) spec.kind = mcf::ExperimentKind::EstimateSuite;
    else if (cv->parsed()) spec.kind = mcf::ExperimentKind::Convergence;
    else if (is->parsed()) spec.kind = mcf::ExperimentKind::IdentitySuite;

    const auto bundle = mcf::run_experiment(spec);
    const fs::path dir =
        spec.output.empty() ? fs::path("runs") / mcf::to_string(spec.kind) : fs::path(spec.output);
    bundle.write(dir);
    return summarize(bundle, dir);
  } catch (const mcf::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
