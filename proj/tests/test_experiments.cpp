#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mcf/errors.hpp"
#include "mcf/experiments.hpp"
#include "mcf/solver.hpp"

using namespace mcf;

namespace {

std::string csv_of(const ReportBundle& b) {
  std::ostringstream out;
  write_reports_csv(b.reports, out);
  return out.str();
}

const EstimateReport& find(const ReportBundle& b, const std::string& name) {
  for (const auto& r : b.reports) {
    if (r.name == name) return r;
  }
  throw std::runtime_error("missing report " + name);
}

}  // namespace

TEST_CASE("experiment kinds") {
  for (auto k : {ExperimentKind::SharpnessGradient, ExperimentKind::SharpnessArea,
                 ExperimentKind::EstimateSuite, ExperimentKind::Convergence,
                 ExperimentKind::IdentitySuite}) {
    CHECK(parse_kind(to_string(k)) == k);
  }
  CHECK_THROWS_AS(parse_kind("nonsense"), ParameterError);
}

TEST_CASE("experiment settings validation") {
  ExperimentSpec s;
  s.kind = ExperimentKind::SharpnessGradient;
  s.lambda = 1.0;
  CHECK_THROWS_AS(s.validate(), ParameterError);
  s.lambda = 2.0;
  CHECK_NOTHROW(s.validate());
  s.kind = ExperimentKind::SharpnessArea;
  s.k = 1;
  CHECK_THROWS_AS(s.validate(), ParameterError);
  s.kind = ExperimentKind::EstimateSuite;
  s.n = 3;
  CHECK_THROWS_AS(s.validate(), ParameterError);
  s.kind = ExperimentKind::Convergence;
  s.levels = 2;
  CHECK_THROWS_AS(s.validate(), ParameterError);
  s.levels = 3;
  s.problem = "wave";
  CHECK_THROWS_AS(s.validate(), ParameterError);
}

TEST_CASE("config files") {
  std::istringstream in(
      "# sharpness run\n"
      "kind = sharpness-area\n"
      "k = 3   # strips\n"
      "\n"
      "tolerance=0.02\n"
      "scheme = explicit-euler\n"
      "graded = true\n"
      "seed = 12345678901\n");
  const auto s = load_config(in);
  CHECK(s.kind == ExperimentKind::SharpnessArea);
  CHECK(s.k == 3);
  CHECK(s.tolerance == 0.02);
  CHECK(s.scheme == Scheme::ExplicitEuler);
  CHECK(s.graded);
  CHECK(s.seed == 12345678901ULL);

  std::istringstream unknown("colour = blue\n");
  CHECK_THROWS_AS(load_config(unknown), ParameterError);
  std::istringstream bad("k = two\n");
  CHECK_THROWS_AS(load_config(bad), ParameterError);
  std::istringstream trailing("lambda = 2x\n");
  CHECK_THROWS_AS(load_config(trailing), ParameterError);
  std::istringstream noeq("lambda 2\n");
  CHECK_THROWS_AS(load_config(noeq), ParameterError);
}

TEST_CASE("random initial data") {
  const auto g = Grid::line(-std::sqrt(3.0), std::sqrt(3.0), 201);
  const auto a = random_initial_data(g, std::sqrt(3.0), 99);
  const auto b = random_initial_data(g, std::sqrt(3.0), 99);
  const auto c = random_initial_data(g, std::sqrt(3.0), 100);
  bool differs = false;
  for (std::size_t i = 0; i < g->size(); ++i) {
    CHECK(a[i] == b[i]);
    differs = differs || a[i] != c[i];
  }
  CHECK(differs);
  CHECK(a.max_abs() <= 3.0);
  CHECK(a[0] == 0.0);
  CHECK(a[200] == 0.0);
  CHECK(random_initial_data(g, std::sqrt(3.0), 99, 0.0).max_abs() == 0.0);
  const auto g2 = Grid::square(-1.0, 1.0, 21);
  CHECK(random_initial_data(g2, 1.0, 4).max_abs() <= 3.0);

  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double x = uniform01(rng);
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  CHECK(observed_order(4.0, 1.0) == doctest::Approx(2.0));
}

TEST_CASE("convergence runs") {
  const auto flat = run_convergence("flat", 3, 16);
  CHECK(flat.all_pass());
  CHECK(find(flat, "linf_error").measured == 0.0);

  const auto gr = run_convergence("grim-reaper", 3, 64);
  for (const auto& r : gr.reports) {
    if (r.name == "order") CHECK(r.measured == doctest::Approx(2.0).epsilon(0.15));
  }
  const auto pair = run_convergence("translating-pair", 3, 64, Scheme::ExplicitEuler);
  for (const auto& r : pair.reports) {
    if (r.name == "order") CHECK(r.pass);
  }
  CHECK_THROWS_AS(run_convergence("grim-reaper", 2, 64), ParameterError);
  CHECK_THROWS_AS(run_convergence("grim-reaper", 3, 60), ParameterError);
  CHECK_THROWS_AS(run_convergence("wave", 3, 64), ParameterError);
}

TEST_CASE("sharpness runs refuse coarse or ungraded grids") {
  try {
    run_sharpness_gradient(2.0, 4);
    FAIL("expected refusal");
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()).find("h <=") != std::string::npos);
  }
  CHECK_THROWS_AS(run_sharpness_gradient(2.4, 8), PreconditionError);
  CHECK_THROWS_AS(run_sharpness_gradient(3.0, 8), ParameterError);
  CHECK_THROWS_AS(run_sharpness_area(2, 8), PreconditionError);
  CHECK_THROWS_AS(run_sharpness_area(1, 256), ParameterError);
}

TEST_CASE("estimate suite") {
  const auto a = run_estimate_suite(1, 3, 4, 1.0, 200, 1);
  const auto b = run_estimate_suite(1, 3, 4, 1.0, 200, 3);
  CHECK(csv_of(a) == csv_of(b));
  CHECK(a.all_pass());
  CHECK(a.reports.size() == 4 * 5);
  // Member 0 is flat: zero gradient and unit area over B_{1/2}.
  CHECK(a.reports[0].measured == 0.0);
  CHECK(a.reports[0].margin == a.reports[0].bound);
  CHECK(a.reports[4].measured == doctest::Approx(1.0));
  const auto c = run_estimate_suite(1, 4, 4, 1.0, 200, 1);
  CHECK(csv_of(a) != csv_of(c));
  CHECK_THROWS_AS(run_estimate_suite(1, 3, 4, 1.0, 15), ParameterError);
}

TEST_CASE("estimate suite in two dimensions") {
  const auto s = run_estimate_suite(2, 8, 2, 1.0, 32);
  CHECK(s.all_pass());
  CHECK(s.reports.size() == 2 * 5);
}

TEST_CASE("bundle output") {
  const auto dir = std::filesystem::temp_directory_path() / "mcf_bundle_test";
  std::filesystem::remove_all(dir);
  ReportBundle b;
  b.experiment = "demo";
  b.reports.push_back(EstimateReport::make("x", 1.0, 2.0, 0.0));
  const auto g = Grid::line(0.0, 1.0, 5);
  b.trajectory = sampled_trajectory(g, [](const Point& p, double t) { return p[0] + t; }, {0.0, 1.0});
  b.write(dir);
  for (const char* f : {"report.json", "report.csv", "trajectory.csv", "series.csv", "trajectory.mcfg"}) {
    CHECK(std::filesystem::exists(dir / f));
  }
  std::ifstream bin(dir / "trajectory.mcfg", std::ios::binary);
  const auto back = read_trajectory_binary(bin);
  CHECK(back.back()[4] == 2.0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("batch runs keep input order") {
  ExperimentSpec s1;
  s1.kind = ExperimentKind::Convergence;
  s1.problem = "flat";
  s1.resolution = 16;
  ExperimentSpec s2 = s1;
  s2.problem = "grim-reaper";
  s2.resolution = 32;
  const auto out = run_batch({s1, s2, s1}, 2);
  REQUIRE(out.size() == 3);
  CHECK(out[0].reports.size() == 3);
  CHECK(out[1].reports.size() > 3);
  CHECK(csv_of(out[0]) == csv_of(out[2]));
}
