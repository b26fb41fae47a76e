#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "mcf/errors.hpp"
#include "mcf/explicit_solutions.hpp"
#include "mcf/solver.hpp"
#include "oracles.hpp"

using namespace mcf;

namespace {

double translator_error(std::size_t N, Scheme scheme, int dim) {
  const oracle::Translator ref{1.0};
  const double lo = oracle::pi / 8.0, hi = 7.0 * oracle::pi / 8.0;
  const std::size_t intervals = N * 3 / 4;
  const GridPtr g = dim == 1 ? Grid::line(lo, hi, intervals + 1)
                             : Grid::from_axes({Axis::uniform(lo, hi, intervals + 1),
                                                Axis::uniform(0.0, 0.2, 5)});
  auto exact = [&](const Point& p, double t) { return ref.u(p[0], t); };
  SolverConfig cfg;
  cfg.scheme = scheme;
  cfg.t_end = 0.25;
  if (scheme == Scheme::SemiImplicit) cfg.dt_fixed = g->axis(0).spacing();
  cfg.boundary = Boundary::exact(exact);
  const auto u0 = ScalarField::sample(g, [&](const Point& p) { return exact(p, 0.0); });
  const auto tr = evolve(u0, cfg);
  double e = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    e = std::max(e, std::abs(tr.back()[i] - exact(g->point(i), 0.25)));
  }
  return e;
}

}  // namespace

TEST_CASE("explicit scheme respects the stability limit") {
  const auto g = Grid::line(0.0, 1.0, 101);
  const auto u = ScalarField::constant(g, 0.0);
  const double limit = 0.01 * 0.01 / 2.0;
  CHECK_NOTHROW(step(u, limit, Scheme::ExplicitEuler, Boundary::frozen()));
  CHECK_THROWS_AS(step(u, 1.01 * limit, Scheme::ExplicitEuler, Boundary::frozen()), SolverError);
  CHECK_THROWS_AS(step(u, 0.0, Scheme::SemiImplicit, Boundary::frozen()), ParameterError);
}

TEST_CASE("affine graphs are stationary") {
  for (auto scheme : {Scheme::ExplicitEuler, Scheme::SemiImplicit}) {
    const auto g1 = Grid::line(-1.0, 1.0, 41);
    const auto u1 = ScalarField::sample(g1, [](const Point& p) { return 3.0 * p[0] - 1.0; });
    SolverConfig cfg;
    cfg.scheme = scheme;
    cfg.t_end = 0.1;
    const auto t1 = evolve(u1, cfg);
    for (std::size_t i = 0; i < g1->size(); ++i) CHECK(t1.back()[i] == doctest::Approx(u1[i]).epsilon(1e-10));

    const auto g2 = Grid::square(-1.0, 1.0, 21);
    const auto u2 = ScalarField::sample(g2, [](const Point& p) { return 0.5 * p[0] - 2.0 * p[1]; });
    const auto t2 = evolve(u2, cfg);
    for (std::size_t i = 0; i < g2->size(); ++i) CHECK(std::abs(t2.back()[i] - u2[i]) < 1e-8);
  }
}

TEST_CASE("translator convergence in one and two dimensions") {
  SUBCASE("semi-implicit, 1D") {
    const double e1 = translator_error(64, Scheme::SemiImplicit, 1);
    const double e2 = translator_error(128, Scheme::SemiImplicit, 1);
    const double e3 = translator_error(256, Scheme::SemiImplicit, 1);
    CHECK(oracle::order(e1, e2) == doctest::Approx(2.0).epsilon(0.15));
    CHECK(oracle::order(e2, e3) == doctest::Approx(2.0).epsilon(0.15));
  }
  SUBCASE("explicit, 1D") {
    const double e1 = translator_error(64, Scheme::ExplicitEuler, 1);
    const double e2 = translator_error(128, Scheme::ExplicitEuler, 1);
    CHECK(oracle::order(e1, e2) == doctest::Approx(2.0).epsilon(0.15));
  }
  SUBCASE("2D solver on a y-independent translator agrees with 1D") {
    const double e1 = translator_error(64, Scheme::SemiImplicit, 2);
    const double e2 = translator_error(128, Scheme::SemiImplicit, 2);
    CHECK(e2 < 1e-3);
    CHECK(oracle::order(e1, e2) > 1.7);
    CHECK(e2 == doctest::Approx(translator_error(128, Scheme::SemiImplicit, 1)).epsilon(0.05));
  }
}

TEST_CASE("discrete maximum principle for the explicit scheme") {
  std::mt19937_64 rng(11);
  const auto g = Grid::line(-1.0, 1.0, 81);
  std::vector<double> vals(g->size());
  for (auto& v : vals) v = oracle::uniform(rng, -1.0, 1.0);
  ScalarField u(g, vals);
  const double lo = u.min(), hi = u.max();
  const double dt = 0.9 * g->min_spacing() * g->min_spacing() / 2.0;
  for (int k = 0; k < 200; ++k) {
    u = step(u, dt, Scheme::ExplicitEuler, Boundary::frozen());
    CHECK(u.min() >= lo - 1e-12);
    CHECK(u.max() <= hi + 1e-12);
  }
}

TEST_CASE("radial data stays symmetric in two dimensions") {
  const auto g = Grid::square(-1.0, 1.0, 41);
  const auto u0 = ScalarField::sample(g, [](const Point& p) {
    return compact_bump(std::hypot(p[0], p[1]) / 0.8);
  });
  SolverConfig cfg;
  cfg.t_end = 0.05;
  cfg.dt_fixed = 0.005;
  const auto u = evolve(u0, cfg).back();
  CHECK(u.max() < u0.max());
  for (std::size_t i = 0; i < 41; ++i) {
    for (std::size_t j = 0; j < 41; ++j) {
      CHECK(u[g->index(i, j)] == doctest::Approx(u[g->index(j, i)]).epsilon(1e-7));
      CHECK(u[g->index(i, j)] == doctest::Approx(u[g->index(40 - i, j)]).epsilon(1e-7));
    }
  }
}

TEST_CASE("evolve lands on snapshot times") {
  const auto g = Grid::line(0.0, 1.0, 21);
  SolverConfig cfg;
  cfg.t_end = 0.3;
  cfg.dt_fixed = 0.07;
  cfg.snapshot_times = {0.0, 0.1, 0.25};
  const auto tr = evolve(ScalarField::constant(g, 1.0), cfg);
  REQUIRE(tr.size() == 4);
  CHECK(tr.snapshot(1).time() == 0.1);
  CHECK(tr.snapshot(2).time() == 0.25);
  CHECK(tr.back().time() == 0.3);
  CHECK(tr.index_of(0.25) == 2);
  CHECK_THROWS_AS(tr.index_of(0.2), PreconditionError);

  cfg.snapshot_times = {0.2, 0.1};
  CHECK_THROWS_AS(evolve(ScalarField::constant(g, 1.0), cfg), ParameterError);
  cfg.snapshot_times = {0.5};
  CHECK_THROWS_AS(evolve(ScalarField::constant(g, 1.0), cfg), ParameterError);
}

TEST_CASE("comparison check reports the first violation") {
  const auto g = Grid::line(0.0, 1.0, 11);
  const auto tr = sampled_trajectory(g, [](const Point& p, double t) { return p[0] + t; },
                                     {0.0, 0.5, 1.0});
  auto everywhere = [](const Point&, double) { return true; };
  const auto ok = comparison_check(tr, [](const Point& p, double t) { return p[0] + t + 0.25; },
                                   Relation::Below, everywhere);
  CHECK(ok.pass);
  CHECK(ok.min_gap == doctest::Approx(0.25));
  CHECK(ok.points_checked == 33);

  const auto bad = comparison_check(tr, [](const Point&, double) { return 1.25; }, Relation::Below,
                                    everywhere);
  CHECK_FALSE(bad.pass);
  REQUIRE(bad.first_violation.has_value());
  CHECK(bad.first_violation->time == 0.5);
  CHECK(bad.first_violation->x[0] == doctest::Approx(0.8));
  CHECK(bad.min_gap == doctest::Approx(-0.75));

  const auto above = comparison_check(tr, [](const Point&, double) { return -0.01; }, Relation::Above,
                                      [](const Point& p, double) { return p[0] > 0.5; });
  CHECK(above.pass);
  CHECK(above.points_checked == 15);
  const auto slack = comparison_check(tr, [](const Point&, double) { return 0.05; }, Relation::Above,
                                      everywhere, 0.06);
  CHECK(slack.pass);
}

TEST_CASE("trajectory exports") {
  const auto g = Grid::square(0.0, 1.0, 3);
  const auto tr = sampled_trajectory(g, [](const Point& p, double t) { return p[0] * p[1] + t; },
                                     {0.0, 0.5});
  std::ostringstream csv, series;
  write_trajectory_csv(tr, csv);
  write_series_csv(tr, series);
  CHECK(csv.str().rfind("t,x,y,u\n0,0,0,0\n", 0) == 0);
  CHECK(series.str().rfind("x,y,u(t=0),u(t=0.5)\n", 0) == 0);

  std::stringstream bin;
  write_trajectory_binary(tr, bin);
  CHECK(bin.str().substr(0, 4) == "MCFG");
  const auto back = read_trajectory_binary(bin);
  REQUIRE(back.size() == tr.size());
  CHECK(back.grid() == tr.grid());
  for (std::size_t k = 0; k < tr.size(); ++k) {
    CHECK(back.snapshot(k).time() == tr.snapshot(k).time());
    for (std::size_t i = 0; i < g->size(); ++i) CHECK(back.snapshot(k)[i] == tr.snapshot(k)[i]);
  }

  std::stringstream junk("NOPE0000");
  CHECK_THROWS_AS(read_trajectory_binary(junk), Error);
  const auto graded = Grid::from_axes({Axis::graded(-1.0, 1.0, 0.0, 0.01, 1.3, 0.2)});
  const auto tg = sampled_trajectory(graded, [](const Point&, double) { return 0.0; }, {0.0});
  std::stringstream sink;
  CHECK_THROWS_AS(write_trajectory_binary(tg, sink), Error);
}
