#include <doctest.h>

#include <cmath>

#include "mcf/errors.hpp"
#include "mcf/geometry.hpp"
#include "oracles.hpp"

using namespace mcf;

namespace {

ScalarField centred_snapshot(std::size_t intervals, double t) {
  const auto g = Grid::line(-1.0, 1.0, intervals + 1);
  return ScalarField::sample(g, [&](const Point& p) { return oracle::centred(p[0], t); }, t);
}

FlowTrajectory centred_trajectory(std::size_t intervals) {
  const auto g = Grid::line(-1.0, 1.0, intervals + 1);
  const double h = 2.0 / intervals;
  return sampled_trajectory(g, [](const Point& p, double t) { return oracle::centred(p[0], t); },
                            {0.0, 1.0 - h, 1.0, 1.0 + h});
}

}  // namespace

TEST_CASE("volume element") {
  CHECK(volume_element(0.0) == 1.0);
  CHECK(volume_element(3.0) == doctest::Approx(2.0));
  CHECK(volume_element(1e300) == doctest::Approx(1e150));
  CHECK(std::isfinite(volume_element(1e308)));
}

TEST_CASE("curvature of the translator") {
  const auto u = centred_snapshot(400, 0.3);
  const auto geo = compute_geometry(u);
  REQUIRE(geo.A2.has_value());
  for (std::size_t i = 0; i < u.size(); i += 20) {
    const double x = u.grid().point(i)[0];
    const double ux = oracle::centred_x(x), uxx = oracle::centred_xx(x);
    const double v = std::sqrt(1.0 + ux * ux);
    CHECK(geo.v[i] == doctest::Approx(v).epsilon(1e-4));
    // H = -u_xx / v^3 and -v H = u_t = 1.
    CHECK(geo.H[i] == doctest::Approx(-uxx / (v * v * v)).epsilon(1e-3));
    CHECK(-geo.v[i] * geo.H[i] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK((*geo.A2)[i] == doctest::Approx(uxx * uxx / (v * v * v * v * v * v)).epsilon(2e-3));
  }
}

TEST_CASE("mean curvature of a spherical cap in two dimensions") {
  const double R = 2.0;
  auto error = [&](std::size_t n) {
    const auto g = Grid::square(-1.0, 1.0, n);
    const auto u = ScalarField::sample(g, [&](const Point& p) { return oracle::cap(R, p[0], p[1]); });
    const auto geo = compute_geometry(u);
    CHECK_FALSE(geo.A2.has_value());
    double e = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) {
      if (g->on_boundary(i)) continue;
      e = std::max(e, std::abs(geo.H[i] + 2.0 / R));
    }
    return e;
  };
  const double e1 = error(81), e2 = error(161);
  CHECK(e2 < 5e-5);
  CHECK(oracle::order(e1, e2) > 1.7);
}

TEST_CASE("Laplace-Beltrami of the height on the translator equals u_t / v^2") {
  // On the unit translator u_t / v^2 = cos^2 x.
  auto error = [](std::size_t n) {
    const auto u = centred_snapshot(n, 0.0);
    const auto lap = laplace_beltrami(u, u);
    double e = 0.0;
    for (std::size_t i = 2; i + 2 < u.size(); ++i) {
      const double x = u.grid().point(i)[0];
      e = std::max(e, std::abs(lap[i] - std::cos(x) * std::cos(x)));
    }
    return e;
  };
  const double e1 = error(200), e2 = error(400);
  CHECK(e2 < 1e-4);
  CHECK(oracle::order(e1, e2) > 1.8);
}

TEST_CASE("Laplace-Beltrami annihilates affine functions on a tilted plane") {
  const auto g = Grid::square(-1.0, 1.0, 21);
  const auto u = ScalarField::sample(g, [](const Point& p) { return 0.7 * p[0] - 1.3 * p[1]; });
  const auto f = ScalarField::sample(g, [](const Point& p) { return 2.0 * p[0] + p[1] + 5.0; });
  const auto lap = laplace_beltrami(u, f);
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(std::abs(lap[i]) < 1e-10);
  // |grad_M f|^2 = |df|^2 - <du, df>^2 / v^2.
  const auto tg = tangential_gradient2(u, f);
  const double du_df = 0.7 * 2.0 - 1.3 * 1.0, v2 = 1.0 + 0.49 + 1.69;
  CHECK(tg[g->index(10, 10)] == doctest::Approx(5.0 - du_df * du_df / v2));
}

TEST_CASE("translator extended in y has the one-dimensional curvature") {
  const auto g = Grid::square(-1.0, 1.0, 81);
  const auto u = ScalarField::sample(g, [](const Point& p) { return oracle::centred(p[0], 0.0); });
  const auto geo = compute_geometry(u);
  for (std::size_t j = 5; j < 76; j += 10) {
    for (std::size_t i = 1; i < 80; i += 7) {
      const double x = g->point(g->index(i, j))[0];
      const double v = 1.0 / std::cos(x);
      CHECK(geo.H[g->index(i, j)] == doctest::Approx(-oracle::centred_xx(x) / (v * v * v)).epsilon(5e-3));
    }
  }
}

TEST_CASE("heat identities on exact snapshots") {
  const auto coarse = centred_trajectory(200);
  const auto fine = centred_trajectory(400);
  SUBCASE("volume element") {
    const double e1 = interior_max_abs(heat_residual_v(coarse, 1.0));
    const double e2 = interior_max_abs(heat_residual_v(fine, 1.0));
    CHECK(e2 < 5e-5);
    CHECK(oracle::order(e1, e2) > 1.7);
    CHECK(interior_max(heat_excess_v(fine, 1.0)) < 1e-4);
  }
  SUBCASE("eta is a subsolution and matches -2 |du|^2 / v^2") {
    const auto re = heat_residual_eta(fine, 1.0);
    CHECK(interior_max(re) <= 1e-6);
    for (std::size_t i = 2; i + 2 < re.size(); i += 17) {
      const double x = fine.grid().point(i)[0];
      CHECK(re[i] == doctest::Approx(-2.0 * std::sin(x) * std::sin(x)).epsilon(1e-3).scale(1.0));
    }
  }
  SUBCASE("exponential weight") {
    const double e1 = interior_max_abs(heat_residual_exp(coarse, 1.0, -2.0));
    const double e2 = interior_max_abs(heat_residual_exp(fine, 1.0, -2.0));
    CHECK(oracle::order(e1, e2) > 1.7);
    CHECK_THROWS_AS(heat_residual_exp(fine, 1.0, -1.0), ParameterError);
    CHECK_THROWS(heat_residual_exp(fine, 0.0, -2.0));
  }
  SUBCASE("missing snapshot") { CHECK_THROWS_AS(heat_residual_v(fine, 0.5), PreconditionError); }
}

TEST_CASE("phi v maximum needs a lifted graph") {
  const auto g = Grid::line(-1.0, 1.0, 101);
  const auto tr = sampled_trajectory(g, [](const Point&, double) { return 0.0; }, {0.0, 0.1, 0.2});
  CHECK_THROWS_AS(phi_v_max(tr, -2.0), PreconditionError);
  const auto lifted = sampled_trajectory(g, [](const Point&, double) { return 1.0; }, {0.0, 0.1, 0.2});
  // Flat graph at height 1: max of (1 - x^2 - 2t) e^{-2/t} is at x = 0, t = 0.2.
  CHECK(phi_v_max(lifted, -2.0) == doctest::Approx(0.6 * std::exp(-10.0)));
}
