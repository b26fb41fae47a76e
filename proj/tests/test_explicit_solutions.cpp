#include <doctest.h>

#include <cmath>

#include "mcf/errors.hpp"
#include "mcf/explicit_solutions.hpp"
#include "oracles.hpp"

using namespace mcf;

TEST_CASE("grim reaper matches the closed form and solves the flow") {
  for (double lambda : {1.0, 2.0, 3.5}) {
    const GrimReaper gr{lambda, 0.0, 0.0, +1};
    const oracle::Translator ref{lambda};
    CHECK(gr.domain_upper() == doctest::Approx(oracle::pi / lambda));
    for (double s : {0.01, 0.2, 0.5, 0.77, 0.99}) {
      const double x = s * oracle::pi / lambda;
      const auto vs = gr.eval(x, 0.7);
      CHECK(vs.value == doctest::Approx(ref.u(x, 0.7)).epsilon(1e-12));
      CHECK(vs.slope == doctest::Approx(ref.ux(x)).epsilon(1e-10));
      // u_t = u_xx / (1 + u_x^2), checked on the oracle's derivatives.
      const double ux = ref.ux(x);
      CHECK(ref.uxx(x) / (1.0 + ux * ux) == doctest::Approx(ref.ut()).epsilon(1e-12));
    }
  }
}

TEST_CASE("grim reaper domain handling") {
  const GrimReaper gr{2.0, 1.0, 0.5, -1};
  CHECK(gr.contains(1.5));
  CHECK_FALSE(gr.contains(1.0));
  CHECK_FALSE(gr.contains(1.0 + oracle::pi / 2.0));
  CHECK_THROWS_AS(gr.value(0.9, 0.0), DomainError);
  CHECK_THROWS_AS(gr.value(2.6, 0.0), DomainError);
  CHECK(gr.speed() == -2.0);
  // Downward copy: -(lambda t - log sin(lambda (x - shift)) / lambda) + offset.
  const double x = 1.3;
  CHECK(gr.value(x, 0.4) ==
        doctest::Approx(-oracle::Translator{2.0}.u(x - 1.0, 0.4) + 0.5).epsilon(1e-12));
  // Values near the right edge stay accurate.
  const GrimReaper unit{1.0, 0.0, 0.0, +1};
  const double e = 1e-9;
  CHECK(unit.value(oracle::pi - e, 0.0) == doctest::Approx(-std::log(e)).epsilon(1e-6));
}

TEST_CASE("barrier pair for the gradient construction") {
  CHECK_THROWS_AS(barrier_pair_prop12(1.0), ParameterError);
  const double lambda = 2.0;
  const auto bars = barrier_pair_prop12(lambda);
  const double p = std::exp(-lambda * lambda);
  const oracle::Translator ref{lambda};
  // u+(x, t) = u(x + pi/lambda, t) - 3 lambda on (-pi/lambda, 0).
  CHECK(bars.upper.value(-p, 1.0) ==
        doctest::Approx(ref.u(-p + oracle::pi / lambda, 1.0) - 3.0 * lambda).epsilon(1e-12));
  CHECK(bars.lower.value(p, 1.0) == doctest::Approx(-ref.u(p, 1.0) + 3.0 * lambda).epsilon(1e-12));
  // The translator at the probe stays below 2 lambda, which puts the barriers past -lambda and lambda.
  CHECK(ref.u(p, 1.0) <= 2.0 * lambda);
  CHECK(bars.upper.value(-p, 1.0) <= -lambda);
  CHECK(bars.lower.value(p, 1.0) >= lambda);
}

TEST_CASE("alternating family") {
  CHECK_THROWS_AS(AlternatingFamily(1), ParameterError);
  for (int k : {2, 3}) {
    const AlternatingFamily fam(k);
    for (int j = -k; j < k; ++j) {
      const auto m = fam.member(j);
      const double mid = fam.midpoint(j);
      CHECK(mid == doctest::Approx((j + 0.5) * oracle::pi / k));
      // At the midpoint sin = 1, so u_j(mid, t) = +-(k t - 2k).
      const double expected = (j % 2 == 0 ? 1.0 : -1.0) * (k * 1.0 - 2.0 * k);
      CHECK(m.value(mid, 1.0) == doctest::Approx(expected));
      CHECK(alternating_eval(fam, j, mid, 1.0) == doctest::Approx(expected));
      int found = 99;
      CHECK(fam.member_at(mid, found));
      CHECK(found == j);
    }
    int j = 0;
    CHECK_FALSE(fam.member_at(0.0, j));
  }
}

TEST_CASE("sphere barrier") {
  const SphereBarrier b{std::sqrt(3.0), 1.0, 1, -1};
  CHECK(b.radius2(1.0) == doctest::Approx(1.0));
  const double h = sphere_barrier_height(b, {0.0, 0.0}, 0.0);
  CHECK(std::abs(h - 1.0) == doctest::Approx(std::sqrt(3.0)));
  CHECK(sphere_barrier_height(b, {0.5, 0.0}, 1.0) == doctest::Approx(1.0 - std::sqrt(3.0 - 2.0 - 0.25)));
  CHECK_THROWS_AS(sphere_barrier_height(b, {1.2, 0.0}, 1.0), DomainError);
  CHECK_THROWS_AS(sphere_barrier_height(b, {0.0, 0.0}, 1.5), DomainError);
}

TEST_CASE("bump helpers") {
  CHECK(smooth_step(-1.0) == 0.0);
  CHECK(smooth_step(2.0) == 1.0);
  CHECK(smooth_step(0.5) == doctest::Approx(0.5));
  CHECK(smooth_step(0.3) + smooth_step(0.7) == doctest::Approx(1.0));
  CHECK(compact_bump(0.0) == doctest::Approx(1.0));
  CHECK(compact_bump(1.0) == 0.0);
  CHECK(compact_bump(-0.5) == compact_bump(0.5));
  CHECK(plateau(0.5, 0.0, 1.0, 0.1) == 1.0);
  CHECK(plateau(-0.01, 0.0, 1.0, 0.1) == 0.0);
}

TEST_CASE("initial data for the gradient construction lies strictly between the barriers") {
  const double lambda = 2.0;
  const double L = 4.0 * oracle::pi / lambda;
  const auto grid = Grid::line(-L, L, 4001);
  const auto w = initial_data_prop12(lambda, grid);
  CHECK(w.max_abs() > 3.0 * lambda);
  CHECK(w.max_abs() <= 4.0 * lambda);
  const oracle::Translator ref{lambda};
  const double width = oracle::pi / lambda;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const double x = grid->point(i)[0];
    if (x > -width && x < 0.0) CHECK(w[i] < ref.u(x + width, 0.0) - 3.0 * lambda);
    if (x > 0.0 && x < width) CHECK(w[i] > -ref.u(x, 0.0) + 3.0 * lambda);
  }
  CHECK_THROWS_AS(initial_data_prop12(lambda, Grid::line(-1.0, 1.0, 101)), Error);
}

TEST_CASE("initial data for the area construction respects the alternating family") {
  for (int k : {2, 3}) {
    const auto grid = Grid::line(-oracle::pi - 1.0, oracle::pi + 1.0, 3001);
    const auto w = initial_data_prop32(k, grid);
    CHECK(w.max_abs() > 2.0 * k);
    CHECK(w.max_abs() <= 3.0 * k);
    const oracle::Translator ref{double(k)};
    for (std::size_t i = 0; i < grid->size(); ++i) {
      const double x = grid->point(i)[0];
      const int j = static_cast<int>(std::floor(x * k / oracle::pi));
      if (j < -k || j >= k) {
        CHECK(w[i] == 0.0);
        continue;
      }
      const double y = x - j * oracle::pi / k;
      if (y <= 0.0) continue;
      const double base = ref.u(y, 0.0) - 2.0 * k;
      if (j % 2 == 0) CHECK(w[i] < base);
      else CHECK(w[i] > -base);
    }
  }
  CHECK_THROWS_AS(initial_data_prop32(2, Grid::line(-1.0, 1.0, 101)), Error);
}
