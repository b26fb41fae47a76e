#include "mcf/explicit_solutions.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace mcf {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------- grim reaper

double GrimReaper::domain_upper() const { return shift + kPi / lambda; }

bool GrimReaper::contains(double x) const {
  return x > domain_lower() && x < domain_upper();
}

ValueSlope GrimReaper::eval(double x, double t) const {
  if (!(lambda > 0.0)) throw ParameterError("grim reaper needs lambda > 0");
  if (!contains(x)) {
    throw DomainError("x = " + fmt_double(x) + " outside grim reaper strip (" +
                      fmt_double(domain_lower()) + ", " +
                      fmt_double(domain_upper()) + ")");
  }
  const double theta = lambda * (x - shift);
  // Measure the angle from the nearer strip edge so sin keeps full relative
  // precision next to either end.
  const double s = theta <= 0.5 * kPi ? std::sin(theta)
                                      : std::sin(lambda * (domain_upper() - x));
  if (!(s > 0.0)) {
    throw DomainError("x = " + fmt_double(x) + " too close to the strip edge");
  }
  const double value = sign * (lambda * t - std::log(s) / lambda - offset);
  const double slope = sign * (-std::cos(theta) / s);
  if (!std::isfinite(value) || !std::isfinite(slope)) {
    throw DomainError("grim reaper evaluation overflowed at x = " + fmt_double(x));
  }
  return {value, slope};
}

BarrierPair barrier_pair_prop12(double lambda) {
  if (!(lambda > 1.0)) throw ParameterError("barrier pair needs lambda > 1");
  const double c = 3.0 * lambda;
  return {GrimReaper{lambda, -kPi / lambda, c, +1},
          GrimReaper{lambda, 0.0, c, -1}};
}

// ---------------------------------------------------------------- alternating

AlternatingFamily::AlternatingFamily(int k) : k_(k) {
  if (k < 2) throw ParameterError("alternating family needs k >= 2");
}

GrimReaper AlternatingFamily::member(int j) const {
  if (j < -k_ || j > k_) {
    throw ParameterError("member index " + std::to_string(j) + " outside [-k, k]");
  }
  const double kk = k_;
  return GrimReaper{kk, j * kPi / kk, 2.0 * kk, (j % 2 == 0) ? +1 : -1};
}

bool AlternatingFamily::member_at(double x, int& j) const {
  const double scaled = x * k_ / kPi;
  const double fl = std::floor(scaled);
  if (fl == scaled) return false;  // strip edge
  const int idx = static_cast<int>(fl);
  if (idx < -k_ || idx > k_) return false;
  if (!member(idx).contains(x)) return false;
  j = idx;
  return true;
}

double AlternatingFamily::midpoint(int j) const { return (j + 0.5) * kPi / k_; }

double alternating_eval(const AlternatingFamily& fam, int j, double x, double t) {
  return fam.member(j).value(x, t);
}

// ---------------------------------------------------------------- spheres

double sphere_barrier_height(const SphereBarrier& b, const Point& x, double t) {
  const double r2 = b.radius2(t);
  if (!(r2 > 0.0)) throw DomainError("sphere barrier has collapsed");
  double x2 = 0.0;
  for (int a = 0; a < b.n; ++a) x2 += x[a] * x[a];
  if (x2 > r2) throw DomainError("point outside the sphere's shadow");
  return b.center_height + b.sign * std::sqrt(r2 - x2);
}

// ---------------------------------------------------------------- bumps

double smooth_step(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / s);
  const double b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

double compact_bump(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

double plateau(double x, double a, double b, double width) {
  return smooth_step((x - a) / width) * smooth_step((b - x) / width);
}

namespace {

struct Strip {
  double a, b;
  double height;  // signed plateau height
  GrimReaper barrier;
  bool below;  // data must lie strictly below the barrier
};

// Shrinks the plateau ramps geometrically from `width0` until every grid node
// inside every strip satisfies its strict ordering.
ScalarField build_plateaus(const std::vector<Strip>& strips, const GridPtr& grid,
                           double width0, const char* what) {
  const auto x = grid->axis(0).nodes();
  double width = width0;
  double worst = 0.0;
  for (int attempt = 0; attempt < 60; ++attempt, width *= 0.5) {
    std::vector<double> w(x.size(), 0.0);
    for (const auto& s : strips) {
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > s.a && x[i] < s.b) w[i] += s.height * plateau(x[i], s.a, s.b, width);
      }
    }
    bool ok = true;
    worst = std::numeric_limits<double>::infinity();
    for (const auto& s : strips) {
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (!s.barrier.contains(x[i])) continue;
        const double bar = s.barrier.value(x[i], 0.0);
        const double gap = s.below ? bar - w[i] : w[i] - bar;
        worst = std::min(worst, gap);
        if (!(gap > 0.0)) ok = false;
      }
    }
    if (ok) return ScalarField(grid, std::move(w), 0.0);
  }
  throw ConstructionError(std::string(what) +
                          ": strict barrier ordering still fails on the grid "
                          "(worst gap " + fmt_double(worst) + "); refine the grid");
}

void require_line(const GridPtr& grid, double half_width, const char* what) {
  if (!grid || grid->dim() != 1) {
    throw ParameterError(std::string(what) + " needs a 1D grid");
  }
  if (grid->axis(0).lower() > -half_width || grid->axis(0).upper() < half_width) {
    throw ParameterError(std::string(what) + " needs a grid spanning [-" +
                         fmt_double(half_width) + ", " + fmt_double(half_width) + "]");
  }
}

}  // namespace

ScalarField initial_data_prop12(double lambda, const GridPtr& grid) {
  if (!(lambda > 1.0)) throw ParameterError("initial_data_prop12 needs lambda > 1");
  require_line(grid, 4.0 * kPi / lambda, "initial_data_prop12");
  const auto bars = barrier_pair_prop12(lambda);
  const double height = 3.0 * lambda + 0.25 * lambda;
  const double strip = kPi / lambda;
  const std::vector<Strip> strips{
      {-strip, 0.0, -height, bars.upper, true},
      {0.0, strip, +height, bars.lower, false},
  };
  auto w = build_plateaus(strips, grid, strip / 3.0, "initial_data_prop12");
  const double sup = w.max_abs();
  if (!(sup > 3.0 * lambda && sup <= 4.0 * lambda)) {
    throw ConstructionError("initial_data_prop12: sup norm " + fmt_double(sup) +
                            " outside (3 lambda, 4 lambda]");
  }
  return w;
}

ScalarField initial_data_prop32(int k, const GridPtr& grid) {
  const AlternatingFamily fam(k);
  require_line(grid, kPi, "initial_data_prop32");
  const double kk = k;
  const double height = 2.0 * kk + 0.25 * kk;
  std::vector<Strip> strips;
  for (int j = -k; j < k; ++j) {
    const bool up = (j % 2 == 0);  // upward translators bound the data from above
    const auto m = fam.member(j);
    strips.push_back({m.domain_lower(), m.domain_upper(), up ? -height : height, m, up});
  }
  auto w = build_plateaus(strips, grid, (kPi / kk) / 3.0, "initial_data_prop32");
  const double sup = w.max_abs();
  if (!(sup > 2.0 * kk && sup <= 3.0 * kk)) {
    throw ConstructionError("initial_data_prop32: sup norm " + fmt_double(sup) +
                            " outside (2k, 3k]");
  }
  return w;
}

}  // namespace mcf
