#pragma once

#include <utility>

#include "mcf/grid.hpp"

namespace mcf {

struct ValueSlope {
  double value;
  double slope;
};

/// Translating grim reaper of speed lambda on the strip shift < x < shift + pi/lambda:
///   sign * (lambda t - log(sin(lambda (x - shift))) / lambda - offset).
struct GrimReaper {
  double lambda = 1.0;
  double shift = 0.0;
  double offset = 0.0;
  int sign = +1;

  double domain_lower() const { return shift; }
  double domain_upper() const;
  bool contains(double x) const;

  /// Throws DomainError outside the open strip.
  ValueSlope eval(double x, double t) const;
  double value(double x, double t) const { return eval(x, t).value; }
  /// Curvature-driven speed of the graph, sign * lambda.
  double speed() const { return sign * lambda; }
};

/// The upward barrier u+(x,t) = u^l(x + pi/l, t) - 3l on (-pi/l, 0) and the
/// downward barrier u-(x,t) = -u^l(x,t) + 3l on (0, pi/l).
struct BarrierPair {
  GrimReaper upper;
  GrimReaper lower;
};
BarrierPair barrier_pair_prop12(double lambda);

/// Members u_j(x,t) = (-1)^j [u^k(x - j pi/k, t) - 2k], j in [-k, k], each on
/// j pi/k < x < (j+1) pi/k. Even members translate up, odd ones down.
class AlternatingFamily {
 public:
  explicit AlternatingFamily(int k);

  int k() const { return k_; }
  GrimReaper member(int j) const;
  /// Index of the member whose strip contains x, or nothing at strip edges.
  bool member_at(double x, int& j) const;
  double midpoint(int j) const;

 private:
  int k_;
};

double alternating_eval(const AlternatingFamily& fam, int j, double x, double t);

/// Sphere of radius sqrt(rho^2 - 2nt) centered at height y0 over the origin.
/// sign = -1 selects the lower hemisphere (an upper barrier for graphs below).
struct SphereBarrier {
  double rho = 1.0;
  double center_height = 0.0;
  int n = 1;
  int sign = -1;

  double radius2(double t) const { return rho * rho - 2.0 * n * t; }
};

double sphere_barrier_height(const SphereBarrier& b, const Point& x, double t);

/// Compact smooth step: 0 for s <= 0, 1 for s >= 1, C-infinity in between.
double smooth_step(double s);
/// exp(1 - 1/(1 - s^2)) on |s| < 1, zero outside.
double compact_bump(double s);
/// Plateau of height 1 on [a + width, b - width], support [a, b].
double plateau(double x, double a, double b, double width);

/// Dip of depth 3l + l/4 on (-pi/l, 0) and bump of the same height on
/// (0, pi/l), verified on the grid to lie strictly below u+ and above u-.
ScalarField initial_data_prop12(double lambda, const GridPtr& grid);

/// Alternating plateaus of height (2k + k/4) on the strips of u_j,
/// j = -k .. k-1, below the upward members and above the downward ones.
ScalarField initial_data_prop32(int k, const GridPtr& grid);

}  // namespace mcf
