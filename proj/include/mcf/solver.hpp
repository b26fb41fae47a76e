#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "mcf/grid.hpp"
#include "mcf/trajectory.hpp"

namespace mcf {

/// One time step of u_t = v div(du / v) with Dirichlet data at the new time.
///
/// Explicit: u' = u + dt c div(du / v), where div uses face fluxes du/v and c
/// is the harmonic mean of the adjacent face volume elements. This keeps every
/// update a convex combination of neighbours when dt <= h^2 / (2n).
///
/// Semi-implicit: the same operator with c and the face volume elements frozen
/// at the current level, solved for u' (tridiagonal elimination in 1D,
/// conjugate gradients in 2D).
ScalarField step(const ScalarField& u, double dt, Scheme scheme,
                 const Boundary& boundary, double linear_tolerance = 1e-10);

/// Repeated steps from u0 to config.t_end. Steps are shortened to land exactly
/// on every snapshot time.
FlowTrajectory evolve(const ScalarField& u0, const SolverConfig& config);

enum class Relation { Below, Above };

struct Violation {
  double time;
  Point x;
  double gap;
};

struct ComparisonReport {
  /// Smallest signed gap: barrier - u for Below, u - barrier for Above.
  double min_gap;
  std::size_t points_checked = 0;
  std::optional<Violation> first_violation;
  double slack = 0.0;
  bool pass = true;
};

using SpaceTimeFunction = std::function<double(const Point&, double)>;
using SpaceTimePredicate = std::function<bool(const Point&, double)>;

/// Checks u < barrier (Below) or u > barrier (Above) at every snapshot node
/// inside `region`. Passes when the smallest gap exceeds -slack.
ComparisonReport comparison_check(const FlowTrajectory& traj,
                                  const SpaceTimeFunction& barrier,
                                  Relation relation,
                                  const SpaceTimePredicate& region,
                                  double slack = 0.0);

// ---------------------------------------------------------------- export

/// Long-format CSV: t, x[, y], u.
void write_trajectory_csv(const FlowTrajectory& traj, std::ostream& out);
/// Wide-format CSV: x[, y] then one u column per snapshot.
void write_series_csv(const FlowTrajectory& traj, std::ostream& out);

/// Binary snapshot file, little-endian:
///   "MCFG" | u16 version | u16 dim | u32 count[dim] | f64 lower[dim]
///   | f64 spacing[dim] | u32 snapshots | (f64 time, f64 values[N]) ...
/// Values are stored with axis 0 varying fastest. Uniform grids only.
void write_trajectory_binary(const FlowTrajectory& traj, std::ostream& out);
FlowTrajectory read_trajectory_binary(std::istream& in);

inline constexpr std::uint16_t kBinaryVersion = 1;

}  // namespace mcf
