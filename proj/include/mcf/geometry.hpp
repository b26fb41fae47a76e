#pragma once

#include <optional>
#include <vector>

#include "mcf/grid.hpp"
#include "mcf/trajectory.hpp"

namespace mcf {

/// Derived quantities of the graph of u.
struct GeometryFields {
  VectorField du;
  /// Volume element sqrt(1 + |du|^2), with du the nodal gradient.
  ScalarField v;
  /// H = -div(du / v), so u_t = -v H for the flow.
  ScalarField H;
  /// Squared curvature of the curve, present only for n = 1.
  std::optional<ScalarField> A2;
};

/// Volume element without overflow for very steep slopes.
double volume_element(double slope2);

GeometryFields compute_geometry(const ScalarField& u);

/// Intrinsic Laplacian of f on the graph of u, (1/v) div(v G grad f) with
/// G = I - du du^T / v^2, in flux form. Boundary nodes are extrapolated.
ScalarField laplace_beltrami(const ScalarField& u, const ScalarField& f);

/// Squared length of the tangential gradient, <G grad f, grad f>.
ScalarField tangential_gradient2(const ScalarField& u, const ScalarField& f);

namespace detail {

/// Face data of the graph operator. Faces along axis a join node i and
/// i + stride(a); they are addressed by the flat index of the lower node.
struct FaceData {
  /// Normal difference quotient of u across each face.
  std::array<std::vector<double>, 2> slope;
  /// Volume element at each face, using the face-averaged tangential slope.
  std::array<std::vector<double>, 2> vf;
};

FaceData face_data(const ScalarField& u, const VectorField& du);

/// Flux-form div(du / v) at interior nodes (boundary entries left at zero).
std::vector<double> curvature_divergence(const Grid& g, const FaceData& faces);

/// Harmonic mean of the adjacent face volume elements at interior nodes.
std::vector<double> node_factor(const Grid& g, const FaceData& faces);

}  // namespace detail

// ---------------------------------------------------------------- identities
//
// Time derivatives follow the normal motion of the surface: for a quantity g
// given in graph coordinates, d_t g = g_t|x - (u_t / v^2) <du, dg>. Fixed-x
// differences are taken centrally over the stored snapshots.

/// (d_t - Lap)v + |A|^2 v + 2 |grad v|^2 / v at snapshot time t (n = 1).
ScalarField heat_residual_v(const FlowTrajectory& traj, double t);

/// (d_t - Lap)v + 2 |grad v|^2 / v at time t; nonpositive for the exact flow
/// in any dimension.
ScalarField heat_excess_v(const FlowTrajectory& traj, double t);

/// Value of (d_t - Lap)(1 - |x|^2 - 2nt) at time t; nonpositive for the flow.
ScalarField heat_residual_eta(const FlowTrajectory& traj, double t);

/// Residual of the heat operator on exp(a y^2 / t), y = u, against
///   -(e / t^2) [a y^2 + 4 a^2 y^2 |grad y|^2 + 2 a t |grad y|^2]
/// with |grad y|^2 = |du|^2 / v^2. Requires t > 0 and a <= -2.
ScalarField heat_residual_exp(const FlowTrajectory& traj, double t, double a);

/// Largest value of eta e^{a u^2 / t} v over snapshots with t > 0 and nodes
/// where eta = 1 - |x|^2 - 2nt > 0. Throws PreconditionError if u < 1 there.
double phi_v_max(const FlowTrajectory& traj, double a);

/// Max |value| over nodes at least `margin` nodes away from the boundary.
double interior_max_abs(const ScalarField& f, std::size_t margin = 2);
double interior_max(const ScalarField& f, std::size_t margin = 2);

}  // namespace mcf
