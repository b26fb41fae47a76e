#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "mcf/errors.hpp"

namespace mcf {

/// Coordinates of a grid point. Only the first `dim` entries are meaningful.
using Point = std::array<double, 2>;

/// Nodes along one coordinate axis, either equally spaced or geometrically
/// graded away from a focus point.
class Axis {
 public:
  /// `count` equally spaced nodes on [lower, upper]; count >= 3.
  static Axis uniform(double lower, double upper, std::size_t count);

  /// Symmetric stretching about `focus`: spacing starts at `h_min` next to the
  /// focus and grows by `ratio` per cell until it reaches `h_max`. The focus
  /// is always a node and the outermost nodes are pinned to lower/upper.
  static Axis graded(double lower, double upper, double focus, double h_min,
                     double ratio, double h_max);

  std::size_t size() const { return nodes_.size(); }
  double lower() const { return nodes_.front(); }
  double upper() const { return nodes_.back(); }
  double operator[](std::size_t i) const { return nodes_[i]; }
  std::span<const double> nodes() const { return nodes_; }

  bool is_uniform() const { return uniform_; }
  /// Uniform spacing; throws InvalidGrid on a graded axis.
  double spacing() const;
  double min_spacing() const;

  /// Index of the node closest to x.
  std::size_t nearest(double x) const;

 private:
  Axis(std::vector<double> nodes, bool uniform, double h);

  std::vector<double> nodes_;
  bool uniform_ = true;
  double h_ = 0.0;
};

/// Tensor-product grid in one or two dimensions. Flat index is
/// i + count(0) * j, so axis 0 varies fastest.
class Grid {
 public:
  explicit Grid(std::vector<Axis> axes);

  static std::shared_ptr<const Grid> line(double lower, double upper,
                                          std::size_t count);
  static std::shared_ptr<const Grid> square(double lower, double upper,
                                            std::size_t count);
  static std::shared_ptr<const Grid> from_axes(std::vector<Axis> axes);

  int dim() const { return static_cast<int>(axes_.size()); }
  const Axis& axis(int a) const { return axes_[a]; }
  std::size_t count(int a) const { return axes_[a].size(); }
  std::size_t size() const { return size_; }
  std::size_t stride(int a) const { return a == 0 ? 1 : axes_[0].size(); }

  std::size_t index(std::size_t i, std::size_t j = 0) const {
    return i + axes_[0].size() * j;
  }
  /// Per-axis indices of a flat index.
  std::array<std::size_t, 2> coords(std::size_t flat) const;
  Point point(std::size_t flat) const;

  bool is_uniform() const;
  double min_spacing() const;
  /// True if the flat index lies on the outer boundary of the box.
  bool on_boundary(std::size_t flat) const;
  /// Flat index of the node closest to p.
  std::size_t nearest(const Point& p) const;

  bool operator==(const Grid& other) const;

 private:
  std::vector<Axis> axes_;
  std::size_t size_ = 0;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Real values sampled on every node of a grid at one time level.
class ScalarField {
 public:
  ScalarField(GridPtr grid, std::vector<double> values, double time = 0.0);

  static ScalarField constant(GridPtr grid, double c, double time = 0.0);
  static ScalarField sample(GridPtr grid,
                            const std::function<double(const Point&)>& f,
                            double time = 0.0);

  const GridPtr& grid_ptr() const { return grid_; }
  const Grid& grid() const { return *grid_; }
  double time() const { return time_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  double max_abs() const;
  double min() const;
  double max() const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
  double time_ = 0.0;
};

/// One real component per axis per grid node.
class VectorField {
 public:
  VectorField(GridPtr grid, std::vector<std::vector<double>> components);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  int dim() const { return static_cast<int>(components_.size()); }
  std::span<const double> component(int a) const { return components_[a]; }
  /// Euclidean norm squared at a node.
  double norm2(std::size_t i) const;

 private:
  GridPtr grid_;
  std::vector<std::vector<double>> components_;
};

/// Region {x : level(x) <= 0}. Cut cells locate the boundary by linear
/// interpolation of the level function between nodes.
struct Region {
  std::function<double(const Point&)> level;

  bool contains(const Point& p) const { return level(p) <= 0.0; }

  static Region everywhere();
  static Region ball(double radius, Point center = {0.0, 0.0});
  static Region interval(double a, double b);
};

/// Second-order first derivatives: central in the interior, one-sided
/// three-point at the ends of each axis.
VectorField gradient(const ScalarField& f);

/// Flux-form divergence: midpoint-averaged fluxes differenced across each
/// node's dual cell; one-sided three-point differences at boundary nodes.
ScalarField divergence(const VectorField& F);

/// Trapezoid rule over a region with fractional weights on cut cells.
/// Throws EmptyRegion if no node lies in the region.
double quadrature(const ScalarField& f, const Region& region);
double quadrature(const ScalarField& f);

/// Pointwise product and helpers used across modules.
ScalarField multiply(const ScalarField& a, const ScalarField& b);
void require_same_grid(const ScalarField& a, const ScalarField& b);

/// Every other node along each axis. Requires (count - 1) even on every
/// uniform axis.
GridPtr coarsen(const Grid& grid);
ScalarField restrict_to(const ScalarField& f, const GridPtr& coarse);

/// Linear interpolation of a 1D field at x.
double interpolate(const ScalarField& f, double x);

namespace detail {

/// Weights of the three-point first-derivative stencil on nodes x0 < x1 < x2
/// evaluated at `at` (one of the nodes).
std::array<double, 3> first_derivative_weights(double x0, double x1, double x2,
                                               double at);
/// Three-point second-derivative weights (constant over the stencil).
std::array<double, 3> second_derivative_weights(double x0, double x1,
                                                 double x2);

/// Calls fn(base, stride, n) for every grid line running along `axis`.
template <class Fn>
void for_each_line(const Grid& g, int axis, Fn&& fn) {
  const std::size_t n = g.count(axis);
  const std::size_t stride = g.stride(axis);
  if (g.dim() == 1) {
    fn(std::size_t{0}, stride, n);
    return;
  }
  const int other = 1 - axis;
  for (std::size_t k = 0; k < g.count(other); ++k) {
    fn(k * g.stride(other), stride, n);
  }
}

/// Overwrites boundary entries with linear extrapolation from the two nearest
/// interior nodes along each axis (second order on smooth data).
void extrapolate_boundary(const Grid& g, std::vector<double>& values);

}  // namespace detail

}  // namespace mcf
