#include "mcf/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mcf {

// ---------------------------------------------------------------- Axis

Axis::Axis(std::vector<double> nodes, bool uniform, double h)
    : nodes_(std::move(nodes)), uniform_(uniform), h_(h) {}

Axis Axis::uniform(double lower, double upper, std::size_t count) {
  if (count < 3) {
    throw InvalidGrid("axis needs at least 3 points, got " +
                      std::to_string(count));
  }
  if (!(upper > lower) || !std::isfinite(lower) || !std::isfinite(upper)) {
    throw InvalidGrid("axis bounds must be finite with lower < upper");
  }
  const double h = (upper - lower) / static_cast<double>(count - 1);
  std::vector<double> nodes(count);
  // Weighted form keeps symmetric grids exactly symmetric about their center.
  const double last = static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    const double s = static_cast<double>(i);
    nodes[i] = (lower * (last - s) + upper * s) / last;
  }
  return Axis(std::move(nodes), true, h);
}

Axis Axis::graded(double lower, double upper, double focus, double h_min,
                  double ratio, double h_max) {
  if (!(lower < focus && focus < upper)) {
    throw InvalidGrid("graded axis focus must lie strictly inside the bounds");
  }
  if (!(h_min > 0.0) || !(ratio >= 1.0) || !(h_max >= h_min)) {
    throw InvalidGrid("graded axis needs h_min > 0, ratio >= 1, h_max >= h_min");
  }
  // Offsets from the focus out to `extent`, last one pinned to the extent.
  auto side = [&](double extent) {
    std::vector<double> offsets{0.0};
    double h = h_min;
    while (offsets.back() + h < extent) {
      offsets.push_back(offsets.back() + h);
      h = std::min(h * ratio, h_max);
    }
    if (extent - offsets.back() < 0.5 * h && offsets.size() > 1) {
      offsets.pop_back();
    }
    offsets.push_back(extent);
    return offsets;
  };
  const auto right = side(upper - focus);
  const auto left = side(focus - lower);
  std::vector<double> nodes;
  nodes.reserve(left.size() + right.size() - 1);
  for (std::size_t k = left.size(); k-- > 1;) nodes.push_back(focus - left[k]);
  for (double off : right) nodes.push_back(focus + off);
  nodes.front() = lower;
  nodes.back() = upper;
  if (nodes.size() < 3) throw InvalidGrid("graded axis has fewer than 3 nodes");
  return Axis(std::move(nodes), false, 0.0);
}

double Axis::spacing() const {
  if (!uniform_) throw InvalidGrid("spacing() requested on a graded axis");
  return h_;
}

double Axis::min_spacing() const {
  if (uniform_) return h_;
  double h = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    h = std::min(h, nodes_[i] - nodes_[i - 1]);
  }
  return h;
}

std::size_t Axis::nearest(double x) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), x);
  if (it == nodes_.begin()) return 0;
  if (it == nodes_.end()) return nodes_.size() - 1;
  const std::size_t hi = static_cast<std::size_t>(it - nodes_.begin());
  return (x - nodes_[hi - 1] <= nodes_[hi] - x) ? hi - 1 : hi;
}

// ---------------------------------------------------------------- Grid

Grid::Grid(std::vector<Axis> axes) : axes_(std::move(axes)) {
  if (axes_.empty() || axes_.size() > 2) {
    throw InvalidGrid("grid dimension must be 1 or 2");
  }
  size_ = 1;
  for (const auto& a : axes_) {
    if (a.size() < 3) throw InvalidGrid("axis needs at least 3 points");
    size_ *= a.size();
  }
}

GridPtr Grid::line(double lower, double upper, std::size_t count) {
  return std::make_shared<const Grid>(
      std::vector<Axis>{Axis::uniform(lower, upper, count)});
}

GridPtr Grid::square(double lower, double upper, std::size_t count) {
  auto a = Axis::uniform(lower, upper, count);
  return std::make_shared<const Grid>(std::vector<Axis>{a, a});
}

GridPtr Grid::from_axes(std::vector<Axis> axes) {
  return std::make_shared<const Grid>(std::move(axes));
}

std::array<std::size_t, 2> Grid::coords(std::size_t flat) const {
  const std::size_t nx = axes_[0].size();
  return {flat % nx, flat / nx};
}

Point Grid::point(std::size_t flat) const {
  const auto c = coords(flat);
  Point p{axes_[0][c[0]], 0.0};
  if (dim() == 2) p[1] = axes_[1][c[1]];
  return p;
}

bool Grid::is_uniform() const {
  return std::all_of(axes_.begin(), axes_.end(),
                     [](const Axis& a) { return a.is_uniform(); });
}

double Grid::min_spacing() const {
  double h = std::numeric_limits<double>::infinity();
  for (const auto& a : axes_) h = std::min(h, a.min_spacing());
  return h;
}

bool Grid::on_boundary(std::size_t flat) const {
  const auto c = coords(flat);
  for (int a = 0; a < dim(); ++a) {
    if (c[a] == 0 || c[a] + 1 == axes_[a].size()) return true;
  }
  return false;
}

std::size_t Grid::nearest(const Point& p) const {
  const std::size_t i = axes_[0].nearest(p[0]);
  const std::size_t j = dim() == 2 ? axes_[1].nearest(p[1]) : 0;
  return index(i, j);
}

bool Grid::operator==(const Grid& other) const {
  if (dim() != other.dim()) return false;
  for (int a = 0; a < dim(); ++a) {
    const auto x = axes_[a].nodes();
    const auto y = other.axes_[a].nodes();
    if (!std::equal(x.begin(), x.end(), y.begin(), y.end())) return false;
  }
  return true;
}

// ---------------------------------------------------------------- fields

ScalarField::ScalarField(GridPtr grid, std::vector<double> values, double time)
    : grid_(std::move(grid)), values_(std::move(values)), time_(time) {
  if (!grid_) throw InvalidGrid("scalar field without a grid");
  if (values_.size() != grid_->size()) {
    throw InvalidGrid("scalar field has " + std::to_string(values_.size()) +
                      " values for " + std::to_string(grid_->size()) +
                      " grid points");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error("scalar field contains a non-finite value");
  }
  if (!std::isfinite(time_) || time_ < 0.0) {
    throw Error("scalar field time must be finite and non-negative");
  }
}

ScalarField ScalarField::constant(GridPtr grid, double c, double time) {
  const std::size_t n = grid->size();
  return ScalarField(std::move(grid), std::vector<double>(n, c), time);
}

ScalarField ScalarField::sample(GridPtr grid,
                                const std::function<double(const Point&)>& f,
                                double time) {
  std::vector<double> v(grid->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid->point(i));
  return ScalarField(std::move(grid), std::move(v), time);
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double ScalarField::min() const {
  return *std::min_element(values_.begin(), values_.end());
}

double ScalarField::max() const {
  return *std::max_element(values_.begin(), values_.end());
}

VectorField::VectorField(GridPtr grid, std::vector<std::vector<double>> components)
    : grid_(std::move(grid)), components_(std::move(components)) {
  if (static_cast<int>(components_.size()) != grid_->dim()) {
    throw InvalidGrid("vector field component count must equal grid dimension");
  }
  for (const auto& c : components_) {
    if (c.size() != grid_->size()) throw InvalidGrid("vector component size mismatch");
    for (double v : c) {
      if (!std::isfinite(v)) throw Error("vector field contains a non-finite value");
    }
  }
}

double VectorField::norm2(std::size_t i) const {
  double s = 0.0;
  for (const auto& c : components_) s += c[i] * c[i];
  return s;
}

Region Region::everywhere() {
  return Region{[](const Point&) { return -1.0; }};
}

Region Region::ball(double radius, Point center) {
  return Region{[radius, center](const Point& p) {
    return std::hypot(p[0] - center[0], p[1] - center[1]) - radius;
  }};
}

Region Region::interval(double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  return Region{[mid, half](const Point& p) { return std::abs(p[0] - mid) - half; }};
}

// ---------------------------------------------------------------- stencils

namespace detail {

std::array<double, 3> first_derivative_weights(double x0, double x1, double x2,
                                               double at) {
  // Derivative of the Lagrange basis through (x0, x1, x2).
  return {((at - x1) + (at - x2)) / ((x0 - x1) * (x0 - x2)),
          ((at - x0) + (at - x2)) / ((x1 - x0) * (x1 - x2)),
          ((at - x0) + (at - x1)) / ((x2 - x0) * (x2 - x1))};
}

std::array<double, 3> second_derivative_weights(double x0, double x1,
                                                double x2) {
  return {2.0 / ((x0 - x1) * (x0 - x2)), 2.0 / ((x1 - x0) * (x1 - x2)),
          2.0 / ((x2 - x0) * (x2 - x1))};
}

void extrapolate_boundary(const Grid& g, std::vector<double>& values) {
  for (int a = 0; a < g.dim(); ++a) {
    const auto x = g.axis(a).nodes();
    const int other = 1 - a;
    for_each_line(g, a, [&](std::size_t base, std::size_t stride, std::size_t n) {
      // Lines lying on the other axis' boundary are handled by that axis.
      if (g.dim() == 2 && a == 0) {
        const std::size_t k = base / g.stride(other);
        if (k == 0 || k + 1 == g.count(other)) return;
      }
      auto at = [&](std::size_t i) -> double& { return values[base + stride * i]; };
      at(0) = at(1) + (at(1) - at(2)) * (x[0] - x[1]) / (x[1] - x[2]);
      at(n - 1) = at(n - 2) +
                  (at(n - 2) - at(n - 3)) * (x[n - 1] - x[n - 2]) / (x[n - 2] - x[n - 3]);
    });
  }
}

}  // namespace detail

VectorField gradient(const ScalarField& f) {
  const Grid& g = f.grid();
  const auto vals = f.values();
  std::vector<std::vector<double>> comps(g.dim(), std::vector<double>(g.size()));
  for (int a = 0; a < g.dim(); ++a) {
    const auto x = g.axis(a).nodes();
    auto& out = comps[a];
    detail::for_each_line(g, a, [&](std::size_t base, std::size_t stride, std::size_t n) {
      auto v = [&](std::size_t i) { return vals[base + stride * i]; };
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = i == 0 ? 1 : (i + 1 == n ? n - 2 : i);
        const auto w = detail::first_derivative_weights(x[c - 1], x[c], x[c + 1], x[i]);
        out[base + stride * i] = w[0] * v(c - 1) + w[1] * v(c) + w[2] * v(c + 1);
      }
    });
  }
  return VectorField(f.grid_ptr(), std::move(comps));
}

ScalarField divergence(const VectorField& F) {
  const Grid& g = F.grid();
  std::vector<double> out(g.size(), 0.0);
  for (int a = 0; a < g.dim(); ++a) {
    const auto x = g.axis(a).nodes();
    const auto comp = F.component(a);
    detail::for_each_line(g, a, [&](std::size_t base, std::size_t stride, std::size_t n) {
      auto v = [&](std::size_t i) { return comp[base + stride * i]; };
      for (std::size_t i = 1; i + 1 < n; ++i) {
        const double right = 0.5 * (v(i) + v(i + 1));
        const double left = 0.5 * (v(i - 1) + v(i));
        out[base + stride * i] += (right - left) / (0.5 * (x[i + 1] - x[i - 1]));
      }
      for (std::size_t i : {std::size_t{0}, n - 1}) {
        const std::size_t c = i == 0 ? 1 : n - 2;
        const auto w = detail::first_derivative_weights(x[c - 1], x[c], x[c + 1], x[i]);
        out[base + stride * i] += w[0] * v(c - 1) + w[1] * v(c) + w[2] * v(c + 1);
      }
    });
  }
  return ScalarField(F.grid_ptr(), std::move(out));
}

namespace {

// Integral over [x0, x1] of the linear interpolant of (f0, f1), restricted to
// the part where the linear interpolant of (p0, p1) is <= 0.
double cut_segment(double x0, double x1, double f0, double f1, double p0,
                   double p1) {
  const double len = x1 - x0;
  const bool in0 = p0 <= 0.0;
  const bool in1 = p1 <= 0.0;
  if (in0 && in1) return 0.5 * len * (f0 + f1);
  if (!in0 && !in1) return 0.0;
  const double theta = p0 / (p0 - p1);  // crossing location in [0, 1]
  const double fc = f0 + theta * (f1 - f0);
  if (in0) return 0.5 * theta * len * (f0 + fc);
  return 0.5 * (1.0 - theta) * len * (fc + f1);
}

// Cut-cell trapezoid along one line of a grid.
double line_integral(std::span<const double> x, const std::vector<double>& f,
                     const std::vector<double>& phi) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    s += cut_segment(x[i], x[i + 1], f[i], f[i + 1], phi[i], phi[i + 1]);
  }
  return s;
}

}  // namespace

double quadrature(const ScalarField& f, const Region& region) {
  const Grid& g = f.grid();
  const auto vals = f.values();
  std::vector<double> phi(g.size());
  bool any = false;
  for (std::size_t i = 0; i < g.size(); ++i) {
    phi[i] = region.level(g.point(i));
    any = any || phi[i] <= 0.0;
  }
  if (!any) throw EmptyRegion("quadrature region contains no grid point");

  const auto x = g.axis(0).nodes();
  const std::size_t nx = g.count(0);
  if (g.dim() == 1) {
    return line_integral(x, std::vector<double>(vals.begin(), vals.end()), phi);
  }
  // Rows first with cut cells along x, then trapezoid across rows.
  const auto y = g.axis(1).nodes();
  std::vector<double> rows(g.count(1));
  std::vector<double> fr(nx), pr(nx);
  for (std::size_t j = 0; j < g.count(1); ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      fr[i] = vals[g.index(i, j)];
      pr[i] = phi[g.index(i, j)];
    }
    rows[j] = line_integral(x, fr, pr);
  }
  double s = 0.0;
  for (std::size_t j = 0; j + 1 < y.size(); ++j) {
    s += 0.5 * (y[j + 1] - y[j]) * (rows[j] + rows[j + 1]);
  }
  return s;
}

double quadrature(const ScalarField& f) {
  return quadrature(f, Region::everywhere());
}

void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (a.grid_ptr() != b.grid_ptr() && !(a.grid() == b.grid())) {
    throw GridMismatch("fields live on different grids");
  }
}

ScalarField multiply(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] * b[i];
  return ScalarField(a.grid_ptr(), std::move(v), a.time());
}

GridPtr coarsen(const Grid& grid) {
  std::vector<Axis> axes;
  for (int a = 0; a < grid.dim(); ++a) {
    const Axis& ax = grid.axis(a);
    if (!ax.is_uniform() || (ax.size() - 1) % 2 != 0 || ax.size() < 5) {
      throw InvalidGrid("grid cannot be coarsened by a factor of two");
    }
    axes.push_back(Axis::uniform(ax.lower(), ax.upper(), (ax.size() - 1) / 2 + 1));
  }
  return Grid::from_axes(std::move(axes));
}

ScalarField restrict_to(const ScalarField& f, const GridPtr& coarse) {
  const Grid& g = f.grid();
  std::vector<double> v(coarse->size());
  for (std::size_t c = 0; c < v.size(); ++c) {
    const auto ij = coarse->coords(c);
    v[c] = f[g.index(2 * ij[0], 2 * ij[1])];
  }
  return ScalarField(coarse, std::move(v), f.time());
}

double interpolate(const ScalarField& f, double x) {
  const auto nodes = f.grid().axis(0).nodes();
  if (f.grid().dim() != 1) throw InvalidGrid("interpolate() expects a 1D field");
  if (x < nodes.front() || x > nodes.back()) {
    throw DomainError("interpolation point outside the grid");
  }
  auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
  std::size_t hi = static_cast<std::size_t>(it - nodes.begin());
  if (hi >= nodes.size()) hi = nodes.size() - 1;
  const std::size_t lo = hi - 1;
  const double t = (x - nodes[lo]) / (nodes[hi] - nodes[lo]);
  return f[lo] + t * (f[hi] - f[lo]);
}

}  // namespace mcf
