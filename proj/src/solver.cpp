#include "mcf/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>

#include "mcf/geometry.hpp"

namespace mcf {

namespace {

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void apply_boundary(const Grid& g, const Boundary& boundary, double t,
                    std::vector<double>& u) {
  if (boundary.is_frozen()) return;
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (g.on_boundary(n)) u[n] = boundary.prescribed(g.point(n), t);
  }
}

// Thomas algorithm on rows with identity boundary rows.
void solve_tridiagonal(std::vector<double>& lower, std::vector<double>& diag,
                       std::vector<double>& upper, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = lower[i] / diag[i - 1];
    diag[i] -= m * upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
  }
}

std::vector<double> semi_implicit_1d(const ScalarField& u, double dt,
                                     const detail::FaceData& faces,
                                     const std::vector<double>& c,
                                     const std::vector<double>& boundary_values) {
  const Grid& g = u.grid();
  const auto x = g.axis(0).nodes();
  const std::size_t n = g.size();
  std::vector<double> lo(n, 0.0), di(n, 1.0), up(n, 0.0), rhs(u.values().begin(), u.values().end());
  rhs.front() = boundary_values.front();
  rhs.back() = boundary_values.back();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double dual = 0.5 * (x[i + 1] - x[i - 1]);
    const double aR = dt * c[i] / (dual * (x[i + 1] - x[i]) * faces.vf[0][i]);
    const double aL = dt * c[i] / (dual * (x[i] - x[i - 1]) * faces.vf[0][i - 1]);
    lo[i] = -aL;
    up[i] = -aR;
    di[i] = 1.0 + aL + aR;
  }
  solve_tridiagonal(lo, di, up, rhs);
  return rhs;
}

std::vector<double> semi_implicit_2d(const ScalarField& u, double dt,
                                     const detail::FaceData& faces,
                                     const std::vector<double>& c,
                                     const std::vector<double>& boundary_values,
                                     double tolerance) {
  const Grid& g = u.grid();
  std::vector<long> unknown(g.size(), -1);
  long m = 0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (!g.on_boundary(n)) unknown[n] = m++;
  }
  auto dual = [&](int a, std::size_t n) {
    const auto x = g.axis(a).nodes();
    const std::size_t i = g.coords(n)[a];
    return 0.5 * (x[i + 1] - x[i - 1]);
  };
  // Rows scaled by the dual cell area make the operator symmetric.
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(5 * static_cast<std::size_t>(m));
  Eigen::VectorXd b(m), x0(m);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const long row = unknown[n];
    if (row < 0) continue;
    const double area = dual(0, n) * dual(1, n);
    double diag = area / (dt * c[n]);
    double r = diag * u[n];
    for (int a = 0; a < 2; ++a) {
      const auto x = g.axis(a).nodes();
      const std::size_t i = g.coords(n)[a];
      const std::size_t st = g.stride(a);
      const double other = area / dual(a, n);
      const double wR = other / ((x[i + 1] - x[i]) * faces.vf[a][n]);
      const double wL = other / ((x[i] - x[i - 1]) * faces.vf[a][n - st]);
      diag += wR + wL;
      for (auto [nb, w] : {std::pair{n + st, wR}, std::pair{n - st, wL}}) {
        if (unknown[nb] >= 0) {
          trips.emplace_back(row, unknown[nb], -w);
        } else {
          r += w * boundary_values[nb];
        }
      }
    }
    trips.emplace_back(row, row, diag);
    b[row] = r;
    x0[row] = u[n];
  }
  Eigen::SparseMatrix<double> A(m, m);
  A.setFromTriplets(trips.begin(), trips.end());
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
  cg.compute(A);
  const double bnorm = std::max(b.norm(), 1.0);
  cg.setTolerance(std::max(tolerance / bnorm, 1e-15));
  cg.setMaxIterations(std::max<long>(1000, 4 * m));
  Eigen::VectorXd sol = cg.solveWithGuess(b, x0);
  const double residual = (A * sol - b).norm();
  if (cg.info() != Eigen::Success && residual > tolerance) {
    throw SolverError("semi-implicit linear solve did not converge: residual " +
                      num(residual) + " after " + std::to_string(cg.iterations()) +
                      " iterations");
  }
  std::vector<double> out = boundary_values;
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (unknown[n] >= 0) out[n] = sol[unknown[n]];
  }
  return out;
}

}  // namespace

ScalarField step(const ScalarField& u, double dt, Scheme scheme,
                 const Boundary& boundary, double linear_tolerance) {
  if (!(dt > 0.0)) throw ParameterError("time step must be positive");
  const Grid& g = u.grid();
  const double t_new = u.time() + dt;
  if (scheme == Scheme::ExplicitEuler) {
    const double h = g.min_spacing();
    const double limit = h * h / (2.0 * g.dim());
    if (dt > limit * (1.0 + 1e-6)) {
      throw SolverError("explicit step dt = " + num(dt) + " violates CFL limit " + num(limit));
    }
  }
  const auto du = gradient(u);
  const auto faces = detail::face_data(u, du);
  const auto c = detail::node_factor(g, faces);

  std::vector<double> next(u.values().begin(), u.values().end());
  apply_boundary(g, boundary, t_new, next);

  if (scheme == Scheme::ExplicitEuler) {
    const auto div = detail::curvature_divergence(g, faces);
    for (std::size_t n = 0; n < g.size(); ++n) {
      if (!g.on_boundary(n)) next[n] = u[n] + dt * c[n] * div[n];
    }
  } else if (g.dim() == 1) {
    next = semi_implicit_1d(u, dt, faces, c, next);
  } else {
    next = semi_implicit_2d(u, dt, faces, c, next, linear_tolerance);
  }
  for (std::size_t n = 0; n < next.size(); ++n) {
    if (!std::isfinite(next[n])) {
      throw SolverError("non-finite value at t = " + num(t_new) + ", x = " +
                        num(g.point(n)[0]));
    }
  }
  return ScalarField(u.grid_ptr(), std::move(next), t_new);
}

FlowTrajectory evolve(const ScalarField& u0, const SolverConfig& config) {
  config.validate();
  std::vector<double> targets = config.snapshot_times;
  targets.push_back(config.t_end);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  if (!targets.empty() && targets.front() == 0.0) targets.erase(targets.begin());

  const double dt_nominal = config.nominal_dt(u0.grid());
  ScalarField initial(u0.grid_ptr(),
                      std::vector<double>(u0.values().begin(), u0.values().end()), 0.0);
  std::vector<ScalarField> snaps{initial};
  ScalarField current = initial;
  double t = 0.0;
  for (double target : targets) {
    while (t < target) {
      double dt = target - t;
      double t_next = target;
      if (dt > dt_nominal * (1.0 + 1e-6)) {
        dt = dt_nominal;
        t_next = t + dt;
      }
      ScalarField stepped = step(current, dt, config.scheme, config.boundary,
                                 config.linear_tolerance);
      current = ScalarField(stepped.grid_ptr(),
                            std::vector<double>(stepped.values().begin(), stepped.values().end()),
                            t_next);
      t = t_next;
    }
    snaps.push_back(current);
  }
  return FlowTrajectory(std::move(snaps), config);
}

ComparisonReport comparison_check(const FlowTrajectory& traj,
                                  const SpaceTimeFunction& barrier,
                                  Relation relation,
                                  const SpaceTimePredicate& region, double slack) {
  ComparisonReport rep;
  rep.min_gap = std::numeric_limits<double>::infinity();
  rep.slack = slack;
  for (const auto& s : traj.snapshots()) {
    const Grid& g = s.grid();
    for (std::size_t n = 0; n < g.size(); ++n) {
      const Point p = g.point(n);
      if (!region(p, s.time())) continue;
      const double b = barrier(p, s.time());
      const double gap = relation == Relation::Below ? b - s[n] : s[n] - b;
      ++rep.points_checked;
      rep.min_gap = std::min(rep.min_gap, gap);
      if (!(gap > -slack) && !rep.first_violation) {
        rep.first_violation = Violation{s.time(), p, gap};
      }
    }
  }
  rep.pass = !rep.first_violation.has_value();
  return rep;
}

// ---------------------------------------------------------------- export

void write_trajectory_csv(const FlowTrajectory& traj, std::ostream& out) {
  const Grid& g = traj.grid();
  out << (g.dim() == 1 ? "t,x,u\n" : "t,x,y,u\n");
  for (const auto& s : traj.snapshots()) {
    for (std::size_t n = 0; n < g.size(); ++n) {
      const Point p = g.point(n);
      out << num(s.time()) << ',' << num(p[0]);
      if (g.dim() == 2) out << ',' << num(p[1]);
      out << ',' << num(s[n]) << '\n';
    }
  }
}

void write_series_csv(const FlowTrajectory& traj, std::ostream& out) {
  const Grid& g = traj.grid();
  out << (g.dim() == 1 ? "x" : "x,y");
  for (const auto& s : traj.snapshots()) out << ",u(t=" << num(s.time()) << ')';
  out << '\n';
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Point p = g.point(n);
    out << num(p[0]);
    if (g.dim() == 2) out << ',' << num(p[1]);
    for (const auto& s : traj.snapshots()) out << ',' << num(s[n]);
    out << '\n';
  }
}

namespace {

template <class T>
void put(std::ostream& out, T value) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &value, sizeof(T));
    std::reverse(b, b + sizeof(T));
    std::memcpy(&value, b, sizeof(T));
  }
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw Error("truncated binary trajectory");
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &value, sizeof(T));
    std::reverse(b, b + sizeof(T));
    std::memcpy(&value, b, sizeof(T));
  }
  return value;
}

}  // namespace

void write_trajectory_binary(const FlowTrajectory& traj, std::ostream& out) {
  const Grid& g = traj.grid();
  if (!g.is_uniform()) throw InvalidGrid("binary export supports uniform grids only");
  out.write("MCFG", 4);
  put<std::uint16_t>(out, kBinaryVersion);
  put<std::uint16_t>(out, static_cast<std::uint16_t>(g.dim()));
  for (int a = 0; a < g.dim(); ++a) put<std::uint32_t>(out, static_cast<std::uint32_t>(g.count(a)));
  for (int a = 0; a < g.dim(); ++a) put<double>(out, g.axis(a).lower());
  for (int a = 0; a < g.dim(); ++a) put<double>(out, g.axis(a).spacing());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(traj.size()));
  for (const auto& s : traj.snapshots()) {
    put<double>(out, s.time());
    for (double v : s.values()) put<double>(out, v);
  }
}

FlowTrajectory read_trajectory_binary(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "MCFG", 4) != 0) throw Error("not an MCFG trajectory file");
  const auto version = get<std::uint16_t>(in);
  if (version != kBinaryVersion) throw Error("unsupported MCFG version " + std::to_string(version));
  const auto dim = get<std::uint16_t>(in);
  if (dim < 1 || dim > 2) throw Error("MCFG dimension must be 1 or 2");
  std::vector<std::uint32_t> counts(dim);
  std::vector<double> lower(dim), spacing(dim);
  for (auto& c : counts) c = get<std::uint32_t>(in);
  for (auto& l : lower) l = get<double>(in);
  for (auto& h : spacing) h = get<double>(in);
  std::vector<Axis> axes;
  for (int a = 0; a < dim; ++a) {
    axes.push_back(Axis::uniform(lower[a], lower[a] + spacing[a] * (counts[a] - 1), counts[a]));
  }
  auto grid = Grid::from_axes(std::move(axes));
  const auto nsnap = get<std::uint32_t>(in);
  std::vector<ScalarField> snaps;
  for (std::uint32_t k = 0; k < nsnap; ++k) {
    const double t = get<double>(in);
    std::vector<double> v(grid->size());
    for (double& x : v) x = get<double>(in);
    snaps.emplace_back(grid, std::move(v), t);
  }
  return FlowTrajectory(std::move(snaps));
}

}  // namespace mcf
