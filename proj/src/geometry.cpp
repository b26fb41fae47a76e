#include "mcf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mcf {

double volume_element(double slope2) {
  if (slope2 > 1e16) return std::sqrt(slope2) * std::sqrt(1.0 + 1.0 / slope2);
  return std::sqrt(1.0 + slope2);
}

namespace detail {

FaceData face_data(const ScalarField& u, const VectorField& du) {
  const Grid& g = u.grid();
  const auto vals = u.values();
  FaceData out;
  for (int a = 0; a < g.dim(); ++a) {
    const auto x = g.axis(a).nodes();
    const std::size_t stride = g.stride(a);
    auto& slope = out.slope[a];
    auto& vf = out.vf[a];
    slope.assign(g.size(), 0.0);
    vf.assign(g.size(), 1.0);
    const auto tangential = g.dim() == 2 ? du.component(1 - a) : std::span<const double>{};
    for (std::size_t f = 0; f < g.size(); ++f) {
      const std::size_t i = g.coords(f)[a];
      if (i + 1 >= g.count(a)) continue;
      const double p = (vals[f + stride] - vals[f]) / (x[i + 1] - x[i]);
      double s2 = p * p;
      if (g.dim() == 2) {
        const double q = 0.5 * (tangential[f] + tangential[f + stride]);
        s2 += q * q;
      }
      slope[f] = p;
      vf[f] = volume_element(s2);
    }
  }
  return out;
}

std::vector<double> curvature_divergence(const Grid& g, const FaceData& faces) {
  std::vector<double> out(g.size(), 0.0);
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (g.on_boundary(n)) continue;
    double s = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      const auto x = g.axis(a).nodes();
      const std::size_t i = g.coords(n)[a];
      const std::size_t st = g.stride(a);
      const double right = faces.slope[a][n] / faces.vf[a][n];
      const double left = faces.slope[a][n - st] / faces.vf[a][n - st];
      s += (right - left) / (0.5 * (x[i + 1] - x[i - 1]));
    }
    out[n] = s;
  }
  return out;
}

std::vector<double> node_factor(const Grid& g, const FaceData& faces) {
  std::vector<double> out(g.size(), 1.0);
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (g.on_boundary(n)) continue;
    double inv = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      const std::size_t st = g.stride(a);
      inv += 1.0 / faces.vf[a][n] + 1.0 / faces.vf[a][n - st];
    }
    out[n] = 2.0 * g.dim() / inv;
  }
  return out;
}

}  // namespace detail

GeometryFields compute_geometry(const ScalarField& u) {
  const Grid& g = u.grid();
  VectorField du = gradient(u);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = volume_element(du.norm2(i));

  const auto faces = detail::face_data(u, du);
  std::vector<double> H = detail::curvature_divergence(g, faces);
  for (double& h : H) h = -h;
  detail::extrapolate_boundary(g, H);

  std::optional<ScalarField> A2;
  if (g.dim() == 1) {
    const auto x = g.axis(0).nodes();
    const auto uv = u.values();
    std::vector<double> upp(g.size(), 0.0);
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
      const auto w = detail::second_derivative_weights(x[i - 1], x[i], x[i + 1]);
      upp[i] = w[0] * uv[i - 1] + w[1] * uv[i] + w[2] * uv[i + 1];
    }
    detail::extrapolate_boundary(g, upp);
    std::vector<double> a2(g.size());
    for (std::size_t i = 0; i < a2.size(); ++i) {
      const double k = upp[i] / (v[i] * v[i] * v[i]);
      a2[i] = k * k;
    }
    A2.emplace(u.grid_ptr(), std::move(a2), u.time());
  }
  return GeometryFields{std::move(du), ScalarField(u.grid_ptr(), std::move(v), u.time()),
                        ScalarField(u.grid_ptr(), std::move(H), u.time()), std::move(A2)};
}

ScalarField laplace_beltrami(const ScalarField& u, const ScalarField& f) {
  require_same_grid(u, f);
  const Grid& g = u.grid();
  const VectorField du = gradient(u);
  const VectorField df = gradient(f);
  const auto faces = detail::face_data(u, du);
  const auto fv = f.values();

  // Flux v (G grad f) normal to each face.
  std::array<std::vector<double>, 2> flux;
  for (int a = 0; a < g.dim(); ++a) {
    const auto x = g.axis(a).nodes();
    const std::size_t st = g.stride(a);
    flux[a].assign(g.size(), 0.0);
    for (std::size_t n = 0; n < g.size(); ++n) {
      const std::size_t i = g.coords(n)[a];
      if (i + 1 >= g.count(a)) continue;
      const double p = faces.slope[a][n];
      const double vf = faces.vf[a][n];
      const double fn = (fv[n + st] - fv[n]) / (x[i + 1] - x[i]);
      double gf = fn - p * p * fn / (vf * vf);
      if (g.dim() == 2) {
        const auto ut = du.component(1 - a);
        const auto ft = df.component(1 - a);
        const double q = 0.5 * (ut[n] + ut[n + st]);
        const double fq = 0.5 * (ft[n] + ft[n + st]);
        gf -= p * q * fq / (vf * vf);
      }
      flux[a][n] = vf * gf;
    }
  }
  std::vector<double> out(g.size(), 0.0);
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (g.on_boundary(n)) continue;
    double s = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      const auto x = g.axis(a).nodes();
      const std::size_t i = g.coords(n)[a];
      const std::size_t st = g.stride(a);
      s += (flux[a][n] - flux[a][n - st]) / (0.5 * (x[i + 1] - x[i - 1]));
    }
    out[n] = s / volume_element(du.norm2(n));
  }
  detail::extrapolate_boundary(g, out);
  return ScalarField(u.grid_ptr(), std::move(out), u.time());
}

ScalarField tangential_gradient2(const ScalarField& u, const ScalarField& f) {
  require_same_grid(u, f);
  const VectorField du = gradient(u);
  const VectorField df = gradient(f);
  std::vector<double> out(u.size());
  for (std::size_t n = 0; n < out.size(); ++n) {
    double dot = 0.0;
    for (int a = 0; a < du.dim(); ++a) dot += du.component(a)[n] * df.component(a)[n];
    const double v2 = 1.0 + du.norm2(n);
    out[n] = std::max(0.0, df.norm2(n) - dot * dot / v2);
  }
  return ScalarField(u.grid_ptr(), std::move(out), u.time());
}

// ---------------------------------------------------------------- identities

namespace {

// Snapshot index k with neighbors on both sides.
std::size_t interior_snapshot(const FlowTrajectory& traj, double t) {
  const std::size_t k = traj.index_of(t);
  if (k == 0 || k + 1 >= traj.size()) {
    throw PreconditionError("time derivative needs snapshots on both sides of t");
  }
  return k;
}

// Central fixed-x time derivative of a per-snapshot quantity.
template <class Quantity>
std::vector<double> time_derivative(const FlowTrajectory& traj, std::size_t k,
                                    Quantity&& q) {
  const double t0 = traj.snapshot(k - 1).time();
  const double t1 = traj.snapshot(k).time();
  const double t2 = traj.snapshot(k + 1).time();
  const auto w = detail::first_derivative_weights(t0, t1, t2, t1);
  const std::vector<double> a = q(traj.snapshot(k - 1));
  const std::vector<double> b = q(traj.snapshot(k));
  const std::vector<double> c = q(traj.snapshot(k + 1));
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = w[0] * a[i] + w[1] * b[i] + w[2] * c[i];
  return out;
}

std::vector<double> copy_values(const ScalarField& f) {
  return {f.values().begin(), f.values().end()};
}

// Normal-motion time derivative from the fixed-x one.
std::vector<double> normal_derivative(const std::vector<double>& g_t,
                                      const std::vector<double>& u_t,
                                      const VectorField& du, const VectorField& dg) {
  std::vector<double> out(g_t.size());
  for (std::size_t n = 0; n < out.size(); ++n) {
    double dot = 0.0;
    for (int a = 0; a < du.dim(); ++a) dot += du.component(a)[n] * dg.component(a)[n];
    out[n] = g_t[n] - u_t[n] / (1.0 + du.norm2(n)) * dot;
  }
  return out;
}

ScalarField v_heat_terms(const FlowTrajectory& traj, double t, bool with_A2) {
  const std::size_t k = interior_snapshot(traj, t);
  const ScalarField& u = traj.snapshot(k);
  const auto geo = compute_geometry(u);
  if (with_A2 && !geo.A2) {
    throw ParameterError("|A|^2 residual is only available for n = 1");
  }
  const auto u_t = time_derivative(traj, k, copy_values);
  const auto v_t = time_derivative(traj, k, [](const ScalarField& s) {
    return copy_values(compute_geometry(s).v);
  });
  const auto dtv = normal_derivative(v_t, u_t, geo.du, gradient(geo.v));
  const auto lap = laplace_beltrami(u, geo.v);
  const auto grad2 = tangential_gradient2(u, geo.v);
  std::vector<double> r(u.size());
  for (std::size_t n = 0; n < r.size(); ++n) {
    const double v = geo.v[n];
    r[n] = dtv[n] - lap[n] + 2.0 * grad2[n] / v;
    if (with_A2) r[n] += (*geo.A2)[n] * v;
  }
  return ScalarField(u.grid_ptr(), std::move(r), u.time());
}

}  // namespace

ScalarField heat_residual_v(const FlowTrajectory& traj, double t) {
  if (traj.grid().dim() != 1) {
    throw ParameterError("heat_residual_v needs n = 1; use heat_excess_v");
  }
  return v_heat_terms(traj, t, true);
}

ScalarField heat_excess_v(const FlowTrajectory& traj, double t) {
  return v_heat_terms(traj, t, false);
}

ScalarField heat_residual_eta(const FlowTrajectory& traj, double t) {
  const std::size_t k = interior_snapshot(traj, t);
  const ScalarField& u = traj.snapshot(k);
  const Grid& g = u.grid();
  const int n = g.dim();
  const double time = u.time();
  const auto eta = ScalarField::sample(
      u.grid_ptr(),
      [&](const Point& p) { return 1.0 - (p[0] * p[0] + p[1] * p[1]) - 2.0 * n * time; },
      time);
  const auto du = gradient(u);
  const auto u_t = time_derivative(traj, k, copy_values);
  const std::vector<double> eta_t(u.size(), -2.0 * n);
  const auto dt_eta = normal_derivative(eta_t, u_t, du, gradient(eta));
  const auto lap = laplace_beltrami(u, eta);
  std::vector<double> r(u.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = dt_eta[i] - lap[i];
  return ScalarField(u.grid_ptr(), std::move(r), time);
}

ScalarField heat_residual_exp(const FlowTrajectory& traj, double t, double a) {
  if (!(t > 0.0)) throw PreconditionError("heat_residual_exp needs t > 0");
  if (!(a <= -2.0)) throw ParameterError("heat_residual_exp needs a <= -2");
  const std::size_t k = interior_snapshot(traj, t);
  const ScalarField& u = traj.snapshot(k);
  if (!(traj.snapshot(k - 1).time() > 0.0)) {
    throw PreconditionError("heat_residual_exp needs the previous snapshot at t > 0");
  }
  auto weight = [a](const ScalarField& s) {
    std::vector<double> e(s.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = std::exp(a * s[i] * s[i] / s.time());
    return e;
  };
  const ScalarField e(u.grid_ptr(), weight(u), u.time());
  const auto du = gradient(u);
  const auto u_t = time_derivative(traj, k, copy_values);
  const auto e_t = time_derivative(traj, k, weight);
  const auto dt_e = normal_derivative(e_t, u_t, du, gradient(e));
  const auto lap = laplace_beltrami(u, e);
  const double time = u.time();
  std::vector<double> r(u.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double y2 = u[i] * u[i];
    const double s2 = du.norm2(i);
    const double grad_y2 = s2 / (1.0 + s2);
    const double rhs = -e[i] / (time * time) *
                       (a * y2 + 4.0 * a * a * y2 * grad_y2 + 2.0 * a * time * grad_y2);
    r[i] = dt_e[i] - lap[i] - rhs;
  }
  return ScalarField(u.grid_ptr(), std::move(r), time);
}

double phi_v_max(const FlowTrajectory& traj, double a) {
  const int n = traj.grid().dim();
  double best = 0.0;
  for (const auto& s : traj.snapshots()) {
    const double t = s.time();
    if (!(t > 0.0)) continue;
    const auto v = compute_geometry(s).v;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const Point p = s.grid().point(i);
      const double eta = 1.0 - (p[0] * p[0] + p[1] * p[1]) - 2.0 * n * t;
      if (!(eta > 0.0)) continue;
      if (s[i] < 1.0) {
        throw PreconditionError("phi_v_max needs u >= 1 on the cutoff support; "
                                "translate by sup|u| + 1 first");
      }
      best = std::max(best, eta * std::exp(a * s[i] * s[i] / t) * v[i]);
    }
  }
  return best;
}

double interior_max_abs(const ScalarField& f, std::size_t margin) {
  const Grid& g = f.grid();
  double m = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    const auto c = g.coords(n);
    bool inside = true;
    for (int a = 0; a < g.dim(); ++a) {
      inside = inside && c[a] >= margin && c[a] + margin < g.count(a);
    }
    if (inside) m = std::max(m, std::abs(f[n]));
  }
  return m;
}

double interior_max(const ScalarField& f, std::size_t margin) {
  const Grid& g = f.grid();
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < g.size(); ++n) {
    const auto c = g.coords(n);
    bool inside = true;
    for (int a = 0; a < g.dim(); ++a) {
      inside = inside && c[a] >= margin && c[a] + margin < g.count(a);
    }
    if (inside) m = std::max(m, f[n]);
  }
  return m;
}

}  // namespace mcf
