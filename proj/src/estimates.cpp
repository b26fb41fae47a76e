#include "mcf/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

#include "mcf/geometry.hpp"

namespace mcf {

namespace {

std::string num(double x) {
  if (!std::isfinite(x)) return x > 0 ? "inf" : (x < 0 ? "-inf" : "nan");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

nlohmann::ordered_json number(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

double from_number(const nlohmann::ordered_json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

EstimateReport EstimateReport::make(std::string name, double measured, double bound,
                                    double slack, Context context) {
  EstimateReport r;
  r.name = std::move(name);
  r.measured = measured;
  r.bound = bound;
  r.margin = bound - measured;
  r.slack = slack;
  r.pass = r.margin >= -slack;
  r.context = std::move(context);
  return r;
}

EstimateReport EstimateReport::make_lower(std::string name, double measured, double bound,
                                          double slack, Context context) {
  EstimateReport r = make(std::move(name), measured, bound, slack, std::move(context));
  r.margin = measured - bound;
  r.pass = r.margin >= -slack;
  return r;
}

double EstimateReport::context_value(const std::string& key) const {
  for (const auto& [k, v] : context) {
    if (k == key) return v;
  }
  throw Error("report '" + name + "' has no context entry '" + key + "'");
}

nlohmann::ordered_json to_json(const EstimateReport& r) {
  nlohmann::ordered_json ctx = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.context) ctx[k] = number(v);
  return {{"name", r.name},       {"measured", number(r.measured)},
          {"bound", number(r.bound)}, {"margin", number(r.margin)},
          {"slack", number(r.slack)}, {"pass", r.pass},
          {"context", ctx}};
}

EstimateReport report_from_json(const nlohmann::ordered_json& j) {
  EstimateReport r;
  r.name = j.at("name").get<std::string>();
  r.measured = from_number(j.at("measured"));
  r.bound = from_number(j.at("bound"));
  r.margin = from_number(j.at("margin"));
  r.slack = from_number(j.value("slack", nlohmann::ordered_json(0.0)));
  r.pass = j.at("pass").get<bool>();
  if (j.contains("context")) {
    for (const auto& [k, v] : j.at("context").items()) r.context.emplace_back(k, from_number(v));
  }
  return r;
}

void write_reports_csv(const std::vector<EstimateReport>& reports, std::ostream& out) {
  out << "name,measured,bound,margin,slack,pass,context\n";
  for (const auto& r : reports) {
    out << r.name << ',' << num(r.measured) << ',' << num(r.bound) << ',' << num(r.margin)
        << ',' << num(r.slack) << ',' << (r.pass ? "true" : "false") << ',';
    for (std::size_t i = 0; i < r.context.size(); ++i) {
      if (i) out << ';';
      out << r.context[i].first << '=' << num(r.context[i].second);
    }
    out << '\n';
  }
}

void write_reports_json(const std::vector<EstimateReport>& reports, std::ostream& out) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  out << arr.dump(2) << '\n';
}

// ---------------------------------------------------------------- bounds

double gradient_bound_explicit(int n, double r, double sup_u) {
  const double q = 1.0 + 2.0 * sup_u / r;
  return 2.0 * std::log(10.0) + 16.0 * n * q * q;
}

double gradient_bound_chained(int n, double r, double sup_u0) {
  // Sphere height bound at rho = sqrt(2n+1): (2n+1) r / rho = sqrt(2n+1) r.
  const double sup = std::sqrt(2.0 * n + 1.0) * r + sup_u0;
  return gradient_bound_explicit(n, r, sup);
}

double eh_bound_comparison(int /*n*/, double r, double sup_u0, double sup_du0, double C) {
  const double q = 1.0 + sup_u0 / r;
  return 0.5 * std::log1p(sup_du0 * sup_du0) + C * q * q;
}

HeightBound height_bound(int n, double r, double rho, double sup_initial) {
  const double m = 2.0 * n + 1.0;
  // Relative tolerance so that rho = sqrt(2n+1) itself is accepted.
  if (!(rho * rho >= m * (1.0 - 1e-12))) {
    throw ParameterError("height bound needs rho >= sqrt(2n+1)");
  }
  return {r * (rho - std::sqrt(std::max(rho * rho - m, 0.0))) + sup_initial,
          m * r / rho + sup_initial};
}

double area_measurement(const ScalarField& u, double r) {
  const Grid& g = u.grid();
  for (int a = 0; a < g.dim(); ++a) {
    if (g.axis(a).lower() > -0.5 * r || g.axis(a).upper() < 0.5 * r) {
      throw PreconditionError("grid does not cover B_{r/2}");
    }
  }
  return quadrature(compute_geometry(u).v, Region::ball(0.5 * r));
}

namespace {

struct StokesTerms {
  double lhs, t1, t2, t3, sup_w;
  double margin() const { return t1 + t2 + t3 - lhs; }
};

StokesTerms stokes_terms(const ScalarField& w, const ScalarField& phi) {
  const auto geo = compute_geometry(w);
  const auto phi2 = multiply(phi, phi);
  const auto dphi2 = gradient(phi2);
  std::vector<double> abs_d(phi2.size()), phi2H(phi2.size());
  for (std::size_t i = 0; i < phi2.size(); ++i) {
    abs_d[i] = std::sqrt(dphi2.norm2(i));
    phi2H[i] = phi2[i] * std::abs(geo.H[i]);
  }
  StokesTerms s;
  s.sup_w = w.max_abs();
  s.lhs = quadrature(multiply(phi2, geo.v));
  s.t1 = quadrature(phi2);
  s.t2 = s.sup_w * quadrature(ScalarField(w.grid_ptr(), std::move(abs_d)));
  s.t3 = s.sup_w * quadrature(ScalarField(w.grid_ptr(), std::move(phi2H)));
  return s;
}

}  // namespace

EstimateReport stokes_area_check(const ScalarField& w, const ScalarField& phi) {
  require_same_grid(w, phi);
  const Grid& g = phi.grid();
  const double scale = std::max(phi.max_abs(), 1.0);
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (g.on_boundary(n) && std::abs(phi[n]) > 1e-14 * scale) {
      throw PreconditionError("phi must vanish on the grid boundary");
    }
  }
  const auto fine = stokes_terms(w, phi);
  double slack = 0.0;
  try {
    const auto coarse_grid = coarsen(g);
    const auto coarse = stokes_terms(restrict_to(w, coarse_grid), restrict_to(phi, coarse_grid));
    slack = 10.0 * std::abs(fine.margin() - coarse.margin());
  } catch (const InvalidGrid&) {
    slack = 0.0;
  }
  return EstimateReport::make("stokes_area", fine.lhs, fine.t1 + fine.t2 + fine.t3, slack,
                              {{"int_phi2", fine.t1},
                               {"sup_w_int_dphi2", fine.t2},
                               {"sup_w_int_phi2_H", fine.t3},
                               {"sup_w", fine.sup_w},
                               {"h", g.min_spacing()}});
}

// ---------------------------------------------------------------- ODE lemma

double ode_bound(double a, double b, double T) { return std::sqrt(2.0 * b) + 2.0 * a / T; }

OdeCheckResult ode_check(const ODEInstance& inst) {
  if (!(inst.a > 0.0 && inst.b > 0.0 && inst.T > 0.0)) {
    throw ParameterError("ODE instance needs a, b, T > 0");
  }
  const auto& f = inst.f;
  if (f.size() < 100) throw ParameterError("ODE instance needs at least 100 samples");
  const std::size_t last = f.size() - 1;
  const double dt = inst.T / static_cast<double>(last);

  OdeCheckResult res;
  res.worst_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= last; ++i) {
    if (f[i] < 0.0) {
      res.rejected = true;
      res.worst_excess = std::max(res.worst_excess, -f[i]);
    }
  }
  for (std::size_t i = 1; i < last; ++i) {
    const double d1 = (f[i + 1] - f[i - 1]) / (2.0 * dt);
    // Differencing error estimated from the doubled stencil where available.
    double err = 0.0;
    if (i >= 2 && i + 2 <= last) {
      const double d2 = (f[i + 2] - f[i - 2]) / (4.0 * dt);
      err = std::abs(d1 - d2);
    }
    const double slack = 10.0 * inst.a * err + 1e-12 * (f[i] * f[i] + inst.b);
    const double excess = f[i] * f[i] + inst.a * d1 - inst.b - slack;
    res.worst_excess = std::max(res.worst_excess, excess);
    if (excess > 0.0) res.rejected = true;
  }
  if (res.rejected) return res;
  res.report = EstimateReport::make("ode_lemma", f.back(), ode_bound(inst.a, inst.b, inst.T),
                                    1e-6, {{"a", inst.a}, {"b", inst.b}, {"T", inst.T}});
  return res;
}

// ---------------------------------------------------------------- energy

double tent_cutoff(const Point& p, int dim) {
  const double r = dim == 1 ? std::abs(p[0]) : std::hypot(p[0], p[1]);
  return std::max(1.0 - r, 0.0);
}

double weighted_area(const ScalarField& u) {
  const Grid& g = u.grid();
  const auto v = compute_geometry(u).v;
  std::vector<double> w(g.size());
  for (std::size_t n = 0; n < g.size(); ++n) {
    const double eta = tent_cutoff(g.point(n), g.dim());
    w[n] = eta * eta * eta * eta * v[n];
  }
  return quadrature(ScalarField(u.grid_ptr(), std::move(w)));
}

double weighted_area_rate(const ScalarField& u) {
  const Grid& g = u.grid();
  const auto geo = compute_geometry(u);
  std::vector<double> w(g.size());
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Point p = g.point(n);
    const double eta = tent_cutoff(p, g.dim());
    const double H = geo.H[n];
    // d eta = -x / |x| inside the unit ball; zero at the apex by symmetry.
    const double r = g.dim() == 1 ? std::abs(p[0]) : std::hypot(p[0], p[1]);
    double cross = 0.0;
    if (eta > 0.0 && r > 0.0) {
      for (int a = 0; a < g.dim(); ++a) cross += -p[a] / r * geo.du.component(a)[n];
    }
    const double e3 = eta * eta * eta;
    w[n] = -e3 * eta * H * H * geo.v[n] + 4.0 * H * e3 * cross;
  }
  return quadrature(ScalarField(u.grid_ptr(), std::move(w)));
}

EstimateReport energy_identity_check(const FlowTrajectory& traj, double tolerance) {
  const Grid& g = traj.grid();
  for (int a = 0; a < g.dim(); ++a) {
    if (g.axis(a).lower() > -1.0 || g.axis(a).upper() < 1.0) {
      throw PreconditionError("energy identity needs a grid covering B_1");
    }
  }
  if (traj.size() < 3) throw PreconditionError("energy identity needs at least 3 snapshots");
  std::vector<double> f(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) f[k] = weighted_area(traj.snapshot(k));

  double worst = 0.0;
  double max_rate = 0.0;
  for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
    const double t0 = traj.snapshot(k - 1).time();
    const double t1 = traj.snapshot(k).time();
    const double t2 = traj.snapshot(k + 1).time();
    const auto w = detail::first_derivative_weights(t0, t1, t2, t1);
    const double df = w[0] * f[k - 1] + w[1] * f[k] + w[2] * f[k + 1];
    const double rhs = weighted_area_rate(traj.snapshot(k));
    worst = std::max(worst, std::abs(df - rhs));
    max_rate = std::max(max_rate, std::abs(rhs));
  }
  return EstimateReport::make("energy_identity", worst, tolerance, 0.0,
                              {{"max_abs_rate", max_rate},
                               {"snapshots", static_cast<double>(traj.size())},
                               {"h", g.min_spacing()}});
}

// ---------------------------------------------------------------- area fit

double area_constant_fit(const std::vector<AreaSample>& samples) {
  if (samples.empty()) throw ParameterError("area_constant_fit needs at least one sample");
  const int n = samples.front().n;
  double C = 0.0;
  for (const auto& s : samples) {
    if (s.n != n) throw ParameterError("area_constant_fit samples must share n");
    const double q = 1.0 + s.sup_u0 / s.r;
    C = std::max(C, s.area / (std::pow(s.r, n) * q * q));
  }
  return C;
}

}  // namespace mcf
