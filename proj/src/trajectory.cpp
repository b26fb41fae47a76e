#include "mcf/trajectory.hpp"

#include <algorithm>
#include <cmath>

namespace mcf {

Scheme parse_scheme(const std::string& name) {
  if (name == "explicit-euler" || name == "explicit") return Scheme::ExplicitEuler;
  if (name == "semi-implicit") return Scheme::SemiImplicit;
  throw ParameterError("unknown scheme '" + name + "'");
}

std::string to_string(Scheme s) {
  return s == Scheme::ExplicitEuler ? "explicit-euler" : "semi-implicit";
}

void SolverConfig::validate() const {
  if (!(t_end > 0.0)) throw ParameterError("t_end must be positive");
  if (!(cfl_fraction > 0.0 && cfl_fraction <= 1.0)) {
    throw ParameterError("cfl_fraction must lie in (0, 1]");
  }
  if (dt_fixed && !(*dt_fixed > 0.0)) throw ParameterError("dt_fixed must be positive");
  for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
    const double t = snapshot_times[i];
    if (!(t >= 0.0 && t <= t_end)) {
      throw ParameterError("snapshot times must lie in [0, t_end]");
    }
    if (i > 0 && !(t > snapshot_times[i - 1])) {
      throw ParameterError("snapshot times must be strictly ascending");
    }
  }
}

double SolverConfig::nominal_dt(const Grid& grid) const {
  const double h = grid.min_spacing();
  if (scheme == Scheme::ExplicitEuler) {
    return cfl_fraction * h * h / (2.0 * grid.dim());
  }
  return dt_fixed.value_or(h);
}

FlowTrajectory::FlowTrajectory(std::vector<ScalarField> snapshots, SolverConfig config)
    : snapshots_(std::move(snapshots)), config_(std::move(config)) {
  if (snapshots_.empty()) throw Error("trajectory without snapshots");
  if (snapshots_.front().time() != 0.0) throw Error("trajectory must start at t = 0");
  for (std::size_t k = 1; k < snapshots_.size(); ++k) {
    require_same_grid(snapshots_[k], snapshots_.front());
    if (!(snapshots_[k].time() > snapshots_[k - 1].time())) {
      throw Error("trajectory snapshot times must increase strictly");
    }
  }
}

std::size_t FlowTrajectory::nearest_index(double t) const {
  std::size_t best = 0;
  for (std::size_t k = 1; k < snapshots_.size(); ++k) {
    if (std::abs(snapshots_[k].time() - t) < std::abs(snapshots_[best].time() - t)) best = k;
  }
  return best;
}

std::size_t FlowTrajectory::index_of(double t) const {
  const std::size_t k = nearest_index(t);
  if (std::abs(snapshots_[k].time() - t) > 1e-9 * std::max(1.0, std::abs(t))) {
    throw PreconditionError("no snapshot stored at the requested time");
  }
  return k;
}

FlowTrajectory sampled_trajectory(const GridPtr& grid,
                                  const std::function<double(const Point&, double)>& u,
                                  const std::vector<double>& times) {
  std::vector<ScalarField> snaps;
  snaps.reserve(times.size());
  for (double t : times) {
    snaps.push_back(ScalarField::sample(grid, [&](const Point& p) { return u(p, t); }, t));
  }
  SolverConfig cfg;
  cfg.t_end = times.back() > 0.0 ? times.back() : 1.0;
  return FlowTrajectory(std::move(snaps), cfg);
}

}  // namespace mcf
