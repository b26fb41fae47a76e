#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mcf/grid.hpp"

namespace mcf {

enum class Scheme { ExplicitEuler, SemiImplicit };

Scheme parse_scheme(const std::string& name);
std::string to_string(Scheme s);

/// Dirichlet data. An empty `prescribed` callable means frozen: boundary nodes
/// keep their initial values.
struct Boundary {
  std::function<double(const Point&, double)> prescribed;

  static Boundary frozen() { return {}; }
  static Boundary exact(std::function<double(const Point&, double)> f) {
    return {std::move(f)};
  }
  bool is_frozen() const { return !prescribed; }
};

struct SolverConfig {
  Scheme scheme = Scheme::SemiImplicit;
  /// Explicit step is cfl_fraction * h_min^2 / (2n).
  double cfl_fraction = 0.9;
  /// Semi-implicit step; defaults to h_min when unset.
  std::optional<double> dt_fixed;
  double t_end = 1.0;
  /// Requested snapshot times in [0, t_end]; 0 and t_end are always added.
  std::vector<double> snapshot_times;
  Boundary boundary;
  /// Semi-implicit 2D linear solve tolerance (absolute residual).
  double linear_tolerance = 1e-10;

  void validate() const;
  /// Nominal time step for a given grid.
  double nominal_dt(const Grid& grid) const;
};

/// Snapshots of one flow, strictly increasing in time, starting at t = 0.
class FlowTrajectory {
 public:
  FlowTrajectory(std::vector<ScalarField> snapshots, SolverConfig config = {});

  const std::vector<ScalarField>& snapshots() const { return snapshots_; }
  const ScalarField& snapshot(std::size_t k) const { return snapshots_[k]; }
  std::size_t size() const { return snapshots_.size(); }
  const ScalarField& front() const { return snapshots_.front(); }
  const ScalarField& back() const { return snapshots_.back(); }
  const GridPtr& grid_ptr() const { return snapshots_.front().grid_ptr(); }
  const Grid& grid() const { return snapshots_.front().grid(); }
  const SolverConfig& config() const { return config_; }

  /// Index of the snapshot at time t (within 1e-9 relative), or throws.
  std::size_t index_of(double t) const;
  /// Index of the snapshot whose time is closest to t.
  std::size_t nearest_index(double t) const;

 private:
  std::vector<ScalarField> snapshots_;
  SolverConfig config_;
};

/// Samples a closed-form flow at the given times (ascending, first = 0).
FlowTrajectory sampled_trajectory(const GridPtr& grid,
                                  const std::function<double(const Point&, double)>& u,
                                  const std::vector<double>& times);

}  // namespace mcf
