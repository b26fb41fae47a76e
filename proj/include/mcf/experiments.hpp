#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mcf/estimates.hpp"
#include "mcf/grid.hpp"
#include "mcf/trajectory.hpp"

namespace mcf {

enum class ExperimentKind {
  SharpnessGradient,
  SharpnessArea,
  EstimateSuite,
  Convergence,
  IdentitySuite,
};

ExperimentKind parse_kind(const std::string& name);
std::string to_string(ExperimentKind kind);

/// Parameters of one experiment. Zero for resolution or dt selects the
/// per-kind default.
struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::Convergence;
  double lambda = 2.0;
  int k = 2;
  int n = 1;
  double r = 1.0;
  std::uint64_t seed = 1;
  int count = 20;
  int resolution = 0;
  int levels = 3;
  std::string problem = "grim-reaper";
  Scheme scheme = Scheme::SemiImplicit;
  double dt = 0.0;
  double tolerance = 0.05;
  bool graded = false;
  int threads = 0;
  std::string output;

  void validate() const;
};

/// Sets one `key = value` entry. Keys: kind, lambda, k, n, r, seed, count,
/// resolution, levels, problem, scheme, dt, tolerance, graded, threads,
/// output.
void apply_setting(ExperimentSpec& spec, const std::string& key, const std::string& value);

/// Reads a key-value file: one `key = value` per line, `#` starts a comment.
ExperimentSpec load_config(std::istream& in, ExperimentSpec base = {});
ExperimentSpec load_config(const std::filesystem::path& path, ExperimentSpec base = {});

struct ReportBundle {
  std::string experiment;
  std::vector<EstimateReport> reports;
  std::optional<FlowTrajectory> trajectory;

  bool all_pass() const;
  std::size_t failures() const;

  /// Writes report.json and report.csv, plus trajectory.csv, series.csv and
  /// (uniform grids only) trajectory.mcfg when a trajectory is attached.
  void write(const std::filesystem::path& dir) const;
};

ReportBundle run_sharpness_gradient(double lambda, int resolution, double tolerance = 0.05,
                                    bool graded = false, double dt = 0.0);

ReportBundle run_sharpness_area(int k, int resolution, double tolerance = 0.05,
                                double dt = 0.0);

ReportBundle run_estimate_suite(int n, std::uint64_t seed, int count, double r = 1.0,
                                int resolution = 0, int threads = 0);

/// problem: grim-reaper, translating-pair or flat. `resolution` is the number
/// of intervals across the period strip at the coarsest level; each further
/// level halves h.
ReportBundle run_convergence(const std::string& problem, int levels, int resolution = 200,
                             Scheme scheme = Scheme::SemiImplicit);

/// Energy identity and heat-operator identities under refinement.
ReportBundle run_identity_suite(int levels, int resolution = 200);

ReportBundle run_experiment(const ExperimentSpec& spec);

/// Runs independent jobs on a worker pool; results keep the input order.
std::vector<ReportBundle> run_batch(const std::vector<ExperimentSpec>& specs, int threads = 0);

/// Smooth compactly supported data on the box grid: a finite Fourier sum
/// windowed by a bump vanishing at |x| = rho, scaled to a random sup-norm in
/// [0, max_sup]. Deterministic in `seed`.
ScalarField random_initial_data(const GridPtr& grid, double rho, std::uint64_t seed,
                                double max_sup = 3.0);

/// Uniform double in [0, 1) from the top 53 bits of one draw.
double uniform01(std::mt19937_64& rng);

/// Least-squares-free order estimate between consecutive levels.
double observed_order(double coarse_error, double fine_error, double ratio = 2.0);

}  // namespace mcf
