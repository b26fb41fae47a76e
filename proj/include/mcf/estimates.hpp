#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mcf/grid.hpp"
#include "mcf/trajectory.hpp"

namespace mcf {

using Context = std::vector<std::pair<std::string, double>>;

/// A measured quantity checked against a theoretical bound.
struct EstimateReport {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  double margin = 0.0;  // bound - measured
  double slack = 0.0;   // numerical-error allowance
  bool pass = false;    // margin >= -slack
  Context context;

  static EstimateReport make(std::string name, double measured, double bound,
                             double slack, Context context = {});
  /// Lower-bound form: passes when measured >= bound - slack.
  static EstimateReport make_lower(std::string name, double measured, double bound,
                                   double slack, Context context = {});
  double context_value(const std::string& key) const;
};

nlohmann::ordered_json to_json(const EstimateReport& r);
EstimateReport report_from_json(const nlohmann::ordered_json& j);
void write_reports_csv(const std::vector<EstimateReport>& reports, std::ostream& out);
void write_reports_json(const std::vector<EstimateReport>& reports, std::ostream& out);

// ---------------------------------------------------------------- bounds

/// Bound on log(1 + |du|^2)(0, r^2/(4n)) given sup |u| over B_r x [0, r^2]:
///   2 log 10 + 16 n (1 + 2 sup / r)^2.
double gradient_bound_explicit(int n, double r, double sup_u);

/// Same bound with the sup over B_r x [0, r^2] replaced by the sphere height
/// bound at rho = sqrt(2n+1): sqrt(2n+1) r + sup |u(., 0)|.
double gradient_bound_chained(int n, double r, double sup_u0);

/// Korevaar-type bound that also depends on the initial gradient:
///   1/2 log(1 + sup|du0|^2) + C (1 + sup|u0| / r)^2.
double eh_bound_comparison(int n, double r, double sup_u0, double sup_du0, double C);

struct HeightBound {
  double exact;       // r [rho - sqrt(rho^2 - (2n+1))] + sup
  double simplified;  // (2n+1) r / rho + sup
};
HeightBound height_bound(int n, double r, double rho, double sup_initial);

/// Area of the graph over B_{r/2}: quadrature of v over the ball.
double area_measurement(const ScalarField& u, double r);

/// Checks  int phi^2 v <= int phi^2 + |w| int |d phi^2| + |w| int phi^2 |H|.
/// The slack is ten times the change of the margin under one coarsening.
EstimateReport stokes_area_check(const ScalarField& w, const ScalarField& phi);

// ---------------------------------------------------------------- ODE lemma

/// Samples of f on a uniform partition of [0, T].
struct ODEInstance {
  double a = 1.0;
  double b = 1.0;
  double T = 1.0;
  std::vector<double> f;
};

double ode_bound(double a, double b, double T);

struct OdeCheckResult {
  /// The samples do not satisfy f >= 0 and f^2 <= -a f' + b; no verdict.
  bool rejected = false;
  /// Largest hypothesis excess f^2 + a f' - b - slack (positive when rejected).
  double worst_excess = 0.0;
  std::optional<EstimateReport> report;
};

OdeCheckResult ode_check(const ODEInstance& inst);

// ---------------------------------------------------------------- energy

/// Tent cutoff max(1 - |x|, 0).
double tent_cutoff(const Point& p, int dim);

/// Weighted area f(t) = int eta^4 v with the tent cutoff.
double weighted_area(const ScalarField& u);

/// Right-hand side -int eta^4 H^2 v + 4 int H eta^3 <d eta, du>.
double weighted_area_rate(const ScalarField& u);

/// Compares the central difference of f(t) against the right-hand side at
/// every interior snapshot; measured is the largest absolute residual.
EstimateReport energy_identity_check(const FlowTrajectory& traj, double tolerance = 1e-3);

// ---------------------------------------------------------------- area fit

struct AreaSample {
  int n = 1;
  double r = 1.0;
  double sup_u0 = 0.0;
  double area = 0.0;
};

/// Smallest C with area <= C r^n (1 + sup_u0 / r)^2 for every sample.
double area_constant_fit(const std::vector<AreaSample>& samples);

}  // namespace mcf
