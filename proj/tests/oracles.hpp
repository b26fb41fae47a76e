#pragma once

// Independent reference values for the tests. Nothing here calls into the
// library; every formula is written out from first principles.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

// Translating graph u = lambda t - log(sin(lambda x)) / lambda on (0, pi/lambda).
struct Translator {
  double lambda = 1.0;
  double u(double x, double t) const { return lambda * t - std::log(std::sin(lambda * x)) / lambda; }
  double ux(double x) const { return -std::cos(lambda * x) / std::sin(lambda * x); }
  double uxx(double x) const {
    const double s = std::sin(lambda * x);
    return lambda / (s * s);
  }
  double ut() const { return lambda; }
};

// Centred unit translator u = t - log cos x on (-pi/2, pi/2).
inline double centred(double x, double t) { return t - std::log(std::cos(x)); }
inline double centred_x(double x) { return std::tan(x); }
inline double centred_xx(double x) { return 1.0 / (std::cos(x) * std::cos(x)); }

// Lower spherical cap of radius R over the origin: u = -sqrt(R^2 - |x|^2).
// Its graph has div(du / v) = n / R.
inline double cap(double R, double x, double y) { return -std::sqrt(R * R - x * x - y * y); }

// Extremal solution of a f' = b - f^2 from f(0) = +infinity.
inline double coth_solution(double a, double b, double t) {
  const double s = std::sqrt(b);
  return s / std::tanh(s * t / a);
}

struct OdePath {
  double a, b, T;
  std::vector<double> samples;  // uniform in [0, T]
  bool left_positive_cone = false;
};

// Integrates a f' = b - f^2 - s(t) with classical RK4, s(t) = c (1 + sin(w t + p)).
// c >= 0 keeps f^2 <= -a f' + b; c < 0 breaks it. Samples every `stride` steps.
inline OdePath saturating_ode(double a, double b, double T, double f0, double c, double w,
                              double p, std::size_t steps, std::size_t stride) {
  OdePath out{a, b, T, {}, false};
  const double dt = T / static_cast<double>(steps);
  auto rhs = [&](double t, double f) { return (b - f * f - c * (1.0 + std::sin(w * t + p))) / a; };
  double f = f0;
  out.samples.reserve(steps / stride + 1);
  out.samples.push_back(f);
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = i * dt;
    const double k1 = rhs(t, f);
    const double k2 = rhs(t + 0.5 * dt, f + 0.5 * dt * k1);
    const double k3 = rhs(t + 0.5 * dt, f + 0.5 * dt * k2);
    const double k4 = rhs(t + dt, f + dt * k3);
    f += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (f < 0.0) out.left_positive_cone = true;
    if ((i + 1) % stride == 0) out.samples.push_back(f);
  }
  return out;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

// Composite Simpson rule on [lo, hi] with 2m panels.
inline double simpson(const std::function<double(double)>& f, double lo, double hi, int m) {
  const double h = (hi - lo) / (2.0 * m);
  double s = f(lo) + f(hi);
  for (int i = 1; i < 2 * m; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
  return s * h / 3.0;
}

inline double order(double coarse, double fine) { return std::log2(coarse / fine); }

}  // namespace oracle
