#pragma once

#include <optional>
#include <vector>

#include "specinv/shape.hpp"

namespace specinv {

struct SolverConfig {
  /// Fixed half-width L of the domain; unset means auto-sized per coupling.
  std::optional<double> fixed_half_width;
  int grid_points = 4000;
  double energy_tolerance = 1e-9;
  int max_bisections = 200;
  double max_half_width = 1000.0;
  /// Upper bound on h * sqrt(v (f(L) - f(0))), the largest phase advanced per step.
  double max_phase_step = 0.02;
  /// Required decay |psi(L)| / max|psi|, estimated from the WKB action past the turning point.
  double decay_ratio = 1e-6;
};

struct EigenResult {
  double energy = 0.0;
  double coupling = 0.0;
  std::vector<double> x;    // uniform grid on [0, L]
  std::vector<double> psi;  // even extension implied; 2 * int_0^L psi^2 = 1
  int node_count = 0;
  double turning_point = 0.0;

  double step() const { return x[1] - x[0]; }
  double half_width() const { return x.back(); }
};

/// Lowest (even) eigenvalue of -d^2/dx^2 + v f(x).
double ground_energy(const PotentialShape& shape, double v, const SolverConfig& cfg = {});

EigenResult ground_state(const PotentialShape& shape, double v, const SolverConfig& cfg = {});

/// <f> = int psi^2 f dx, equal to F'(v) by Hellmann-Feynman.
double mean_potential(const EigenResult& res, const PotentialShape& shape);

/// Probability mass int_{-a}^{a} psi^2 dx.
double concentration(const EigenResult& res, double a);

/// Bottom of the spectrum of -d^2/dx^2 + |x|^q, memoized per q.
double pure_power_energy(double q);

}  // namespace specinv
