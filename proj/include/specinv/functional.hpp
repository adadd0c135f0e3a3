#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "specinv/eigensolve.hpp"
#include "specinv/kinetic.hpp"
#include "specinv/shape.hpp"
#include "specinv/trajectory.hpp"

namespace specinv {

std::vector<double> default_functional_grid();

struct FunctionalConfig {
  std::vector<double> x_grid = default_functional_grid();
  double v_lo = 1e-3;
  double v_hi = 1e7;
  int max_iterations = 5;
  double stop_tolerance = 1e-3;
  /// Cut the extrapolation of each iterate at zero; inferred when unset.
  std::optional<bool> bounded;
  double k_tolerance = 1e-10;
  std::vector<double> kinetic_grid = default_kinetic_grid();
  SolverConfig solver;
};

struct IterateRecord {
  int n = 0;
  std::vector<double> x;  // x = 0 first, then the grid
  std::vector<double> f;
  PotentialShape shape;
  std::optional<double> dist_prev;
  std::optional<double> dist_target;
};

/// Everything a step needs besides the current iterate.
struct FunctionalTarget {
  KineticPotential kinetic;
  double f0;
  bool bounded;
};

FunctionalTarget prepare_target(const EnergyTrajectory& target, const FunctionalConfig& cfg);

/// f^{[n+1]}(x) = fbar_target(K^{[n]}(x)), K^{[n]}(x) = max_v { F^{[n]}(v) - v f^{[n]}(x) }
/// on the grid, with x = 0 pinned to the target's f(0).
IterateRecord functional_step(const PotentialShape& current, const FunctionalTarget& target,
                              const FunctionalConfig& cfg);

/// Tabulates the grid values as an iterate shape. Beyond the grid a bounded
/// iterate continues its last segment (cut at zero); an unbounded one continues
/// the power law f(0) + c x^p through its last two knots.
PotentialShape iterate_shape(const std::vector<double>& x, const std::vector<double>& f, bool bounded);

struct FunctionalResult {
  std::vector<IterateRecord> iterates;  // seed first
  bool converged = false;
};

FunctionalResult run_functional(const EnergyTrajectory& target, const PotentialShape& seed,
                                const FunctionalConfig& cfg = {});

/// Forward trajectory of a seed shape, for comparison with its closed form.
EnergyTrajectory seed_trajectory_check(const PotentialShape& seed, const SolverConfig& cfg = {});

/// sup |a - b| over the points with x >= x_from.
double sup_distance(const std::vector<double>& x, const std::vector<double>& a, const std::vector<double>& b,
                    double x_from = 0.0);

/// `iterate_<n>.csv` (x,f_n) per iterate and `summary.csv` (n,dist_prev,dist_target).
void write_functional_csv(const FunctionalResult& res, const std::filesystem::path& dir);

}  // namespace specinv
