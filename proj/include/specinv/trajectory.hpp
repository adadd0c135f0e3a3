#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "specinv/eigensolve.hpp"
#include "specinv/numeric.hpp"
#include "specinv/shape.hpp"

namespace specinv {

/// F_n(v) = -[(v + 1/4)^{1/2} - (n + 1/2)]^2 for -sech^2(x), v >= n(n+1).
struct SechSquaredSource {
  int level = 0;
};

/// F(v) = f0 v + E_q (A v)^{2/(2+q)} for f0 + A|x|^q.
struct ShiftedPowerSource {
  double f0 = 0.0;
  double A = 1.0;
  double q = 2.0;
  double E_q = 1.0;
};

struct HarmonicSource {};

struct TrajectoryMemo;

/// F from the eigensolver, F' from Hellmann-Feynman; both memoized.
struct NumericSource {
  PotentialShape shape;
  SolverConfig cfg;
  std::shared_ptr<TrajectoryMemo> memo;
};

/// Samples (v, F, F') read from data; F is cubic Hermite in v, F' monotone cubic.
struct TabulatedSource {
  std::vector<double> v, F, Fprime;
};

class EnergyTrajectory {
 public:
  using Source = std::variant<SechSquaredSource, ShiftedPowerSource, HarmonicSource, NumericSource, TabulatedSource>;

  static EnergyTrajectory sech_squared(int level = 0);
  static EnergyTrajectory shifted_power(double f0, double A, double q, double E_q);
  /// Shifted power with E(q) taken from the eigensolver.
  static EnergyTrajectory shifted_power(double f0, double A, double q);
  static EnergyTrajectory harmonic();
  static EnergyTrajectory numeric(PotentialShape shape, SolverConfig cfg = {});
  static EnergyTrajectory tabulated(std::vector<double> v, std::vector<double> F, std::vector<double> Fprime);

  double F(double v) const;
  double Fprime(double v) const;
  double R(double v) const { return F(v) / v; }
  /// Mean kinetic energy s = F - v F'.
  double kinetic(double v) const { return F(v) - v * Fprime(v); }

  /// F is defined for v > v_min (v >= v_min for tabulated data and sech^2 levels).
  double v_min() const;
  double v_max() const;

  /// Whether the generating shape is known to be bounded above.
  std::optional<bool> bounded_hint() const;
  /// The generating shape, when it is known.
  std::optional<PotentialShape> exact_shape() const;

  const Source& source() const { return source_; }
  std::string describe() const;

 private:
  explicit EnergyTrajectory(Source s) : source_(std::move(s)) {}
  void check_domain(double v) const;
  Source source_;
};

double eval_F(const EnergyTrajectory& traj, double v);
double eval_Fprime(const EnergyTrajectory& traj, double v);

struct InvertOptions {
  double v_start = 1.0;
  double v_max_search = 1e9;
  double rel_tol = 1e-12;
};

/// v with R(v) = target; R = F/v is strictly decreasing.
double invert_R(const EnergyTrajectory& traj, double target, const InvertOptions& opt = {});

struct F0Options {
  double v_start = 1e3;
  int doublings = 6;
  double agreement = 1e-3;
};

/// lim_{v->inf} F(v)/v from R at v_start * 2^j, j = 0..doublings, with
/// repeated Aitken extrapolation of R(v) ~ f0 + c v^(eta - 1).
double estimate_f0(const EnergyTrajectory& traj, const F0Options& opt = {});

/// Half-width b = (pi/2) K^{-1/2} of a flat patch at the bottom when
/// s = F - v F' appears bounded over the probes (by K = sup s); none otherwise.
std::optional<double> detect_flat(const EnergyTrajectory& traj, const std::vector<double>& probes);
std::vector<double> default_flat_probes();

/// Shifted-power head f0 + A x^q fitted on F(v1), F(2 v1); b is the model
/// turning point at v1. f0 defaults to estimate_f0(traj).
HeadModel fit_head(const EnergyTrajectory& traj, double v1 = 1e4, std::optional<double> f0 = std::nullopt);

/// Whether the data look like a well rising to zero: f(0) < 0 and F < 0 at
/// weak coupling.
bool infer_bounded(const EnergyTrajectory& traj, double f0);

struct StructureReport {
  int concavity_violations = 0;
  int r_violations = 0;
  int kinetic_violations = 0;
  double worst_second_difference = 0.0;
  double min_kinetic = 0.0;
  bool ok() const { return concavity_violations == 0 && r_violations == 0 && kinetic_violations == 0; }
};

/// Concavity of F (second divided differences <= tol), strictly decreasing R
/// and s >= 0 on the sampled grid.
StructureReport check_structure(const EnergyTrajectory& traj, const std::vector<double>& v_grid,
                                double tol = 1e-6);

/// CSV `v,F,Fprime`.
void write_trajectory_csv(const EnergyTrajectory& traj, const std::vector<double>& v_grid,
                          const std::filesystem::path& path);
/// Reads `v,F[,Fprime]`; v must be strictly increasing and the data concave
/// with R decreasing. Missing F' is estimated by finite differences.
EnergyTrajectory read_trajectory_csv(const std::filesystem::path& path);

/// J_nu(x) by the ascending series for 0 < x <= 25.
double bessel_j_real_order(double nu, double x);
double bessel_j_real_order_prime(double nu, double x);

}  // namespace specinv
