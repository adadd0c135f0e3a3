#pragma once

#include <cmath>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "specinv/numeric.hpp"
#include "specinv/shape.hpp"
#include "specinv/trajectory.hpp"

namespace specinv {

/// shift + mult * (P / sqrt(s))^q
struct PurePowerTag {
  double P = 0.5;
  double q = 2.0;
  double shift = 0.0;
  double mult = 1.0;
};

/// shift + mult * (2s - 2 sqrt(s^2 + s)), the kinetic potential of -sech^2(x).
struct SechSquaredTag {
  double shift = 0.0;
  double mult = 1.0;
};

/// Power-law continuation of fbar past one end of the samples:
/// -fbar'(s) = c s^alpha, integrated from the end point.
struct KineticTail {
  double s_end = 0.0;
  double f_end = 0.0;
  double c = 0.0;
  double alpha = 0.0;
  double value(double s) const;
  double slope(double s) const { return -c * std::pow(s, alpha); }
};

class KineticPotential {
 public:
  using Tag = std::variant<std::monostate, PurePowerTag, SechSquaredTag>;

  /// Samples (v_i, s_i, fbar_i) with s strictly increasing; fbar'(s_i) = -1/v_i.
  static KineticPotential from_samples(std::vector<double> v, std::vector<double> s, std::vector<double> fbar);
  static KineticPotential pure_power(PurePowerTag tag);
  static KineticPotential sech_squared(SechSquaredTag tag = {});

  double fbar(double s) const;
  double fbar_slope(double s) const;
  /// s with fbar(s) = value.
  double inverse(double value) const;

  double s_min() const { return s_.front(); }
  double s_max() const { return s_.back(); }
  /// Evaluation is refused this many times beyond either end of the samples.
  static constexpr double extension_factor = 1e4;

  /// a + b fbar, the kinetic potential of a + b f.
  KineticPotential affine(double a, double b) const;

  const std::vector<double>& s() const { return s_; }
  const std::vector<double>& values() const { return fbar_; }
  const std::vector<double>& couplings() const { return v_; }
  const Tag& tag() const { return tag_; }

 private:
  KineticPotential() = default;
  void build();
  std::vector<double> v_, s_, fbar_;
  MonotoneCubic interp_;
  KineticTail low_, high_;
  Tag tag_;
};

std::vector<double> default_kinetic_grid();

KineticPotential trajectory_to_kinetic(const EnergyTrajectory& traj, const std::vector<double>& v_grid = default_kinetic_grid());

/// F(v) = min_s { s + v fbar(s) }.
double kinetic_to_trajectory(const KineticPotential& kin, double v);

/// P = |E|^{(2+q)/(2q)} [2/(2+q)]^{1/q} [|q|/(2+q)]^{1/2}
double p_number(double q, double E);

struct KMaxOptions {
  double v_lo = 1e-3;
  double v_hi = 1e7;
  double rel_tol = 1e-10;
  double growth = 10.0;
  int max_expansions = 8;
};

struct KMaxResult {
  double K;
  double v_star;
  int evaluations;
};

/// K = max_v { F(v) - v f_value }.
KMaxResult k_via_max(const EnergyTrajectory& traj, double f_value, const KMaxOptions& opt = {});

class KFunction {
 public:
  struct PowerLaw {
    double P;
  };
  struct SechSquared {
    double scale;
  };
  struct Numeric {
    std::shared_ptr<const EnergyTrajectory> traj;
    PotentialShape shape;
    KMaxOptions opt;
  };
  using Rep = std::variant<PowerLaw, SechSquared, Numeric>;

  explicit KFunction(Rep r) : rep_(std::move(r)) {}
  static KFunction numeric(EnergyTrajectory traj, PotentialShape shape, KMaxOptions opt = {});

  double operator()(double x) const;
  const Rep& rep() const { return rep_; }

 private:
  Rep rep_;
};

/// (P(q)/x)^2 for a + b|x/t|^q (harmonic included), sinh^-2(2x/t)/t^2 for a - b sech^2(x/t).
KFunction k_function_closed(const PotentialShape& shape);

/// F^A(v) = min_s { s + v g(fbar_seed(s)) } with g the monotone interpolant of
/// the pairs (g_from[i], g_to[i]).
class EnvelopeTrajectory {
 public:
  EnvelopeTrajectory(KineticPotential seed, std::vector<double> g_from, std::vector<double> g_to);
  double operator()(double v) const;

 private:
  KineticPotential seed_;
  MonotoneCubic g_;
};

EnvelopeTrajectory envelope_trajectory(const KineticPotential& seed, std::vector<double> g_from,
                                       std::vector<double> g_to);

void write_kinetic_csv(const KineticPotential& kin, const std::filesystem::path& path);
void write_k_csv(const KFunction& K, const std::vector<double>& xs, const std::filesystem::path& path);

}  // namespace specinv
