#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "specinv/eigensolve.hpp"
#include "specinv/error.hpp"
#include "specinv/shape.hpp"
#include "specinv/trajectory.hpp"

namespace specinv {

struct ConstructiveConfig {
  double v1 = 1e4;
  double sigma = 0.5;
  double h = 0.05;
  int steps = 40;
  /// Cut the straight extension at zero; inferred from the data when unset.
  std::optional<bool> bounded;
  double y_tolerance = 1e-6;
  int sigma_relaxations = 10;
  /// Place the turning point at sigma x_{k+1}, the point whose value is
  /// sought, rather than at sigma x_k.
  bool anchor_next = true;
  SolverConfig solver;
};

struct StepRecord {
  int k = 0;  // node index, x_k = b + k h
  double x = 0.0;
  double g = 0.0;
  double v = 0.0;  // coupling used to place g_k
  double sigma = 0.0;
  double residual = 0.0;
  int iterations = 0;
  std::optional<double> exact;
};

struct ReconstructionReport {
  ConstructiveConfig config;
  double f0 = 0.0;
  HeadModel head;
  bool bounded = false;
  std::vector<StepRecord> steps;
  std::optional<PotentialShape> shape;
  std::vector<std::string> warnings;
  /// Set when the run stopped on an error; the steps so far are kept.
  std::optional<ErrorKind> failure;
  std::string failure_message;

  bool ok() const { return !failure.has_value(); }
  /// max_k |g_k - exact(x_k)| over steps with a known exact value.
  std::optional<double> max_error() const;
};

/// Reconstruction in progress: head on [0, b], nodes g_1..g_k.
struct ConstructiveState {
  HeadPlusSegments model;
  double slope_guess = 1.0;
  bool bounded = false;
  double f0 = 0.0;

  std::size_t k() const { return model.nodes.size(); }
  double x_k() const { return model.node_x(k()); }
  double g_k() const { return model.node_value(k()); }
  PotentialShape shape() const;
};

/// f(0) estimate, flat-patch test, then the head fit.
ConstructiveState init(const EnergyTrajectory& traj, const ConstructiveConfig& cfg);

struct CouplingChoice {
  double v;
  double sigma;
};

/// v = R^{-1}(g(sigma x)), x = x_{k+1} (or x_k), relaxing sigma toward 1 when the target is out of reach.
CouplingChoice coupling_for_step(const ConstructiveState& state, const EnergyTrajectory& traj,
                                 const ConstructiveConfig& cfg);

struct NextValue {
  double y;
  double residual;
  int iterations;
  bool capped;  // held at zero by the bounded cut
};

/// y = g(x_{k+1}) with G(v, y) = F(v), G the ground energy of the extended model.
NextValue solve_next_value(const ConstructiveState& state, const EnergyTrajectory& traj, double v,
                           const ConstructiveConfig& cfg);

/// The extended model used for trial value y.
PotentialShape extended_shape(const ConstructiveState& state, double y);

ReconstructionReport run_constructive(const EnergyTrajectory& traj, const ConstructiveConfig& cfg = {});

/// CSV `x,g,exact,v_used,residual`; the head is sampled on [0, b) first.
void write_report_csv(const ReconstructionReport& rep, const std::filesystem::path& path);
/// Full config, head model and nodes.
std::string report_json(const ReconstructionReport& rep);

}  // namespace specinv
