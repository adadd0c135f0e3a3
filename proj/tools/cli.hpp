#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "specinv/shape.hpp"
#include "specinv/trajectory.hpp"

namespace specinv::cli {

/// Everything a subcommand may read; flags override the config file, which
/// overrides these defaults.
struct Options {
  std::string command;
  std::string figure;

  std::string analytic;  // sech2, exponential, power, harmonic
  std::string input;     // trajectory CSV v,F[,Fprime]
  double f0 = -1.0;      // power: f0 + A |x|^q
  double A = 1.0;
  double q = 1.5;
  std::string out = "out";

  double v_min = 0.1;
  double v_max = 100.0;
  int v_points = 61;

  double v1 = 1e4;
  double h = 0.05;
  double sigma = 0.5;
  int steps = 40;
  std::string bounded = "auto";  // auto, yes, no

  std::string seed = "quadratic:1/20";
  int iterations = 5;
  double stop_tolerance = 1e-3;
  double x_min = 0.02;
  double x_max = 4.0;
  int x_points = 80;

  int grid_points = 4000;
  double energy_tolerance = 1e-9;
};

/// Thrown for malformed input that CLI11 cannot catch itself; exit status 2.
struct UsageError {
  std::string message;
};

/// "quadratic:c" is f0 + c x^2, "power:q:c" is f0 + c |x|^q, "sech2" and
/// "exponential" are the unit wells shifted to f0. c may be written a/b.
PotentialShape parse_seed(const std::string& text, double f0);

/// The shape named by --analytic, if any.
std::optional<PotentialShape> analytic_shape(const Options& o);
EnergyTrajectory input_trajectory(const Options& o);

std::vector<double> geometric_grid(double lo, double hi, int n);

/// The whole command line; returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace specinv::cli
