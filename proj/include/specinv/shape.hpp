#pragma once

#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "specinv/numeric.hpp"

namespace specinv {

enum class AnalyticKind { sech_squared, exponential, shifted_power, harmonic };

/// shift + mult * base(x / scale), with base one of -sech^2(x), -exp(-|x|),
/// |x|^q or x^2.
struct AnalyticShape {
  AnalyticKind kind = AnalyticKind::harmonic;
  double shift = 0.0;
  double mult = 1.0;
  double q = 2.0;
  double scale = 1.0;
};

/// Model for the potential on [0, b]: either the flat patch f(0) or the
/// shifted power f(0) + A x^q.
struct HeadModel {
  enum class Kind { flat, power };
  Kind kind = Kind::power;
  double f0 = 0.0;
  double A = 1.0;
  double q = 2.0;
  double b = 0.0;

  static HeadModel flat(double f0, double b) { return {Kind::flat, f0, 0.0, 0.0, b}; }
  static HeadModel power(double f0, double A, double q, double b) { return {Kind::power, f0, A, q, b}; }

  double value(double x) const;
  double slope(double x) const;
};

/// Head model on [0, b], then straight segments through g_k at x_k = b + k h
/// (g_0 = head(b) is implied), then a straight tail with `tail_slope`.
struct HeadPlusSegments {
  HeadModel head;
  double h = 0.05;
  std::vector<double> nodes;  // g_1, g_2, ... at x_1, x_2, ...
  double tail_slope = 0.0;
  bool cut_to_zero = false;

  double node_x(std::size_t k) const { return head.b + static_cast<double>(k) * h; }
  double node_value(std::size_t k) const { return k == 0 ? head.value(head.b) : nodes[k - 1]; }
  std::size_t last_node() const { return nodes.size(); }
};

/// Monotone cubic through (x_i, f_i); constant below x_0. Beyond the last
/// knot f_n + (s x_n / p) ((x / x_n)^p - 1), s = `extrapolation_slope`,
/// p = `extrapolation_power` (p = 1 is the straight continuation).
struct TabulatedShape {
  std::vector<double> x;
  std::vector<double> f;
  double extrapolation_slope = 0.0;
  double extrapolation_power = 1.0;
  bool cut_to_zero = false;
  MonotoneCubic interp;
};

/// Symmetric potential shape f(|x|), monotone nondecreasing on x >= 0 with
/// its minimum at x = 0.
class PotentialShape {
 public:
  using Variant = std::variant<AnalyticShape, HeadPlusSegments, TabulatedShape>;

  static PotentialShape analytic(AnalyticShape a);
  static PotentialShape sech_squared(double shift = 0.0, double mult = 1.0, double scale = 1.0);
  static PotentialShape exponential(double shift = 0.0, double mult = 1.0, double scale = 1.0);
  static PotentialShape shifted_power(double shift, double mult, double q, double scale = 1.0);
  static PotentialShape harmonic(double shift = 0.0, double mult = 1.0, double scale = 1.0);
  static PotentialShape head_plus_segments(HeadPlusSegments s);
  static PotentialShape tabulated(std::vector<double> x, std::vector<double> f, double extrapolation_slope,
                                  bool cut_to_zero = false, double extrapolation_power = 1.0);

  double operator()(double x) const;
  double at_zero() const { return (*this)(0.0); }

  /// sup of f, +inf for shapes that grow without bound.
  double limit_at_infinity() const;
  bool bounded() const { return limit_at_infinity() < std::numeric_limits<double>::infinity(); }

  /// Point beyond which f equals its limit (to 1e-13 of the well depth for
  /// exponentially decaying analytic shapes), if there is one.
  std::optional<double> constant_beyond() const;

  /// Largest x in [0, x_cap] with f(x) <= level.
  double level_crossing(double level, double x_cap) const;

  const Variant& variant() const { return v_; }
  std::string describe() const;

 private:
  explicit PotentialShape(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

/// True when f is nondecreasing at the given sample points (within `slack`).
bool monotone_on(const PotentialShape& f, const std::vector<double>& xs, double slack = 0.0);

}  // namespace specinv
