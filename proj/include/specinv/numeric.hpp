#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace specinv {

struct ScalarExtremum {
  double x;
  double value;
  int evaluations;
};

/// Golden-section search for the maximum of a unimodal function on [a, b].
/// Stops once the bracket is narrower than `tol`.
ScalarExtremum golden_section_maximize(const std::function<double(double)>& f, double a, double b,
                                       double tol, int max_iterations = 400);

inline ScalarExtremum golden_section_minimize(const std::function<double(double)>& f, double a, double b,
                                              double tol, int max_iterations = 400) {
  auto r = golden_section_maximize([&](double x) { return -f(x); }, a, b, tol, max_iterations);
  r.value = -r.value;
  return r;
}

struct RootResult {
  double x;
  double fx;
  int iterations;
  bool converged;
};

struct RootTolerance {
  double x_tol = 0.0;  // stop when the bracket is narrower than this
  double f_tol = 0.0;  // stop when |f| <= f_tol
  int max_iterations = 200;
};

/// Illinois-modified regula falsi on a sign-changing bracket. `fa` and `fb`
/// are f(a) and f(b) and must have opposite signs (or one of them be zero).
RootResult bracketed_secant(const std::function<double(double)>& f, double a, double b, double fa,
                            double fb, const RootTolerance& tol);

/// Composite Simpson rule on a uniform grid; an odd number of intervals is
/// closed with the 3/8 rule on the last three.
double simpson(std::span<const double> y, double h);

std::vector<double> log_spaced(double lo, double hi, int per_decade);
std::vector<double> linspace(double lo, double hi, std::size_t n);

/// Piecewise cubic Hermite interpolant on strictly increasing knots.
/// With no slopes supplied the Fritsch-Carlson (PCHIP) slopes are used;
/// supplied slopes are limited the same way so monotone data stays monotone.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y);
  MonotoneCubic(std::vector<double> x, std::vector<double> y, std::vector<double> slopes);

  /// Evaluates inside [x.front(), x.back()]; outside, continues linearly
  /// with the end slope.
  double operator()(double t) const;
  double derivative(double t) const;

  std::span<const double> knots() const { return x_; }
  std::span<const double> values() const { return y_; }
  std::span<const double> slopes() const { return d_; }
  bool empty() const { return x_.empty(); }

 private:
  std::size_t segment(double t) const;
  void limit_slopes();

  std::vector<double> x_, y_, d_;
};

}  // namespace specinv
