#include "specinv/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "specinv/error.hpp"

namespace specinv {

ScalarExtremum golden_section_maximize(const std::function<double(double)>& f, double a, double b,
                                       double tol, int max_iterations) {
  static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  if (b < a) std::swap(a, b);
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int evals = 2;
  for (int i = 0; i < max_iterations && (b - a) > tol; ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++evals;
  }
  if (fc >= fd) return {c, fc, evals};
  return {d, fd, evals};
}

RootResult bracketed_secant(const std::function<double(double)>& f, double a, double b, double fa,
                            double fb, const RootTolerance& tol) {
  if (fa == 0.0) return {a, fa, 0, true};
  if (fb == 0.0) return {b, fb, 0, true};
  if (std::signbit(fa) == std::signbit(fb))
    throw Error(ErrorKind::NoBracket, "bracketed_secant: endpoints do not straddle a root");

  // side: which endpoint was retained on the previous step (-1 = a, +1 = b)
  int side = 0;
  double x = a;
  double fx = fa;
  for (int it = 1; it <= tol.max_iterations; ++it) {
    x = (a * fb - b * fa) / (fb - fa);
    // keep the iterate strictly inside; fall back to bisection when the
    // secant lands on (or outside) a bracket end
    const double lo = std::min(a, b), hi = std::max(a, b);
    if (!(x > lo && x < hi)) x = 0.5 * (a + b);
    fx = f(x);
    if (std::abs(fx) <= tol.f_tol) return {x, fx, it, true};
    if (std::signbit(fx) == std::signbit(fb)) {
      b = x;
      fb = fx;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = x;
      fa = fx;
      if (side == +1) fb *= 0.5;
      side = +1;
    }
    if (std::abs(b - a) <= tol.x_tol) {
      const bool use_a = std::abs(fa) < std::abs(fb);
      return {use_a ? a : b, use_a ? fa : fb, it, true};
    }
  }
  return {x, fx, tol.max_iterations, false};
}

double simpson(std::span<const double> y, double h) {
  const std::size_t n = y.size();
  if (n < 2) return 0.0;
  if (n == 2) return 0.5 * h * (y[0] + y[1]);
  const std::size_t intervals = n - 1;
  std::size_t even_end = (intervals % 2 == 0) ? n - 1 : n - 4;
  double sum = 0.0;
  if (intervals == 1) return 0.5 * h * (y[0] + y[1]);
  if (intervals == 3) {
    return 3.0 * h / 8.0 * (y[0] + 3.0 * y[1] + 3.0 * y[2] + y[3]);
  }
  double odd = 0.0, even = 0.0;
  for (std::size_t i = 1; i < even_end; ++i) (i % 2 ? odd : even) += y[i];
  sum = h / 3.0 * (y[0] + 4.0 * odd + 2.0 * even + y[even_end]);
  if (even_end != n - 1) {
    const std::size_t k = even_end;
    sum += 3.0 * h / 8.0 * (y[k] + 3.0 * y[k + 1] + 3.0 * y[k + 2] + y[k + 3]);
  }
  return sum;
}

std::vector<double> log_spaced(double lo, double hi, int per_decade) {
  if (!(lo > 0.0 && hi > lo && per_decade > 0))
    throw Error(ErrorKind::InvalidArgument, "log_spaced: need 0 < lo < hi and per_decade > 0");
  const double decades = std::log10(hi / lo);
  const auto n = static_cast<std::size_t>(std::ceil(decades * per_decade)) + 1;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = lo * std::pow(10.0, decades * static_cast<double>(i) / static_cast<double>(n - 1));
  out.back() = hi;
  return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i)
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  out.back() = hi;
  return out;
}

namespace {

double pchip_end_slope(double h0, double h1, double del0, double del1) {
  double d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
  if (std::signbit(d) != std::signbit(del0)) {
    d = 0.0;
  } else if (std::signbit(del0) != std::signbit(del1) && std::abs(d) > std::abs(3.0 * del0)) {
    d = 3.0 * del0;
  }
  return d;
}

}  // namespace

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n)
    throw Error(ErrorKind::InvalidArgument, "MonotoneCubic: need at least two matching knots");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1])) throw Error(ErrorKind::InvalidArgument, "MonotoneCubic: knots not increasing");

  d_.assign(n, 0.0);
  std::vector<double> h(n - 1), del(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    del[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  if (n == 2) {
    d_[0] = d_[1] = del[0];
    return;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (del[i - 1] * del[i] <= 0.0) continue;
    const double w1 = 2.0 * h[i] + h[i - 1];
    const double w2 = h[i] + 2.0 * h[i - 1];
    d_[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
  }
  d_[0] = pchip_end_slope(h[0], h[1], del[0], del[1]);
  d_[n - 1] = pchip_end_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
}

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y, std::vector<double> slopes)
    : x_(std::move(x)), y_(std::move(y)), d_(std::move(slopes)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n || d_.size() != n)
    throw Error(ErrorKind::InvalidArgument, "MonotoneCubic: need at least two matching knots");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1])) throw Error(ErrorKind::InvalidArgument, "MonotoneCubic: knots not increasing");
  limit_slopes();
}

void MonotoneCubic::limit_slopes() {
  for (std::size_t k = 0; k + 1 < x_.size(); ++k) {
    const double del = (y_[k + 1] - y_[k]) / (x_[k + 1] - x_[k]);
    if (del == 0.0) {
      d_[k] = d_[k + 1] = 0.0;
      continue;
    }
    double alpha = d_[k] / del;
    double beta = d_[k + 1] / del;
    if (alpha < 0.0) d_[k] = alpha = 0.0;
    if (beta < 0.0) d_[k + 1] = beta = 0.0;
    const double r2 = alpha * alpha + beta * beta;
    if (r2 > 9.0) {
      const double tau = 3.0 / std::sqrt(r2);
      d_[k] = tau * alpha * del;
      d_[k + 1] = tau * beta * del;
    }
  }
}

std::size_t MonotoneCubic::segment(double t) const {
  const auto it = std::upper_bound(x_.begin(), x_.end(), t);
  std::size_t k = static_cast<std::size_t>(it - x_.begin());
  if (k == 0) return 0;
  return std::min(k - 1, x_.size() - 2);
}

double MonotoneCubic::operator()(double t) const {
  if (t <= x_.front()) return y_.front() + d_.front() * (t - x_.front());
  if (t >= x_.back()) return y_.back() + d_.back() * (t - x_.back());
  const std::size_t k = segment(t);
  const double h = x_[k + 1] - x_[k];
  const double s = (t - x_[k]) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  return h00 * y_[k] + h10 * h * d_[k] + h01 * y_[k + 1] + h11 * h * d_[k + 1];
}

double MonotoneCubic::derivative(double t) const {
  if (t <= x_.front()) return d_.front();
  if (t >= x_.back()) return d_.back();
  const std::size_t k = segment(t);
  const double h = x_[k + 1] - x_[k];
  const double s = (t - x_[k]) / h;
  const double s2 = s * s;
  const double dh00 = (6.0 * s2 - 6.0 * s) / h;
  const double dh10 = 3.0 * s2 - 4.0 * s + 1.0;
  const double dh01 = (-6.0 * s2 + 6.0 * s) / h;
  const double dh11 = 3.0 * s2 - 2.0 * s;
  return dh00 * y_[k] + dh10 * d_[k] + dh01 * y_[k + 1] + dh11 * d_[k + 1];
}

}  // namespace specinv
