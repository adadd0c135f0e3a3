#include "specinv/shape.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "specinv/error.hpp"

namespace specinv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// |base(u) - base(inf)| <= 1e-13 for u beyond these points
constexpr double kSechFlatFrom = 15.66;
constexpr double kExpFlatFrom = 29.94;

double analytic_value(const AnalyticShape& a, double x) {
  const double u = x / a.scale;
  switch (a.kind) {
    case AnalyticKind::sech_squared: {
      const double c = std::cosh(u);
      return a.shift - a.mult / (c * c);
    }
    case AnalyticKind::exponential:
      return a.shift - a.mult * std::exp(-u);
    case AnalyticKind::shifted_power:
      return a.shift + a.mult * std::pow(u, a.q);
    case AnalyticKind::harmonic:
      return a.shift + a.mult * u * u;
  }
  return 0.0;
}

double apply_cut(double value, double anchor, bool cut) {
  if (!cut) return value;
  return std::min(value, std::max(anchor, 0.0));
}

double segments_value(const HeadPlusSegments& s, double x) {
  if (x <= s.head.b) return s.head.value(x);
  const std::size_t last = s.last_node();
  const double x_last = s.node_x(last);
  if (x >= x_last) {
    const double g = s.node_value(last);
    return apply_cut(g + s.tail_slope * (x - x_last), g, s.cut_to_zero);
  }
  const auto k = std::min(static_cast<std::size_t>((x - s.head.b) / s.h), last - 1);
  const double t = (x - s.node_x(k)) / s.h;
  return s.node_value(k) + t * (s.node_value(k + 1) - s.node_value(k));
}

double tabulated_tail(const TabulatedShape& t, double x) {
  const double xn = t.x.back(), p = t.extrapolation_power;
  if (p == 1.0) return t.f.back() + t.extrapolation_slope * (x - xn);
  return t.f.back() + t.extrapolation_slope * xn / p * std::expm1(p * std::log(x / xn));
}

double tabulated_value(const TabulatedShape& t, double x) {
  if (x <= t.x.front()) return t.f.front();
  if (x >= t.x.back()) return apply_cut(tabulated_tail(t, x), t.f.back(), t.cut_to_zero);
  return t.interp(x);
}

std::optional<double> linear_tail_flat_from(double x_last, double g_last, double slope, bool cut) {
  if (slope == 0.0) return x_last;
  if (cut) {
    if (g_last >= 0.0) return x_last;
    if (slope > 0.0) return x_last + (-g_last) / slope;
  }
  return std::nullopt;
}

}  // namespace

double HeadModel::value(double x) const {
  if (kind == Kind::flat) return f0;
  return f0 + A * std::pow(std::abs(x), q);
}

double HeadModel::slope(double x) const {
  if (kind == Kind::flat || x <= 0.0) return 0.0;
  return A * q * std::pow(x, q - 1.0);
}

PotentialShape PotentialShape::analytic(AnalyticShape a) {
  if (!(a.mult > 0.0) || !(a.scale > 0.0) || !std::isfinite(a.shift))
    throw Error(ErrorKind::InvalidArgument, "analytic shape needs mult > 0, scale > 0 and finite shift");
  if (a.kind == AnalyticKind::shifted_power && !(a.q > 0.0))
    throw Error(ErrorKind::InvalidArgument, "shifted power needs q > 0");
  return PotentialShape(a);
}

PotentialShape PotentialShape::sech_squared(double shift, double mult, double scale) {
  return analytic({AnalyticKind::sech_squared, shift, mult, 2.0, scale});
}

PotentialShape PotentialShape::exponential(double shift, double mult, double scale) {
  return analytic({AnalyticKind::exponential, shift, mult, 1.0, scale});
}

PotentialShape PotentialShape::shifted_power(double shift, double mult, double q, double scale) {
  return analytic({AnalyticKind::shifted_power, shift, mult, q, scale});
}

PotentialShape PotentialShape::harmonic(double shift, double mult, double scale) {
  return analytic({AnalyticKind::harmonic, shift, mult, 2.0, scale});
}

PotentialShape PotentialShape::head_plus_segments(HeadPlusSegments s) {
  if (!(s.head.b > 0.0) || !(s.h > 0.0))
    throw Error(ErrorKind::InvalidArgument, "head-plus-segments needs b > 0 and h > 0");
  if (s.head.kind == HeadModel::Kind::power && !(s.head.A > 0.0 && s.head.q > 0.0))
    throw Error(ErrorKind::InvalidArgument, "power head needs A > 0 and q > 0");
  for (double g : s.nodes)
    if (!std::isfinite(g)) throw Error(ErrorKind::InvalidArgument, "non-finite node value");
  if (!std::isfinite(s.tail_slope)) throw Error(ErrorKind::InvalidArgument, "non-finite tail slope");
  return PotentialShape(std::move(s));
}

PotentialShape PotentialShape::tabulated(std::vector<double> x, std::vector<double> f, double extrapolation_slope,
                                         bool cut_to_zero, double extrapolation_power) {
  if (x.size() < 2 || x.size() != f.size())
    throw Error(ErrorKind::InvalidArgument, "tabulated shape needs at least two (x, f) pairs");
  if (x.front() < 0.0) throw Error(ErrorKind::InvalidArgument, "tabulated shape starts below x = 0");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(f[i]))
      throw Error(ErrorKind::InvalidArgument, "tabulated shape has non-finite entries");
    if (i > 0 && !(x[i] > x[i - 1])) throw Error(ErrorKind::InvalidArgument, "tabulated x not increasing");
    if (i > 0 && f[i] < f[i - 1]) throw Error(ErrorKind::InvalidArgument, "tabulated shape not monotone");
  }
  if (!(extrapolation_slope >= 0.0))
    throw Error(ErrorKind::InvalidArgument, "tabulated shape needs a nonnegative extrapolation slope");
  if (!(extrapolation_power > 0.0) || !std::isfinite(extrapolation_power))
    throw Error(ErrorKind::InvalidArgument, "extrapolation power must be positive");
  if (x.back() <= 0.0 && extrapolation_power != 1.0)
    throw Error(ErrorKind::InvalidArgument, "power extrapolation needs a last knot above x = 0");
  TabulatedShape t;
  t.interp = MonotoneCubic(x, f);
  t.x = std::move(x);
  t.f = std::move(f);
  t.extrapolation_slope = extrapolation_slope;
  t.extrapolation_power = extrapolation_power;
  t.cut_to_zero = cut_to_zero;
  return PotentialShape(std::move(t));
}

double PotentialShape::operator()(double x) const {
  x = std::abs(x);
  return std::visit(
      [x](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, AnalyticShape>) return analytic_value(s, x);
        else if constexpr (std::is_same_v<T, HeadPlusSegments>) return segments_value(s, x);
        else return tabulated_value(s, x);
      },
      v_);
}

double PotentialShape::limit_at_infinity() const {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, AnalyticShape>) {
          if (s.kind == AnalyticKind::sech_squared || s.kind == AnalyticKind::exponential) return s.shift;
          return kInf;
        } else if constexpr (std::is_same_v<T, HeadPlusSegments>) {
          const double g = s.node_value(s.last_node());
          if (s.tail_slope == 0.0) return g;
          if (s.cut_to_zero) return std::max(g, 0.0);
          return kInf;
        } else {
          if (s.extrapolation_slope == 0.0) return s.f.back();
          if (s.cut_to_zero) return std::max(s.f.back(), 0.0);
          return kInf;
        }
      },
      v_);
}

std::optional<double> PotentialShape::constant_beyond() const {
  return std::visit(
      [](const auto& s) -> std::optional<double> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, AnalyticShape>) {
          if (s.kind == AnalyticKind::sech_squared) return s.scale * kSechFlatFrom;
          if (s.kind == AnalyticKind::exponential) return s.scale * kExpFlatFrom;
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, HeadPlusSegments>) {
          const std::size_t last = s.last_node();
          return linear_tail_flat_from(s.node_x(last), s.node_value(last), s.tail_slope, s.cut_to_zero);
        } else {
          const double p = s.extrapolation_power;
          if (p == 1.0 || s.extrapolation_slope == 0.0 || !s.cut_to_zero || s.f.back() >= 0.0)
            return linear_tail_flat_from(s.x.back(), s.f.back(), s.extrapolation_slope, s.cut_to_zero);
          const double xn = s.x.back();
          return xn * std::pow(1.0 + p * (-s.f.back()) / (s.extrapolation_slope * xn), 1.0 / p);
        }
      },
      v_);
}

double PotentialShape::level_crossing(double level, double x_cap) const {
  if ((*this)(0.0) > level) return 0.0;
  if ((*this)(x_cap) <= level) return x_cap;
  double lo = 0.0, hi = x_cap;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    ((*this)(mid) <= level ? lo : hi) = mid;
  }
  return lo;
}

std::string PotentialShape::describe() const {
  std::ostringstream os;
  os.precision(10);
  std::visit(
      [&os](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, AnalyticShape>) {
          static const char* names[] = {"sech_squared", "exponential", "shifted_power", "harmonic"};
          os << names[static_cast<int>(s.kind)] << "(shift=" << s.shift << ", mult=" << s.mult;
          if (s.kind == AnalyticKind::shifted_power) os << ", q=" << s.q;
          os << ", scale=" << s.scale << ")";
        } else if constexpr (std::is_same_v<T, HeadPlusSegments>) {
          os << "head_plus_segments(b=" << s.head.b << ", h=" << s.h << ", nodes=" << s.nodes.size() << ")";
        } else {
          os << "tabulated(points=" << s.x.size() << ", x_max=" << s.x.back() << ")";
        }
      },
      v_);
  return os.str();
}

bool monotone_on(const PotentialShape& f, const std::vector<double>& xs, double slack) {
  double prev = -kInf;
  for (double x : xs) {
    const double y = f(x);
    if (y < prev - slack) return false;
    prev = std::max(prev, y);
  }
  return true;
}

}  // namespace specinv
