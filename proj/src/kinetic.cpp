#include "specinv/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "specinv/csv.hpp"
#include "specinv/eigensolve.hpp"
#include "specinv/error.hpp"
#include "specinv/parallel.hpp"

namespace specinv {

double KineticTail::value(double s) const {
  if (std::abs(alpha + 1.0) < 1e-12) return f_end - c * std::log(s / s_end);
  const double p = alpha + 1.0;
  return f_end - c / p * (std::pow(s, p) - std::pow(s_end, p));
}

namespace {

// least squares of log(1/v) against log s over samples [first, last]
KineticTail fit_tail(const std::vector<double>& v, const std::vector<double>& s, const std::vector<double>& f,
                     std::size_t first, std::size_t last, std::size_t end) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(last - first + 1);
  for (std::size_t i = first; i <= last; ++i) {
    const double x = std::log(s[i]);
    const double y = -std::log(v[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  KineticTail t;
  t.s_end = s[end];
  t.f_end = f[end];
  t.alpha = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  t.c = std::exp((sy - t.alpha * sx) / n);
  return t;
}

// 2s - 2 sqrt(s^2 + s) and its derivative, rearranged to avoid cancellation at large s
double sech_fbar(double s) { return -2.0 * s / (s + std::sqrt(s * s + s)); }
double sech_fbar_slope(double s) {
  const double r = std::sqrt(s * s + s);
  return -1.0 / (r * (2.0 * r + 2.0 * s + 1.0));
}

double tagged_fbar(const KineticPotential::Tag& tag, double s) {
  if (const auto* p = std::get_if<PurePowerTag>(&tag)) return p->shift + p->mult * std::pow(p->P / std::sqrt(s), p->q);
  const auto& t = std::get<SechSquaredTag>(tag);
  return t.shift + t.mult * sech_fbar(s);
}

double tagged_slope(const KineticPotential::Tag& tag, double s) {
  if (const auto* p = std::get_if<PurePowerTag>(&tag))
    return -0.5 * p->q * p->mult * std::pow(p->P / std::sqrt(s), p->q) / s;
  const auto& t = std::get<SechSquaredTag>(tag);
  return t.mult * sech_fbar_slope(s);
}

KineticPotential sample_tagged(const KineticPotential::Tag& tag,
                               KineticPotential (*make)(std::vector<double>, std::vector<double>, std::vector<double>)) {
  std::vector<double> s = log_spaced(1e-6, 1e6, 50), f(s.size()), v(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    f[i] = tagged_fbar(tag, s[i]);
    v[i] = -1.0 / tagged_slope(tag, s[i]);
  }
  return make(std::move(v), std::move(s), std::move(f));
}

}  // namespace

KineticPotential KineticPotential::from_samples(std::vector<double> v, std::vector<double> s,
                                                std::vector<double> fbar) {
  if (v.size() < 4 || s.size() != v.size() || fbar.size() != v.size())
    throw Error(ErrorKind::InvalidArgument, "kinetic potential needs at least four matching samples");
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(v[i] > 0.0) || !(s[i] > 0.0) || !std::isfinite(fbar[i]))
      throw Error(ErrorKind::InvalidData, "kinetic samples must have v > 0, s > 0 and finite fbar");
    if (i > 0 && !(s[i] > s[i - 1])) {
      std::ostringstream os;
      os << "s not strictly increasing at sample " << i << " (v = " << v[i] << ")";
      throw Error(ErrorKind::NonMonotone, os.str());
    }
    if (i > 0 && !(fbar[i] < fbar[i - 1])) {
      std::ostringstream os;
      os << "fbar not strictly decreasing at sample " << i << " (v = " << v[i] << ")";
      throw Error(ErrorKind::NonMonotone, os.str());
    }
  }
  KineticPotential k;
  k.v_ = std::move(v);
  k.s_ = std::move(s);
  k.fbar_ = std::move(fbar);
  k.build();
  return k;
}

void KineticPotential::build() {
  std::vector<double> slopes(v_.size());
  for (std::size_t i = 0; i < v_.size(); ++i) slopes[i] = -1.0 / v_[i];
  interp_ = MonotoneCubic(s_, fbar_, slopes);

  const std::size_t n = s_.size();
  std::size_t lo_last = 0;
  while (lo_last + 1 < n && s_[lo_last + 1] <= 10.0 * s_[0]) ++lo_last;
  lo_last = std::max<std::size_t>(lo_last, 2);
  std::size_t hi_first = n - 1;
  while (hi_first > 0 && s_[hi_first - 1] >= s_[n - 1] / 10.0) --hi_first;
  hi_first = std::min(hi_first, n - 3);
  low_ = fit_tail(v_, s_, fbar_, 0, lo_last, 0);
  high_ = fit_tail(v_, s_, fbar_, hi_first, n - 1, n - 1);
}

KineticPotential KineticPotential::pure_power(PurePowerTag tag) {
  if (!(tag.P > 0.0 && tag.q > 0.0 && tag.mult > 0.0))
    throw Error(ErrorKind::InvalidArgument, "pure power kinetic potential needs P, q, mult > 0");
  KineticPotential k = sample_tagged(tag, &KineticPotential::from_samples);
  k.tag_ = tag;
  return k;
}

KineticPotential KineticPotential::sech_squared(SechSquaredTag tag) {
  if (!(tag.mult > 0.0)) throw Error(ErrorKind::InvalidArgument, "sech^2 kinetic potential needs mult > 0");
  KineticPotential k = sample_tagged(tag, &KineticPotential::from_samples);
  k.tag_ = tag;
  return k;
}

double KineticPotential::fbar(double s) const {
  if (!(s > 0.0)) throw Error(ErrorKind::KineticRangeExceeded, "kinetic energy must be positive");
  if (!std::holds_alternative<std::monostate>(tag_)) return tagged_fbar(tag_, s);
  if (s < s_.front() / extension_factor || s > s_.back() * extension_factor) {
    std::ostringstream os;
    os << "s = " << s << " is outside the extended range [" << s_.front() / extension_factor << ", "
       << s_.back() * extension_factor << "]";
    throw Error(ErrorKind::KineticRangeExceeded, os.str());
  }
  if (s < s_.front()) return low_.value(s);
  if (s > s_.back()) return high_.value(s);
  return interp_(s);
}

double KineticPotential::fbar_slope(double s) const {
  if (!(s > 0.0)) throw Error(ErrorKind::KineticRangeExceeded, "kinetic energy must be positive");
  if (!std::holds_alternative<std::monostate>(tag_)) return tagged_slope(tag_, s);
  if (s < s_.front()) return low_.slope(s);
  if (s > s_.back()) return high_.slope(s);
  return interp_.derivative(s);
}

double KineticPotential::inverse(double value) const {
  double lo = std::log(s_.front() / extension_factor), hi = std::log(s_.back() * extension_factor);
  if (!std::holds_alternative<std::monostate>(tag_)) {
    lo = std::log(1e-30);
    hi = std::log(1e30);
  }
  auto g = [&](double t) { return fbar(std::exp(t)) - value; };
  const double ga = g(lo), gb = g(hi);
  if (ga < 0.0 || gb > 0.0) {
    std::ostringstream os;
    os << "fbar = " << value << " is not attained on the extended range";
    throw Error(ErrorKind::KineticRangeExceeded, os.str());
  }
  RootTolerance tol;
  tol.x_tol = 1e-14;
  tol.f_tol = 1e-15 * std::max(1.0, std::abs(value));
  tol.max_iterations = 400;
  return std::exp(bracketed_secant(g, lo, hi, ga, gb, tol).x);
}

KineticPotential KineticPotential::affine(double a, double b) const {
  if (!(b > 0.0)) throw Error(ErrorKind::InvalidArgument, "affine multiplier must be positive");
  KineticPotential k = *this;
  for (std::size_t i = 0; i < k.s_.size(); ++i) {
    k.fbar_[i] = a + b * fbar_[i];
    k.v_[i] = v_[i] / b;
  }
  if (auto* p = std::get_if<PurePowerTag>(&k.tag_)) {
    p->shift = a + b * p->shift;
    p->mult *= b;
  } else if (auto* t = std::get_if<SechSquaredTag>(&k.tag_)) {
    t->shift = a + b * t->shift;
    t->mult *= b;
  }
  k.build();
  return k;
}

std::vector<double> default_kinetic_grid() { return log_spaced(1e-2, 1e6, 200); }

KineticPotential trajectory_to_kinetic(const EnergyTrajectory& traj, const std::vector<double>& v_grid) {
  const std::size_t n = v_grid.size();
  std::vector<double> s(n), f(n);
  parallel_for(n, [&](std::size_t i) {
    const double F = traj.F(v_grid[i]);
    f[i] = traj.Fprime(v_grid[i]);
    s[i] = F - v_grid[i] * f[i];
  });
  return KineticPotential::from_samples(v_grid, std::move(s), std::move(f));
}

double kinetic_to_trajectory(const KineticPotential& kin, double v) {
  if (!(v > 0.0)) throw Error(ErrorKind::InvalidArgument, "coupling must be positive");
  const auto& s = kin.s();
  const auto& f = kin.values();
  std::size_t best = 0;
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i] + v * f[i] < s[best] + v * f[best]) best = i;
  if (best == 0 || best + 1 == s.size()) {
    std::ostringstream os;
    os << "minimizing s for v = " << v << " lies at the edge of the sampled range";
    throw Error(ErrorKind::MinimizerAtBoundary, os.str());
  }
  auto phi = [&](double t) {
    const double x = std::exp(t);
    return x + v * kin.fbar(x);
  };
  return golden_section_minimize(phi, std::log(s[best - 1]), std::log(s[best + 1]), 1e-12).value;
}

double p_number(double q, double E) {
  if (q == 0.0) throw Error(ErrorKind::InvalidArgument, "P-numbers need q != 0");
  const double aq = std::abs(q);
  return std::pow(std::abs(E), (2.0 + q) / (2.0 * q)) * std::pow(2.0 / (2.0 + q), 1.0 / q) *
         std::sqrt(aq / (2.0 + q));
}

KMaxResult k_via_max(const EnergyTrajectory& traj, double f_value, const KMaxOptions& opt) {
  if (!(opt.v_lo > 0.0 && opt.v_hi > opt.v_lo && opt.growth > 1.0))
    throw Error(ErrorKind::InvalidArgument, "k_via_max needs 0 < v_lo < v_hi and growth > 1");
  const bool tab = std::holds_alternative<TabulatedSource>(traj.source());
  const double floor_v = tab ? traj.v_min() : std::max(traj.v_min() * (1.0 + 1e-9), 0.0);
  const double ceil_v = traj.v_max();
  double lo = std::max(opt.v_lo, floor_v), hi = std::min(opt.v_hi, ceil_v);
  if (!(hi > lo)) throw Error(ErrorKind::InvalidArgument, "empty coupling bracket");

  int evaluations = 0;
  auto phi = [&](double t) {
    ++evaluations;
    const double v = std::exp(t);
    return traj.F(v) - v * f_value;
  };
  // closer than this to an end counts as touching it
  const double edge = 1e3 * opt.rel_tol + 1e-12;
  int expansions = 0;
  for (;;) {
    const double a = std::log(lo), b = std::log(hi);
    const ScalarExtremum m = golden_section_maximize(phi, a, b, opt.rel_tol);
    const bool at_lo = m.x - a < edge && lo > floor_v;
    const bool at_hi = b - m.x < edge && hi < ceil_v;
    if (!at_lo && !at_hi) return {m.value, std::exp(m.x), evaluations};
    if (++expansions > opt.max_expansions) {
      std::ostringstream os;
      os << "maximizer for f = " << f_value << " still at the bracket edge v = " << std::exp(m.x);
      throw Error(ErrorKind::MaximizerAtBoundary, os.str());
    }
    if (at_lo) {
      hi = lo;
      lo = std::max(lo / opt.growth, floor_v);
    } else {
      lo = hi;
      hi = std::min(hi * opt.growth, ceil_v);
    }
  }
}

KFunction KFunction::numeric(EnergyTrajectory traj, PotentialShape shape, KMaxOptions opt) {
  return KFunction(Numeric{std::make_shared<const EnergyTrajectory>(std::move(traj)), std::move(shape), opt});
}

double KFunction::operator()(double x) const {
  if (!(x > 0.0)) throw Error(ErrorKind::InvalidArgument, "K is defined for x > 0");
  return std::visit(
      [x](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, PowerLaw>) {
          return (r.P / x) * (r.P / x);
        } else if constexpr (std::is_same_v<T, SechSquared>) {
          const double sh = std::sinh(2.0 * x / r.scale);
          return 1.0 / (sh * sh * r.scale * r.scale);
        } else {
          return k_via_max(*r.traj, r.shape(x), r.opt).K;
        }
      },
      rep_);
}

KFunction k_function_closed(const PotentialShape& shape) {
  const auto* a = std::get_if<AnalyticShape>(&shape.variant());
  if (a && a->mult > 0.0) {
    switch (a->kind) {
      case AnalyticKind::harmonic:
        return KFunction(KFunction::PowerLaw{p_number(2.0, 1.0)});
      case AnalyticKind::shifted_power:
        return KFunction(KFunction::PowerLaw{p_number(a->q, pure_power_energy(a->q))});
      case AnalyticKind::sech_squared:
        return KFunction(KFunction::SechSquared{a->scale});
      default:
        break;
    }
  }
  throw Error(ErrorKind::UnsupportedShape, "no closed-form K function for " + shape.describe());
}

EnvelopeTrajectory::EnvelopeTrajectory(KineticPotential seed, std::vector<double> g_from, std::vector<double> g_to)
    : seed_(std::move(seed)), g_(std::move(g_from), std::move(g_to)) {}

double EnvelopeTrajectory::operator()(double v) const {
  if (!(v > 0.0)) throw Error(ErrorKind::InvalidArgument, "coupling must be positive");
  const auto& s = seed_.s();
  const auto& f = seed_.values();
  std::size_t best = 0;
  auto at = [&](std::size_t i) { return s[i] + v * g_(f[i]); };
  for (std::size_t i = 1; i < s.size(); ++i)
    if (at(i) < at(best)) best = i;
  if (best == 0 || best + 1 == s.size()) {
    std::ostringstream os;
    os << "envelope minimizer for v = " << v << " lies at the edge of the seed samples";
    throw Error(ErrorKind::MinimizerAtBoundary, os.str());
  }
  auto phi = [&](double t) {
    const double x = std::exp(t);
    return x + v * g_(seed_.fbar(x));
  };
  return golden_section_minimize(phi, std::log(s[best - 1]), std::log(s[best + 1]), 1e-12).value;
}

EnvelopeTrajectory envelope_trajectory(const KineticPotential& seed, std::vector<double> g_from,
                                       std::vector<double> g_to) {
  return EnvelopeTrajectory(seed, std::move(g_from), std::move(g_to));
}

void write_kinetic_csv(const KineticPotential& kin, const std::filesystem::path& path) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < kin.s().size(); ++i) rows.push_back({kin.s()[i], kin.values()[i]});
  write_csv(path, {"s", "fbar"}, rows);
}

void write_k_csv(const KFunction& K, const std::vector<double>& xs, const std::filesystem::path& path) {
  std::vector<std::vector<double>> rows(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) { rows[i] = {xs[i], K(xs[i])}; });
  write_csv(path, {"x", "K"}, rows);
}

}  // namespace specinv
