#include "specinv/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

#include "specinv/error.hpp"

namespace specinv {

namespace {

constexpr double kRescaleAbove = 1e150;
constexpr double kRescaleBy = 1e-150;

// Decaying root of the Numerov recurrence for a constant Q = v f - E > 0:
// y_{n+1} = lambda * y_n.
double decaying_ratio(double q, double h) {
  if (q <= 0.0) return 1.0;
  const double c = 1.0 - h * h * q / 12.0;
  const double a = 2.0 + h * h * q / c;
  return 2.0 / (a + std::sqrt(a * a - 4.0));
}

struct Shot {
  int interior_nodes = 0;
  bool exterior_node = false;
  double mismatch = 0.0;  // y_N / y_{N-1} - lambda; zero at an eigenvalue

  int count() const { return interior_nodes + (exterior_node ? 1 : 0); }
};

/// Numerov shooting on a fixed uniform grid [0, L]. The potential beyond L
/// is taken constant at v f(L), which fixes the discrete decaying ratio at
/// the last step.
class Shooter {
 public:
  Shooter(const PotentialShape& shape, double v, double L, double h_target) {
    std::size_t n = static_cast<std::size_t>(std::ceil(L / h_target));
    n = std::max<std::size_t>(n, 16);
    if (n % 2) ++n;
    h_ = L / static_cast<double>(n);
    x_.resize(n + 1);
    vf_.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      x_[i] = h_ * static_cast<double>(i);
      vf_[i] = v * shape(x_[i]);
    }
    x_.back() = L;
  }

  double h() const { return h_; }
  std::size_t last() const { return x_.size() - 1; }
  double vf(std::size_t i) const { return vf_[i]; }
  double vf_min() const { return vf_.front(); }
  double vf_max() const { return vf_.back(); }
  const std::vector<double>& x() const { return x_; }

  Shot shoot(double energy) const {
    const double h2 = h_ * h_;
    const std::size_t n = last();
    // even start: y_{-1} = y_1
    double y_prev = 1.0;
    double q0 = vf_[0] - energy;
    double q1 = vf_[1] - energy;
    double y = (1.0 + 5.0 * h2 * q0 / 12.0) / (1.0 - h2 * q1 / 12.0);
    double z_prev = (1.0 - h2 * q0 / 12.0) * y_prev;
    double z = (1.0 - h2 * q1 / 12.0) * y;
    Shot shot;
    if (std::signbit(y) != std::signbit(y_prev)) ++shot.interior_nodes;
    for (std::size_t i = 1; i < n; ++i) {
      const double qi = vf_[i] - energy;
      const double z_next = 2.0 * z + h2 * qi * y - z_prev;
      const double q_next = vf_[i + 1] - energy;
      const double y_next = z_next / (1.0 - h2 * q_next / 12.0);
      if (i + 1 < n && y_next != 0.0 && std::signbit(y_next) != std::signbit(y)) ++shot.interior_nodes;
      z_prev = z;
      z = z_next;
      y_prev = y;
      y = y_next;
      if (std::abs(y) > kRescaleAbove) {
        z *= kRescaleBy;
        z_prev *= kRescaleBy;
        y *= kRescaleBy;
        y_prev *= kRescaleBy;
      }
    }
    // y = y_N, y_prev = y_{N-1}
    const double lambda = decaying_ratio(vf_[n] - energy, h_);
    const double alpha = y - lambda * y_prev;
    shot.exterior_node = (alpha != 0.0) && (std::signbit(alpha) != std::signbit(y_prev));
    shot.mismatch = (y_prev != 0.0) ? y / y_prev - lambda : -std::numeric_limits<double>::infinity();
    return shot;
  }

  /// Matched outward/inward wavefunction at an eigenvalue, unnormalized.
  std::vector<double> wavefunction(double energy, std::size_t match) const {
    const double h2 = h_ * h_;
    const std::size_t n = last();
    match = std::clamp<std::size_t>(match, 2, n - 2);
    std::vector<double> y(n + 1, 0.0);
    auto w = [&](std::size_t i) { return 1.0 - h2 * (vf_[i] - energy) / 12.0; };

    y[0] = 1.0;
    y[1] = (1.0 + 5.0 * h2 * (vf_[0] - energy) / 12.0) / w(1);
    for (std::size_t i = 1; i < match; ++i) {
      const double z_next = 2.0 * w(i) * y[i] + h2 * (vf_[i] - energy) * y[i] - w(i - 1) * y[i - 1];
      y[i + 1] = z_next / w(i + 1);
      if (std::abs(y[i + 1]) > kRescaleAbove)
        for (std::size_t j = 0; j <= i + 1; ++j) y[j] *= kRescaleBy;
    }
    const double outward_at_match = y[match];

    std::vector<double> tail(n + 1, 0.0);
    tail[n] = 1.0;
    tail[n - 1] = 1.0 / decaying_ratio(vf_[n] - energy, h_);
    for (std::size_t i = n - 1; i > match; --i) {
      const double z_prev = 2.0 * w(i) * tail[i] + h2 * (vf_[i] - energy) * tail[i] - w(i + 1) * tail[i + 1];
      tail[i - 1] = z_prev / w(i - 1);
      if (std::abs(tail[i - 1]) > kRescaleAbove)
        for (std::size_t j = i - 1; j <= n; ++j) tail[j] *= kRescaleBy;
    }
    const double scale = outward_at_match / tail[match];
    for (std::size_t i = match + 1; i <= n; ++i) y[i] = tail[i] * scale;
    return y;
  }

 private:
  double h_ = 0.0;
  std::vector<double> x_;
  std::vector<double> vf_;
};

double energy_stop_width(double e, const SolverConfig& cfg) {
  const double mag = std::abs(e);
  return std::max(cfg.energy_tolerance * std::clamp(mag, 1e-3, 1.0),
                  8.0 * std::numeric_limits<double>::epsilon() * mag);
}

double solve_on(const Shooter& sh, const SolverConfig& cfg) {
  double lo = sh.vf_min();
  double hi = sh.vf_max();
  if (!(hi > lo)) throw Error(ErrorKind::NoBoundState, "potential is constant on the domain");
  Shot s_hi = sh.shoot(hi);
  if (s_hi.count() == 0)
    throw Error(ErrorKind::NoBoundState, "no discrete level below the potential's limit on the domain");

  // bisection on the level count until the upper end has its node only in
  // the exterior, where the mismatch is continuous across the bracket
  Shot s_lo = sh.shoot(lo);
  for (int it = 0; it < cfg.max_bisections; ++it) {
    if (s_hi.interior_nodes == 0 && s_hi.exterior_node) break;
    if (hi - lo <= energy_stop_width(hi, cfg)) return 0.5 * (lo + hi);
    const double mid = 0.5 * (lo + hi);
    const Shot s_mid = sh.shoot(mid);
    if (s_mid.count() == 0) {
      lo = mid;
      s_lo = s_mid;
    } else {
      hi = mid;
      s_hi = s_mid;
    }
  }
  if (!(s_hi.interior_nodes == 0 && s_hi.exterior_node))
    throw Error(ErrorKind::NonConvergent, "ground-state bracket not isolated");

  RootTolerance tol;
  tol.x_tol = energy_stop_width(hi, cfg);
  tol.f_tol = 0.0;
  tol.max_iterations = cfg.max_bisections;
  const auto root = bracketed_secant([&](double e) { return sh.shoot(e).mismatch; }, lo, hi, s_lo.mismatch,
                                     s_hi.mismatch, tol);
  return root.x;
}

double step_target(const PotentialShape& shape, double v, double L, const SolverConfig& cfg) {
  const double rise = std::max(v * (shape(L) - shape(0.0)), 0.0);
  double h = L / static_cast<double>(cfg.grid_points);
  if (rise > 0.0) h = std::min(h, cfg.max_phase_step / std::sqrt(rise));
  // a long constant tail must not starve the region where f varies
  if (auto flat = shape.constant_beyond(); flat && *flat > 0.0 && *flat < L) h = std::min(h, *flat / 400.0);
  return h;
}

// Past a constant tail the decay is a pure exponential, so the domain may
// run beyond the configured cap there.
double domain_cap(const PotentialShape& shape, const SolverConfig& cfg) {
  if (auto flat = shape.constant_beyond(); flat && *flat > 0.0) return std::max(cfg.max_half_width, 1e6);
  return cfg.max_half_width;
}

// Width w at which the kinetic scale 1/w^2 meets the potential rise.
double natural_width(const PotentialShape& shape, double v, double cap) {
  const double f0 = shape(0.0);
  auto excess = [&](double w) { return v * (shape(w) - f0) * w * w - 1.0; };
  if (excess(cap) <= 0.0) return cap;
  double lo = std::min(1e-9, cap), hi = cap;
  if (excess(lo) > 0.0) return lo;
  for (int i = 0; i < 100; ++i) {
    const double mid = std::sqrt(lo * hi);
    (excess(mid) > 0.0 ? hi : lo) = mid;
    if (hi / lo < 1.0 + 1e-6) break;
  }
  return hi;
}

double decay_action(const PotentialShape& shape, double v, double energy, double from, double to) {
  if (to <= from) return 0.0;
  constexpr int n = 2000;
  const double dx = (to - from) / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double k2 = v * shape(from + dx * i) - energy;
    const double k = k2 > 0.0 ? std::sqrt(k2) : 0.0;
    sum += (i == 0 || i == n) ? 0.5 * k : k;
  }
  return sum * dx;
}

struct Domain {
  double half_width;
  bool decayed;  // WKB decay criterion met at half_width
};

Domain size_domain(const PotentialShape& shape, double v, double energy, double start, const SolverConfig& cfg) {
  const double cap = domain_cap(shape, cfg);
  const double xt = shape.level_crossing(energy / v, cap);
  double L = std::min(std::max(start, xt), cap);
  for (int pass = 0; pass < 2; ++pass) {
    const double k2 = v * shape(L) - energy;
    L = (k2 > 0.0) ? std::min(xt + 12.0 / std::sqrt(k2), cap) : cap;
  }
  const double required = std::log(1.0 / cfg.decay_ratio);
  for (int grow = 0; grow < 60; ++grow) {
    if (decay_action(shape, v, energy, xt, L) >= required) return {L, true};
    if (L >= cap) break;
    L = std::min(1.3 * L, cap);
  }
  return {L, false};
}

// Domain used for the energy: the decay domain, or the point where the
// shape turns constant when that comes first (the exterior condition is
// then exact).
double energy_domain(const PotentialShape& shape, const Domain& d, double v) {
  if (auto flat = shape.constant_beyond(); flat && *flat > 0.0 && *flat < d.half_width) return *flat;
  if (!d.decayed) {
    std::ostringstream os;
    os << "wavefunction has not decayed by L = " << d.half_width << " at v = " << v;
    throw Error(ErrorKind::DomainTooSmall, os.str());
  }
  return d.half_width;
}

void check_inputs(const PotentialShape& shape, double v, const SolverConfig& cfg) {
  if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "coupling must be positive");
  if (cfg.grid_points < 16) throw Error(ErrorKind::InvalidArgument, "grid_points too small");
  if (!std::isfinite(shape(0.0))) throw Error(ErrorKind::InvalidArgument, "shape not finite at 0");
}

struct Sized {
  double energy;
  Domain domain;
};

Sized solve_auto(const PotentialShape& shape, double v, const SolverConfig& cfg) {
  const double cap = cfg.max_half_width;
  const double w = natural_width(shape, v, cap);
  double e = v * shape(w);
  Domain d = size_domain(shape, v, e, 2.0 * w, cfg);
  double L = [&] {
    if (auto flat = shape.constant_beyond(); flat && *flat > 0.0 && *flat < d.half_width) return *flat;
    return d.half_width;
  }();
  e = solve_on(Shooter(shape, v, L, step_target(shape, v, L, cfg)), cfg);

  d = size_domain(shape, v, e, L, cfg);
  const double L2 = energy_domain(shape, d, v);
  if (std::abs(L2 - L) > 1e-3 * L) e = solve_on(Shooter(shape, v, L2, step_target(shape, v, L2, cfg)), cfg);
  return {e, d};
}

}  // namespace

double ground_energy(const PotentialShape& shape, double v, const SolverConfig& cfg) {
  check_inputs(shape, v, cfg);
  if (cfg.fixed_half_width) {
    const double L = *cfg.fixed_half_width;
    return solve_on(Shooter(shape, v, L, step_target(shape, v, L, cfg)), cfg);
  }
  return solve_auto(shape, v, cfg).energy;
}

EigenResult ground_state(const PotentialShape& shape, double v, const SolverConfig& cfg) {
  check_inputs(shape, v, cfg);
  double L;
  if (cfg.fixed_half_width) {
    L = *cfg.fixed_half_width;
  } else {
    const Sized s = solve_auto(shape, v, cfg);
    if (!s.domain.decayed) {
      std::ostringstream os;
      os << "wavefunction has not decayed by L = " << s.domain.half_width << " at v = " << v;
      throw Error(ErrorKind::DomainTooSmall, os.str());
    }
    L = s.domain.half_width;
  }

  // the wavefunction grid spans the full decay domain, so the energy is
  // re-polished on it
  const Shooter sh(shape, v, L, step_target(shape, v, L, cfg));
  const double energy = solve_on(sh, cfg);
  EigenResult res;
  res.energy = energy;
  res.coupling = v;
  res.x = sh.x();
  res.turning_point = shape.level_crossing(energy / v, L);
  const auto match = static_cast<std::size_t>(res.turning_point / sh.h());
  res.psi = sh.wavefunction(energy, match);

  std::vector<double> sq(res.psi.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = res.psi[i] * res.psi[i];
  const double norm = 2.0 * simpson(sq, sh.h());
  const double inv = 1.0 / std::sqrt(norm);
  double peak = 0.0;
  for (double& p : res.psi) {
    p *= inv;
    peak = std::max(peak, std::abs(p));
  }
  int nodes = 0;
  double prev = res.psi.front();
  for (double p : res.psi) {
    if (std::abs(p) < 1e-12 * peak) continue;
    if (std::signbit(p) != std::signbit(prev)) ++nodes;
    prev = p;
  }
  res.node_count = nodes;
  if (!cfg.fixed_half_width && std::abs(res.psi.back()) > cfg.decay_ratio * peak) {
    std::ostringstream os;
    os << "|psi(L)|/max|psi| = " << std::abs(res.psi.back()) / peak << " at v = " << v;
    throw Error(ErrorKind::DomainTooSmall, os.str());
  }
  return res;
}

double mean_potential(const EigenResult& res, const PotentialShape& shape) {
  std::vector<double> w(res.psi.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = res.psi[i] * res.psi[i] * shape(res.x[i]);
  return 2.0 * simpson(w, res.step());
}

double concentration(const EigenResult& res, double a) {
  if (!(a > 0.0)) throw Error(ErrorKind::InvalidArgument, "concentration needs a > 0");
  const double h = res.step();
  const double L = res.half_width();
  if (a >= L) a = L;
  auto j = static_cast<std::size_t>(std::floor(a / h + 1e-12));
  j = std::min(j, res.x.size() - 1);
  std::vector<double> sq(j + 1);
  for (std::size_t i = 0; i <= j; ++i) sq[i] = res.psi[i] * res.psi[i];
  double mass = simpson(sq, h);
  if (j + 1 < res.x.size()) {
    const double t = (a - res.x[j]) / h;
    const double p = res.psi[j] + t * (res.psi[j + 1] - res.psi[j]);
    mass += 0.5 * (a - res.x[j]) * (sq[j] + p * p);
  }
  return 2.0 * mass;
}

double pure_power_energy(double q) {
  static std::mutex mutex;
  static std::map<double, double> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(q); it != cache.end()) return it->second;
  }
  SolverConfig cfg;
  cfg.grid_points = 16000;
  cfg.energy_tolerance = 1e-12;
  const double e = ground_energy(PotentialShape::shifted_power(0.0, 1.0, q), 1.0, cfg);
  std::lock_guard lock(mutex);
  cache.emplace(q, e);
  return e;
}

}  // namespace specinv
