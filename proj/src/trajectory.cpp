#include "specinv/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <sstream>
#include <unordered_map>

#include "specinv/csv.hpp"
#include "specinv/error.hpp"

namespace specinv {

struct TrajectoryMemo {
  std::shared_mutex mutex;
  std::unordered_map<double, double> F;
  std::unordered_map<double, double> Fprime;
};

namespace {

template <class Compute>
double memoized(std::shared_mutex& mutex, std::unordered_map<double, double>& table, double key, Compute compute) {
  {
    std::shared_lock lock(mutex);
    if (auto it = table.find(key); it != table.end()) return it->second;
  }
  const double value = compute();
  std::unique_lock lock(mutex);
  table[key] = value;
  return value;
}

std::size_t bracket_index(const std::vector<double>& xs, double x) {
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t k = static_cast<std::size_t>(it - xs.begin());
  if (k == 0) return 0;
  return std::min(k - 1, xs.size() - 2);
}

double hermite(const std::vector<double>& xs, const std::vector<double>& ys, const std::vector<double>& ds,
               double x) {
  const std::size_t k = bracket_index(xs, x);
  const double h = xs[k + 1] - xs[k];
  const double t = (x - xs[k]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * ys[k] + (t3 - 2 * t2 + t) * h * ds[k] + (-2 * t3 + 3 * t2) * ys[k + 1] +
         (t3 - t2) * h * ds[k + 1];
}

double tabulated_Fprime(const TabulatedSource& t, double v) {
  // F' decreases with v; the monotone cubic keeps it so between samples
  std::vector<double> neg(t.Fprime.size());
  for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = -t.Fprime[i];
  // small tables only come from data files, so rebuilding here is fine
  return -MonotoneCubic(t.v, neg)(v);
}

}  // namespace

EnergyTrajectory EnergyTrajectory::sech_squared(int level) {
  if (level < 0) throw Error(ErrorKind::InvalidArgument, "level must be nonnegative");
  return EnergyTrajectory(SechSquaredSource{level});
}

EnergyTrajectory EnergyTrajectory::shifted_power(double f0, double A, double q, double E_q) {
  if (!(A > 0.0 && q > 0.0 && E_q > 0.0))
    throw Error(ErrorKind::InvalidArgument, "shifted power trajectory needs A, q, E_q > 0");
  return EnergyTrajectory(ShiftedPowerSource{f0, A, q, E_q});
}

EnergyTrajectory EnergyTrajectory::shifted_power(double f0, double A, double q) {
  return shifted_power(f0, A, q, pure_power_energy(q));
}

EnergyTrajectory EnergyTrajectory::harmonic() { return EnergyTrajectory(HarmonicSource{}); }

EnergyTrajectory EnergyTrajectory::numeric(PotentialShape shape, SolverConfig cfg) {
  return EnergyTrajectory(NumericSource{std::move(shape), cfg, std::make_shared<TrajectoryMemo>()});
}

EnergyTrajectory EnergyTrajectory::tabulated(std::vector<double> v, std::vector<double> F,
                                             std::vector<double> Fprime) {
  if (v.size() < 3 || F.size() != v.size() || Fprime.size() != v.size())
    throw Error(ErrorKind::InvalidData, "tabulated trajectory needs at least three (v, F, F') rows");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0) || !std::isfinite(F[i]) || !std::isfinite(Fprime[i]))
      throw Error(ErrorKind::InvalidData, "tabulated trajectory has invalid entries");
    if (i > 0 && !(v[i] > v[i - 1])) throw Error(ErrorKind::InvalidData, "v must be strictly increasing");
  }
  return EnergyTrajectory(TabulatedSource{std::move(v), std::move(F), std::move(Fprime)});
}

double EnergyTrajectory::v_min() const {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SechSquaredSource>) return double(s.level) * double(s.level + 1);
        else if constexpr (std::is_same_v<T, TabulatedSource>) return s.v.front();
        else return 0.0;
      },
      source_);
}

double EnergyTrajectory::v_max() const {
  if (const auto* t = std::get_if<TabulatedSource>(&source_)) return t->v.back();
  return std::numeric_limits<double>::infinity();
}

void EnergyTrajectory::check_domain(double v) const {
  // tabulated data and the sech^2 levels are defined at the threshold itself
  const bool closed = std::holds_alternative<TabulatedSource>(source_) ||
                      std::holds_alternative<SechSquaredSource>(source_);
  const double lo = v_min();
  const bool below = closed ? v < lo : !(v > lo);
  if (below || !std::isfinite(v)) {
    std::ostringstream os;
    os << "v = " << v << " is not above the critical coupling " << lo;
    throw Error(ErrorKind::BelowCritical, os.str());
  }
  if (v > v_max()) {
    std::ostringstream os;
    os << "v = " << v << " is beyond the tabulated range " << v_max();
    throw Error(ErrorKind::OutOfRange, os.str());
  }
}

double EnergyTrajectory::F(double v) const {
  check_domain(v);
  return std::visit(
      [v](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SechSquaredSource>) {
          const double d = std::sqrt(v + 0.25) - (s.level + 0.5);
          return -d * d;
        } else if constexpr (std::is_same_v<T, ShiftedPowerSource>) {
          return s.f0 * v + s.E_q * std::pow(s.A * v, 2.0 / (2.0 + s.q));
        } else if constexpr (std::is_same_v<T, HarmonicSource>) {
          return std::sqrt(v);
        } else if constexpr (std::is_same_v<T, NumericSource>) {
          return memoized(s.memo->mutex, s.memo->F, v, [&] { return ground_energy(s.shape, v, s.cfg); });
        } else {
          return hermite(s.v, s.F, s.Fprime, v);
        }
      },
      source_);
}

double EnergyTrajectory::Fprime(double v) const {
  check_domain(v);
  return std::visit(
      [v](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SechSquaredSource>) {
          const double u = std::sqrt(v + 0.25);
          return -(u - (s.level + 0.5)) / u;
        } else if constexpr (std::is_same_v<T, ShiftedPowerSource>) {
          const double eta = 2.0 / (2.0 + s.q);
          return s.f0 + eta * s.E_q * std::pow(s.A, eta) * std::pow(v, eta - 1.0);
        } else if constexpr (std::is_same_v<T, HarmonicSource>) {
          return 0.5 / std::sqrt(v);
        } else if constexpr (std::is_same_v<T, NumericSource>) {
          return memoized(s.memo->mutex, s.memo->Fprime, v, [&] {
            const EigenResult res = ground_state(s.shape, v, s.cfg);
            return mean_potential(res, s.shape);
          });
        } else {
          return tabulated_Fprime(s, v);
        }
      },
      source_);
}

std::optional<bool> EnergyTrajectory::bounded_hint() const {
  return std::visit(
      [](const auto& s) -> std::optional<bool> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SechSquaredSource>) return true;
        else if constexpr (std::is_same_v<T, ShiftedPowerSource> || std::is_same_v<T, HarmonicSource>) return false;
        else if constexpr (std::is_same_v<T, NumericSource>) return s.shape.bounded();
        else return std::nullopt;
      },
      source_);
}

std::optional<PotentialShape> EnergyTrajectory::exact_shape() const {
  return std::visit(
      [](const auto& s) -> std::optional<PotentialShape> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SechSquaredSource>) return PotentialShape::sech_squared();
        else if constexpr (std::is_same_v<T, ShiftedPowerSource>)
          return PotentialShape::shifted_power(s.f0, s.A, s.q);
        else if constexpr (std::is_same_v<T, HarmonicSource>) return PotentialShape::harmonic();
        else if constexpr (std::is_same_v<T, NumericSource>) return s.shape;
        else return std::nullopt;
      },
      source_);
}

std::string EnergyTrajectory::describe() const {
  std::ostringstream os;
  os.precision(10);
  std::visit(
      [&os](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SechSquaredSource>) os << "sech_squared(level=" << s.level << ")";
        else if constexpr (std::is_same_v<T, ShiftedPowerSource>)
          os << "shifted_power(f0=" << s.f0 << ", A=" << s.A << ", q=" << s.q << ", E_q=" << s.E_q << ")";
        else if constexpr (std::is_same_v<T, HarmonicSource>) os << "harmonic";
        else if constexpr (std::is_same_v<T, NumericSource>) os << "numeric(" << s.shape.describe() << ")";
        else os << "tabulated(rows=" << s.v.size() << ")";
      },
      source_);
  return os.str();
}

double eval_F(const EnergyTrajectory& traj, double v) { return traj.F(v); }
double eval_Fprime(const EnergyTrajectory& traj, double v) { return traj.Fprime(v); }

double invert_R(const EnergyTrajectory& traj, double target, const InvertOptions& opt) {
  const double floor_v = std::max(traj.v_min(), 1e-12);
  const bool tab = std::holds_alternative<TabulatedSource>(traj.source());
  const double ceil_v = std::min(opt.v_max_search, traj.v_max());
  auto R = [&](double v) { return traj.R(v); };

  double lo = std::clamp(opt.v_start, floor_v * (tab ? 1.0 : 1.0 + 1e-9), ceil_v);
  double hi = lo;
  double r_lo = R(lo), r_hi = r_lo;
  // R decreases with v: R(lo) must sit above the target, R(hi) below
  while (r_hi > target) {
    if (hi >= ceil_v) throw Error(ErrorKind::OutOfRange, "R never falls to the target within the search range");
    lo = hi;
    r_lo = r_hi;
    hi = std::min(hi * 4.0, ceil_v);
    r_hi = R(hi);
  }
  while (r_lo < target) {
    const double next = std::max(lo / 4.0, floor_v);
    if (next <= floor_v && (tab ? next == lo : true)) {
      const double probe = tab ? floor_v : floor_v * (1.0 + 1e-9) + 1e-12;
      if (probe >= lo || R(probe) < target)
        throw Error(ErrorKind::OutOfRange, "R never rises to the target above the critical coupling");
      hi = lo;
      r_hi = r_lo;
      lo = probe;
      r_lo = R(lo);
      break;
    }
    hi = lo;
    r_hi = r_lo;
    lo = next;
    r_lo = R(lo);
  }
  if (r_lo == target) return lo;
  if (r_hi == target) return hi;

  RootTolerance tol;
  tol.f_tol = opt.rel_tol * std::max(std::abs(target), 1e-12);
  tol.x_tol = 1e-14;
  tol.max_iterations = 300;
  const auto root = bracketed_secant([&](double t) { return R(std::exp(t)) - target; }, std::log(lo), std::log(hi),
                                     r_lo - target, r_hi - target, tol);
  return std::exp(root.x);
}

namespace {

// One sweep of Aitken's delta-squared over a sequence with geometric error.
std::vector<double> aitken(const std::vector<double>& seq) {
  std::vector<double> out;
  for (std::size_t j = 0; j + 2 < seq.size(); ++j) {
    const double d1 = seq[j + 1] - seq[j];
    const double d2 = seq[j + 2] - seq[j + 1];
    const double scale = 1.0 + std::abs(seq[j + 2]);
    double est = seq[j + 2];
    if (std::abs(d1) > 1e-11 * scale) {
      const double rho = d2 / d1;
      if (rho > 0.0 && rho < 0.95) est = seq[j + 2] + d2 * rho / (1.0 - rho);
    }
    out.push_back(est);
  }
  return out;
}

}  // namespace

double estimate_f0(const EnergyTrajectory& traj, const F0Options& opt) {
  if (opt.doublings < 4) throw Error(ErrorKind::InvalidArgument, "estimate_f0 needs at least 4 doublings");
  std::vector<double> r;
  for (int j = 0; j <= opt.doublings; ++j) r.push_back(traj.R(opt.v_start * std::ldexp(1.0, j)));
  const auto first = aitken(r);
  const double last = first.back(), before = first[first.size() - 2];
  if (std::abs(last - before) > opt.agreement) {
    std::ostringstream os;
    os << "successive f(0) estimates " << before << " and " << last << " disagree";
    throw Error(ErrorKind::NonConvergent, os.str());
  }
  const auto second = aitken(first);
  return second.back();
}

std::vector<double> default_flat_probes() { return log_spaced(1e2, 1e4, 2); }

std::optional<double> detect_flat(const EnergyTrajectory& traj, const std::vector<double>& probes) {
  if (probes.empty()) throw Error(ErrorKind::InvalidArgument, "detect_flat needs probe couplings");
  const double top = *std::max_element(probes.begin(), probes.end());
  const double s_top = traj.kinetic(top);
  const double s_half = traj.kinetic(0.5 * top);
  if (!(std::abs(s_top - s_half) <= 0.05 * std::abs(s_top))) return std::nullopt;
  double sup = std::max(s_top, s_half);
  for (double v : probes) sup = std::max(sup, traj.kinetic(v));
  if (!(sup > 0.0)) return std::nullopt;
  return std::numbers::pi / 2.0 / std::sqrt(sup);
}

HeadModel fit_head(const EnergyTrajectory& traj, double v1, std::optional<double> f0_opt) {
  if (!(v1 > 0.0)) throw Error(ErrorKind::InvalidArgument, "fit_head needs v1 > 0");
  const double f0 = f0_opt ? *f0_opt : estimate_f0(traj);
  const double d1 = traj.F(v1) - v1 * f0;
  const double d2 = traj.F(2.0 * v1) - 2.0 * v1 * f0;
  if (!(d1 > 0.0) || !(d2 > d1) || !(d2 < 2.0 * d1)) {
    std::ostringstream os;
    os << "F(v1) - v1 f0 = " << d1 << ", F(2 v1) - 2 v1 f0 = " << d2 << " admit no shifted power";
    throw Error(ErrorKind::DegenerateFit, os.str());
  }
  const double eta = std::log2(d2 / d1);
  const double q = 2.0 / eta - 2.0;
  const double e_q = pure_power_energy(q);
  const double A = std::pow(d1 / e_q, 1.0 / eta) / v1;
  const double b = std::pow(d1 / (A * v1), 1.0 / q);
  return HeadModel::power(f0, A, q, b);
}

bool infer_bounded(const EnergyTrajectory& traj, double f0) {
  if (!(f0 < 0.0)) return false;
  const double v = std::max(traj.v_min() * 1.01, 1e-2);
  return traj.F(std::min(v, traj.v_max())) < 0.0;
}

StructureReport check_structure(const EnergyTrajectory& traj, const std::vector<double>& v_grid, double tol) {
  StructureReport rep;
  std::vector<double> F(v_grid.size());
  for (std::size_t i = 0; i < v_grid.size(); ++i) F[i] = traj.F(v_grid[i]);
  for (std::size_t i = 1; i + 1 < v_grid.size(); ++i) {
    const double left = (F[i] - F[i - 1]) / (v_grid[i] - v_grid[i - 1]);
    const double right = (F[i + 1] - F[i]) / (v_grid[i + 1] - v_grid[i]);
    const double second = right - left;
    rep.worst_second_difference = std::max(rep.worst_second_difference, second);
    if (second > tol * std::max(1.0, std::abs(left))) ++rep.concavity_violations;
  }
  for (std::size_t i = 1; i < v_grid.size(); ++i)
    if (!(F[i] / v_grid[i] < F[i - 1] / v_grid[i - 1])) ++rep.r_violations;
  rep.min_kinetic = std::numeric_limits<double>::infinity();
  for (double v : v_grid) {
    const double s = traj.kinetic(v);
    rep.min_kinetic = std::min(rep.min_kinetic, s);
    if (s < -tol * std::max(1.0, std::abs(traj.F(v)))) ++rep.kinetic_violations;
  }
  return rep;
}

void write_trajectory_csv(const EnergyTrajectory& traj, const std::vector<double>& v_grid,
                          const std::filesystem::path& path) {
  std::vector<std::vector<double>> rows;
  rows.reserve(v_grid.size());
  for (double v : v_grid) rows.push_back({v, traj.F(v), traj.Fprime(v)});
  write_csv(path, {"v", "F", "Fprime"}, rows);
}

EnergyTrajectory read_trajectory_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  const int cv = table.column("v"), cF = table.column("F"), cP = table.column("Fprime");
  if (cv < 0 || cF < 0) throw Error(ErrorKind::InvalidData, path.string() + ": header must contain v,F");
  std::vector<double> v, F, P;
  for (const auto& row : table.rows) {
    v.push_back(row[cv]);
    F.push_back(row[cF]);
    if (cP >= 0) P.push_back(row[cP]);
  }
  const std::size_t n = v.size();
  if (n < 3) throw Error(ErrorKind::InvalidData, path.string() + ": need at least three rows");
  for (std::size_t i = 1; i < n; ++i)
    if (!(v[i] > v[i - 1])) throw Error(ErrorKind::InvalidData, path.string() + ": v not strictly increasing");
  if (cP < 0) {
    // three-point nonuniform differences, one-sided at the ends
    P.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t a = (i == 0) ? 0 : (i == n - 1 ? n - 3 : i - 1);
      const double x0 = v[a], x1 = v[a + 1], x2 = v[a + 2];
      const double x = v[i];
      P[i] = F[a] * (2 * x - x1 - x2) / ((x0 - x1) * (x0 - x2)) + F[a + 1] * (2 * x - x0 - x2) / ((x1 - x0) * (x1 - x2)) +
             F[a + 2] * (2 * x - x0 - x1) / ((x2 - x0) * (x2 - x1));
    }
  }
  auto traj = EnergyTrajectory::tabulated(v, F, P);
  const StructureReport rep = check_structure(traj, v, 1e-6);
  if (rep.concavity_violations > 0)
    throw Error(ErrorKind::InvalidData, path.string() + ": F is not concave on the tabulated grid");
  if (rep.r_violations > 0)
    throw Error(ErrorKind::InvalidData, path.string() + ": F/v is not strictly decreasing");
  return traj;
}

double bessel_j_real_order(double nu, double x) {
  if (!(nu >= 0.0)) throw Error(ErrorKind::InvalidArgument, "bessel order must be nonnegative");
  if (!(x > 0.0)) throw Error(ErrorKind::InvalidArgument, "bessel argument must be positive");
  if (x > 25.0) throw Error(ErrorKind::OutOfValidatedRange, "ascending series validated only for x <= 25");
  const long double half = static_cast<long double>(x) / 2.0L;
  const long double half2 = half * half;
  const long double n = nu;
  long double term = std::exp(n * std::log(half) - std::lgamma(n + 1.0L));
  long double sum = 0.0L, comp = 0.0L;
  for (int k = 0; k < 120; ++k) {
    const long double y = term - comp;
    const long double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    term *= -half2 / ((k + 1.0L) * (k + 1.0L + n));
  }
  return static_cast<double>(sum);
}

double bessel_j_real_order_prime(double nu, double x) {
  if (nu >= 1.0) return 0.5 * (bessel_j_real_order(nu - 1.0, x) - bessel_j_real_order(nu + 1.0, x));
  if (!(nu >= 0.0)) throw Error(ErrorKind::InvalidArgument, "bessel order must be nonnegative");
  if (!(x > 0.0)) throw Error(ErrorKind::InvalidArgument, "bessel argument must be positive");
  if (x > 25.0) throw Error(ErrorKind::OutOfValidatedRange, "ascending series validated only for x <= 25");
  // term-by-term derivative: sum_k t_k (2k + nu) / x
  const long double half = static_cast<long double>(x) / 2.0L;
  const long double half2 = half * half;
  const long double n = nu;
  long double term = std::exp(n * std::log(half) - std::lgamma(n + 1.0L));
  long double sum = 0.0L, comp = 0.0L;
  for (int k = 0; k < 120; ++k) {
    const long double y = term * (2.0L * k + n) / static_cast<long double>(x) - comp;
    const long double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    term *= -half2 / ((k + 1.0L) * (k + 1.0L + n));
  }
  return static_cast<double>(sum);
}

}  // namespace specinv
