#include "specinv/functional.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "specinv/csv.hpp"
#include "specinv/error.hpp"
#include "specinv/parallel.hpp"

namespace specinv {

namespace {

// warm starts run within fixed blocks so results do not depend on the thread count
constexpr std::size_t kBlock = 8;

}  // namespace

std::vector<double> default_functional_grid() { return linspace(0.02, 4.0, 80); }

FunctionalTarget prepare_target(const EnergyTrajectory& target, const FunctionalConfig& cfg) {
  FunctionalTarget t{trajectory_to_kinetic(target, cfg.kinetic_grid), estimate_f0(target), false};
  t.bounded = cfg.bounded ? *cfg.bounded : infer_bounded(target, t.f0);
  return t;
}

PotentialShape iterate_shape(const std::vector<double>& x, const std::vector<double>& f, bool bounded) {
  const std::size_t n = x.size();
  const double slope = std::max(0.0, (f[n - 1] - f[n - 2]) / (x[n - 1] - x[n - 2]));
  const double d1 = f[n - 2] - f.front(), d2 = f[n - 1] - f.front();
  if (bounded || n < 3 || !(d1 > 0.0) || !(d2 > d1)) return PotentialShape::tabulated(x, f, slope, bounded);
  // continue f(0) + c x^p through the last two knots
  const double p = std::clamp(std::log(d2 / d1) / std::log(x[n - 1] / x[n - 2]), 0.25, 8.0);
  return PotentialShape::tabulated(x, f, p * d2 / x[n - 1], false, p);
}

IterateRecord functional_step(const PotentialShape& current, const FunctionalTarget& target,
                              const FunctionalConfig& cfg) {
  const auto& grid = cfg.x_grid;
  if (grid.empty() || !(grid.front() > 0.0))
    throw Error(ErrorKind::InvalidArgument, "functional grid must be nonempty and start above 0");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw Error(ErrorKind::InvalidArgument, "functional grid must be increasing");

  const EnergyTrajectory traj = EnergyTrajectory::numeric(current, cfg.solver);
  const double top = current.limit_at_infinity();
  std::vector<double> values(grid.size());
  const std::size_t blocks = (grid.size() + kBlock - 1) / kBlock;
  parallel_for(blocks, [&](std::size_t blk) {
    KMaxOptions opt;
    opt.v_lo = cfg.v_lo;
    opt.v_hi = cfg.v_hi;
    opt.rel_tol = cfg.k_tolerance;
    const std::size_t end = std::min(grid.size(), (blk + 1) * kBlock);
    for (std::size_t i = blk * kBlock; i < end; ++i) {
      const double fx = current(grid[i]);
      if (fx >= top) {
        // on the plateau K vanishes, and fbar(0+) is the bounded target's zero
        if (!target.bounded) throw Error(ErrorKind::KineticRangeExceeded, "iterate reached its plateau");
        values[i] = 0.0;
        continue;
      }
      const KMaxResult k = k_via_max(traj, fx, opt);
      values[i] = target.kinetic.fbar(k.K);
      // the maximizer moves to weaker coupling as x grows
      opt.v_lo = k.v_star / 100.0;
      opt.v_hi = k.v_star * 1.0001;
    }
  });

  std::vector<double> xs{0.0}, fs{target.f0};
  xs.insert(xs.end(), grid.begin(), grid.end());
  for (double v : values) fs.push_back(target.bounded ? std::min(v, 0.0) : v);
  for (std::size_t i = 1; i < fs.size(); ++i) {
    if (fs[i] < fs[i - 1]) {
      std::ostringstream os;
      os << "iterate decreases at x = " << xs[i] << " (" << fs[i - 1] << " -> " << fs[i] << ")";
      throw Error(ErrorKind::NonMonotone, os.str());
    }
  }
  PotentialShape shape = iterate_shape(xs, fs, target.bounded);
  return {0, std::move(xs), std::move(fs), std::move(shape), std::nullopt, std::nullopt};
}

double sup_distance(const std::vector<double>& x, const std::vector<double>& a, const std::vector<double>& b,
                    double x_from) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] >= x_from) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

FunctionalResult run_functional(const EnergyTrajectory& target, const PotentialShape& seed,
                                const FunctionalConfig& cfg) {
  if (cfg.max_iterations < 0) throw Error(ErrorKind::InvalidArgument, "max_iterations must be nonnegative");
  const FunctionalTarget tgt = prepare_target(target, cfg);
  const auto exact = target.exact_shape();
  const double x_from = cfg.x_grid.front();

  auto sample = [](const PotentialShape& f, const std::vector<double>& xs) {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = f(xs[i]);
    return out;
  };

  FunctionalResult res;
  IterateRecord first{0, {}, {}, seed, std::nullopt, std::nullopt};
  first.x.push_back(0.0);
  first.x.insert(first.x.end(), cfg.x_grid.begin(), cfg.x_grid.end());
  first.f = sample(seed, first.x);
  std::vector<double> exact_values;
  if (exact) {
    exact_values = sample(*exact, first.x);
    first.dist_target = sup_distance(first.x, first.f, exact_values, x_from);
  }
  res.iterates.push_back(std::move(first));

  for (int n = 1; n <= cfg.max_iterations; ++n) {
    IterateRecord rec = functional_step(res.iterates.back().shape, tgt, cfg);
    rec.n = n;
    rec.dist_prev = sup_distance(rec.x, rec.f, res.iterates.back().f, x_from);
    if (exact) rec.dist_target = sup_distance(rec.x, rec.f, exact_values, x_from);
    const bool done = *rec.dist_prev <= cfg.stop_tolerance;
    res.iterates.push_back(std::move(rec));
    if (done) {
      res.converged = true;
      break;
    }
  }
  return res;
}

EnergyTrajectory seed_trajectory_check(const PotentialShape& seed, const SolverConfig& cfg) {
  return EnergyTrajectory::numeric(seed, cfg);
}

void write_functional_csv(const FunctionalResult& res, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::vector<double>> summary;
  const double nan = std::nan("");
  for (const auto& it : res.iterates) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < it.x.size(); ++i) rows.push_back({it.x[i], it.f[i]});
    write_csv(dir / ("iterate_" + std::to_string(it.n) + ".csv"), {"x", "f_" + std::to_string(it.n)}, rows);
    summary.push_back({static_cast<double>(it.n), it.dist_prev.value_or(nan), it.dist_target.value_or(nan)});
  }
  write_csv(dir / "summary.csv", {"n", "dist_prev", "dist_target"}, summary);
}

}  // namespace specinv
