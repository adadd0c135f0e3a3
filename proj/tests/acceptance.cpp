// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria, or 0 with --report-only.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "specinv/constructive.hpp"
#include "specinv/csv.hpp"
#include "specinv/error.hpp"
#include "specinv/functional.hpp"
#include "specinv/kinetic.hpp"

using namespace specinv;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  std::string failures;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      failures += " [failed: " + what + "]";
    }
  }
};

double sech_level0(double v) {
  const double u = std::sqrt(v + 0.25) - 0.5;
  return -u * u;
}

double inv_sinh2(double z) {
  const double s = std::sinh(z);
  return 1.0 / (s * s);
}

template <class F>
double second_difference(F&& f, double x, double h) {
  return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h);
}

void eigensolver(Outcome& o) {
  const auto t0 = Clock::now();
  const double e = ground_energy(PotentialShape::shifted_power(0.0, 1.0, 1.5), 1.0);
  double slowest = seconds_since(t0);
  o.require(std::abs(e - 1.001184) <= 1e-5, "E(3/2) within 1e-5 of 1.001184");
  double worst = 0.0;
  for (double v : {1.0, 2.0, 5.0, 10.0, 100.0}) {
    const auto t = Clock::now();
    worst = std::max(worst, std::abs(ground_energy(PotentialShape::sech_squared(), v) - sech_level0(v)));
    slowest = std::max(slowest, seconds_since(t));
  }
  o.require(worst <= 1e-6, "sech^2 energies within 1e-6");
  o.require(slowest < 1.0, "each solve under 1 s");
  o.detail << "E(3/2)=" << format_number(e) << " sech2 max err=" << worst << " slowest solve=" << slowest << "s";
}

void head_fits(Outcome& o) {
  const ConstructiveConfig cfg;
  const auto p = init(EnergyTrajectory::shifted_power(-1.0, 1.0, 1.5), cfg).model.head;
  const auto s = init(EnergyTrajectory::sech_squared(), cfg).model.head;
  const auto e = init(EnergyTrajectory::numeric(PotentialShape::exponential()), cfg).model.head;
  o.require(std::abs(p.q - 1.5) <= 5e-3 && std::abs(p.A - 1.0) <= 5e-3 && std::abs(p.b - 0.072) <= 2e-3,
            "shifted power q, A, b");
  o.require(std::abs(s.q - 2.0) <= 0.02 && std::abs(s.b - 0.1) <= 5e-3, "sech^2 q, b");
  o.require(std::abs(e.q - 1.0) <= 0.02, "exponential q within 0.02 of 1");
  o.require(std::abs(e.b - 0.048) <= 2e-3, "exponential b");
  char buf[256];
  std::snprintf(buf, sizeof buf, "power q=%.4f A=%.4f b=%.4f; sech2 q=%.4f b=%.4f; exponential q=%.4f b=%.4f",
                p.q, p.A, p.b, s.q, s.b, e.q, e.b);
  o.detail << buf;
}

void constructive(Outcome& o) {
  const std::vector<std::pair<const char*, EnergyTrajectory>> cases{
      {"power", EnergyTrajectory::shifted_power(-1.0, 1.0, 1.5)},
      {"exponential", EnergyTrajectory::numeric(PotentialShape::exponential())},
      {"sech2", EnergyTrajectory::sech_squared()}};
  for (const auto& [name, traj] : cases) {
    const auto t0 = Clock::now();
    const auto rep = run_constructive(traj);
    const double secs = seconds_since(t0);
    const double err = rep.max_error().value_or(INFINITY);
    o.require(rep.ok() && rep.steps.size() == 41, std::string(name) + " ran 40 steps");
    o.require(err <= 0.02, std::string(name) + " max error <= 0.02");
    o.require(secs <= 60.0, std::string(name) + " under 60 s");
    o.detail << name << " err=" << err << " (" << secs << "s) ";
  }
}

void two_step_power(Outcome& o) {
  const auto traj = EnergyTrajectory::shifted_power(-1.0, 1.0, 1.5);
  FunctionalConfig cfg;
  cfg.max_iterations = 3;
  cfg.stop_tolerance = 0.0;
  const auto res = run_functional(traj, PotentialShape::shifted_power(-1.0, 1.0, 2.0), cfg);
  const auto exact = *traj.exact_shape();
  const auto& f2 = res.iterates.at(2);
  const auto& f3 = res.iterates.at(3);
  double err2 = 0.0;
  for (std::size_t i = 0; i < f2.x.size(); ++i)
    if (f2.x[i] >= 0.02 && f2.x[i] <= 2.0) err2 = std::max(err2, std::abs(f2.f[i] - exact(f2.x[i])));
  const double step3 = sup_distance(f3.x, f3.f, f2.f);
  o.require(err2 <= 5e-3, "f2 error on [0.02, 2] <= 5e-3");
  o.require(step3 <= 1e-3, "|f3 - f2| <= 1e-3");
  o.detail << "f2 err=" << err2 << " |f3-f2|=" << step3;
}

void functional_sech(Outcome& o) {
  FunctionalConfig cfg;
  cfg.max_iterations = 5;
  cfg.stop_tolerance = 0.0;
  const auto res = run_functional(EnergyTrajectory::sech_squared(), PotentialShape::harmonic(-1.0, 1.0 / 20.0), cfg);
  const auto& f1 = res.iterates.at(1);
  double closed = 0.0;
  for (std::size_t i = 0; i < f1.x.size(); ++i) {
    const double x = f1.x[i];
    if (x >= 0.02 && x <= 4.0) closed = std::max(closed, std::abs(f1.f[i] + 2.0 / (1.0 + std::sqrt(1.0 + 4.0 * x * x))));
  }
  o.require(closed <= 2e-3, "f1 matches the closed form within 2e-3");
  bool decreasing = res.iterates.size() == 6;
  o.detail << "f1 err=" << closed << " dist:";
  for (std::size_t n = 0; n < res.iterates.size(); ++n) {
    o.detail << " " << *res.iterates[n].dist_target;
    if (n > 0 && !(*res.iterates[n].dist_target < *res.iterates[n - 1].dist_target)) decreasing = false;
  }
  o.require(decreasing, "distance strictly decreasing over 5 iterations");
  o.require(*res.iterates.back().dist_target <= 0.05, "final error <= 0.05");
}

void transforms(Outcome& o) {
  double roundtrip = 0.0;
  for (const auto& t : {EnergyTrajectory::harmonic(), EnergyTrajectory::sech_squared()}) {
    const auto kin = trajectory_to_kinetic(t);
    for (double v : log_spaced(0.5, 100.0, 10))
      roundtrip = std::max(roundtrip, std::abs(kinetic_to_trajectory(kin, v) / t.F(v) - 1.0));
  }
  o.require(roundtrip <= 1e-6, "Legendre round trip within 1e-6");

  const auto s = EnergyTrajectory::sech_squared();
  const auto kin = trajectory_to_kinetic(s);
  double product = 0.0;
  for (double v : {2.0, 8.0, 32.0}) {
    const double Fpp = second_difference([&](double w) { return s.F(w); }, v, 1e-2 * v);
    const double sv = s.kinetic(v);
    const double fpp = second_difference([&](double z) { return kin.fbar(z); }, sv, 1e-2 * sv);
    product = std::max(product, std::abs(Fpp * fpp * v * v * v + 1.0));
  }
  o.require(product <= 1e-3, "F'' fbar'' = -1/v^3 within 1e-3");

  double kpow = 0.0;
  for (double q : {1.0, 1.5, 2.0}) {
    const auto t = EnergyTrajectory::numeric(PotentialShape::shifted_power(0.0, 1.0, q));
    const double P = p_number(q, pure_power_energy(q));
    for (double x : linspace(0.2, 3.0, 8)) {
      const double K = k_via_max(t, std::pow(x, q)).K;
      kpow = std::max(kpow, std::abs(K / ((P / x) * (P / x)) - 1.0));
    }
  }
  o.require(kpow <= 1e-4, "k_via_max = (P/x)^2 within 1e-4");

  double ksech = 0.0;
  for (double x : linspace(0.2, 3.0, 15)) {
    const double K = k_via_max(s, -1.0 / std::pow(std::cosh(x), 2)).K;
    ksech = std::max(ksech, std::abs(K / inv_sinh2(2.0 * x) - 1.0));
  }
  o.require(ksech <= 1e-4, "k_via_max = sinh^-2(2x) within 1e-4");
  o.detail << "roundtrip=" << roundtrip << " product=" << product << " K power=" << kpow << " K sech2=" << ksech;
}

void structure(Outcome& o) {
  const std::vector<std::pair<const char*, EnergyTrajectory>> cases{
      {"sech2", EnergyTrajectory::sech_squared()},
      {"power", EnergyTrajectory::shifted_power(-1.0, 1.0, 1.5)},
      {"harmonic", EnergyTrajectory::harmonic()},
      {"exponential", EnergyTrajectory::numeric(PotentialShape::exponential())},
      {"seed", EnergyTrajectory::numeric(PotentialShape::harmonic(-1.0, 1.0 / 20.0))}};
  const auto grid = log_spaced(0.05, 1e4, 8);
  for (const auto& [name, t] : cases) {
    const auto r = check_structure(t, grid);
    o.require(r.ok(), std::string(name) + " concave, R decreasing, s >= 0");
    o.detail << name << (r.ok() ? " ok " : " violated ");
  }
}

void bessel(Outcome& o) {
  const auto t = EnergyTrajectory::numeric(PotentialShape::exponential());
  double worst = 0.0;
  for (double v : {2.0, 5.0, 10.0}) {
    const double nu = 2.0 * std::sqrt(std::abs(t.F(v)));
    worst = std::max(worst, std::abs(bessel_j_real_order_prime(nu, 2.0 * std::sqrt(v))));
  }
  o.require(worst <= 1e-4, "|J'| <= 1e-4");
  o.detail << "max |J'|=" << worst;
}

void concentration_lemma(Outcome& o) {
  const auto f = PotentialShape::sech_squared();
  double prev = 0.0;
  for (double v : {5.0, 20.0, 80.0}) {
    const auto res = ground_state(f, v);
    const double q = concentration(res, 1.0);
    const double bound = (f(1.0) - mean_potential(res, f)) / (f(1.0) - f(0.0));
    o.require(q > bound, "q(v) above the lower bound");
    o.require(q > prev, "q(v) increasing");
    o.detail << "v=" << v << " q=" << q << " bound=" << bound << " ";
    prev = q;
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::setvbuf(stdout, nullptr, _IOLBF, 0);
  const bool report_only = argc > 1 && std::strcmp(argv[1], "--report-only") == 0;
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
      {"eigensolver accuracy", eigensolver},
      {"head fits at v1 = 1e4", head_fits},
      {"constructive inversion of three benchmarks", constructive},
      {"two-step pure-power functional inversion", two_step_power},
      {"functional sech^2 reconstruction", functional_sech},
      {"transform identities", transforms},
      {"structural invariants", structure},
      {"Bessel validation of the exponential trajectory", bessel},
      {"concentration lemma", concentration_lemma}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("threw ") + e.what());
    }
    if (!o.pass) ++failed;
    std::printf("%s %zu %s: %s%s (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.str().c_str(), o.failures.c_str(), seconds_since(t0));
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return report_only ? 0 : failed;
}
