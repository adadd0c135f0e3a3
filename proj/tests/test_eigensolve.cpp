#include <doctest.h>

#include <chrono>
#include <cmath>

#include <boost/math/special_functions/airy.hpp>

#include "specinv/eigensolve.hpp"
#include "specinv/error.hpp"

using namespace specinv;

namespace {

// sech^2 ground level, solved independently of the library: F = -(sqrt(v + 1/4) - 1/2)^2
double sech_level0(double v) {
  const double u = std::sqrt(v + 0.25) - 0.5;
  return -u * u;
}

// -d2/dx2 + |x|: the even ground state sits at the first zero of Ai'
double linear_well_energy() {
  double lo = -1.5, hi = -0.5;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (boost::math::airy_ai_prime(mid) > 0.0 ? lo : hi) = mid;
  }
  return -0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("harmonic oscillator ground state") {
  for (double v : {0.5, 1.0, 30.0}) CHECK(ground_energy(PotentialShape::harmonic(), v) ==
                                          doctest::Approx(std::sqrt(v)).epsilon(1e-8));
  const auto res = ground_state(PotentialShape::harmonic(), 1.0);
  CHECK(res.node_count == 0);
  CHECK(res.turning_point == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(concentration(res, res.half_width()) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("linear well against the Airy oracle") {
  // the kink at x = 0 limits Numerov to second order here
  CHECK(pure_power_energy(1.0) == doctest::Approx(linear_well_energy()).epsilon(1e-7));
  CHECK(pure_power_energy(2.0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("E(3/2) agrees with the published value") {
  CHECK(std::abs(pure_power_energy(1.5) - 1.001184) <= 1e-5);
}

TEST_CASE("sech^2 ground energies") {
  for (double v : {0.05, 1.0, 2.0, 5.0, 10.0, 100.0, 1e4})
    CHECK(std::abs(ground_energy(PotentialShape::sech_squared(), v) - sech_level0(v)) <= 1e-6);
}

TEST_CASE("scaling: f(x/t) at coupling v has energy E(v t^2) / t^2") {
  const double t = 0.7, v = 6.0;
  const auto wide = PotentialShape::sech_squared(0.0, 1.0, t);
  CHECK(ground_energy(wide, v) == doctest::Approx(sech_level0(v * t * t) / (t * t)).epsilon(1e-7));
}

TEST_CASE("affine shift and multiplier") {
  const double a = 3.0, b = 2.0, v = 4.0;
  const double e = ground_energy(PotentialShape::exponential(a, b), v);
  CHECK(e == doctest::Approx(a * v + ground_energy(PotentialShape::exponential(), b * v)).epsilon(1e-8));
}

TEST_CASE("Hellmann-Feynman mean potential equals dE/dv") {
  for (const auto& shape : {PotentialShape::exponential(), PotentialShape::shifted_power(-1.0, 1.0, 1.5)}) {
    const double v = 3.0, dv = 1e-3;
    const double fd = (ground_energy(shape, v + dv) - ground_energy(shape, v - dv)) / (2.0 * dv);
    CHECK(mean_potential(ground_state(shape, v), shape) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("concentration lemma bound for sech^2") {
  const auto f = PotentialShape::sech_squared();
  double prev = 0.0;
  for (double v : {2.0, 5.0, 20.0, 80.0}) {
    const auto res = ground_state(f, v);
    const double q = concentration(res, 1.0);
    const double fprime = mean_potential(res, f);
    CHECK(q > (f(1.0) - fprime) / (f(1.0) - f(0.0)));
    CHECK(q > prev);
    prev = q;
  }
}

TEST_CASE("monotone response: raising the potential raises the energy") {
  const double e1 = ground_energy(PotentialShape::exponential(), 2.0);
  const double e2 = ground_energy(PotentialShape::exponential(0.0, 1.0, 0.9), 2.0);
  CHECK(e2 > e1);
}

TEST_CASE("solve time") {
  const auto t0 = std::chrono::steady_clock::now();
  ground_energy(PotentialShape::shifted_power(0.0, 1.0, 1.5), 1.0);
  ground_energy(PotentialShape::sech_squared(), 100.0);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 2.0);
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(ground_energy(PotentialShape::harmonic(), -1.0), Error);
  try {
    ground_energy(PotentialShape::harmonic(), 0.0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidArgument);
  }
}
