#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "specinv/csv.hpp"
#include "specinv/error.hpp"
#include "specinv/numeric.hpp"
#include "specinv/parallel.hpp"
#include "specinv/shape.hpp"

using namespace specinv;
namespace fs = std::filesystem;

TEST_CASE("golden section finds the peak of a parabola") {
  auto r = golden_section_maximize([](double x) { return -(x - 0.3) * (x - 0.3) + 2.0; }, -1.0, 2.0, 1e-10);
  CHECK(r.x == doctest::Approx(0.3).epsilon(1e-8));
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-14));
  auto m = golden_section_minimize([](double x) { return std::cosh(x - 1.0); }, -3.0, 4.0, 1e-10);
  CHECK(m.x == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("bracketed secant converges on a steep root") {
  auto f = [](double x) { return std::exp(5.0 * x) - 3.0; };
  RootTolerance tol;
  tol.x_tol = 1e-14;
  auto r = bracketed_secant(f, -2.0, 2.0, f(-2.0), f(2.0), tol);
  CHECK(r.converged);
  CHECK(r.x == doctest::Approx(std::log(3.0) / 5.0).epsilon(1e-12));
  CHECK(r.iterations < 60);
}

TEST_CASE("simpson is exact for cubics, including odd interval counts") {
  for (std::size_t n : {11u, 12u}) {
    const double h = 2.0 / static_cast<double>(n - 1);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = -1.0 + h * static_cast<double>(i);
      y[i] = x * x * x + 2.0 * x * x + 1.0;
    }
    CHECK(simpson(y, h) == doctest::Approx(2.0 + 4.0 / 3.0).epsilon(1e-13));
  }
}

TEST_CASE("grids") {
  const auto g = log_spaced(1e-2, 1e2, 5);
  CHECK(g.size() == 21);
  CHECK(g.front() == 1e-2);
  CHECK(g.back() == 1e2);
  const auto l = linspace(0.0, 1.0, 5);
  CHECK(l[2] == 0.5);
}

TEST_CASE("monotone cubic keeps monotone data monotone and is exact for lines") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x{0.0}, y{0.0};
  for (int i = 1; i < 30; ++i) {
    x.push_back(x.back() + 0.05 + u(rng));
    y.push_back(y.back() + (u(rng) < 0.3 ? 0.0 : u(rng)));
  }
  MonotoneCubic m(x, y);
  double prev = m(x.front());
  for (double t : linspace(x.front(), x.back(), 2000)) {
    const double v = m(t);
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
  MonotoneCubic line({0.0, 1.0, 3.0}, {1.0, 3.0, 7.0});
  CHECK(line(2.2) == doctest::Approx(5.4));
  CHECK(line(5.0) == doctest::Approx(11.0));
  CHECK(line.derivative(-1.0) == doctest::Approx(2.0));
}

TEST_CASE("monotone cubic honours supplied slopes when they are consistent") {
  std::vector<double> x = linspace(0.0, 2.0, 21), y, d;
  for (double t : x) {
    y.push_back(std::exp(t));
    d.push_back(std::exp(t));
  }
  MonotoneCubic m(x, y, d);
  for (double t : linspace(0.0, 2.0, 97)) CHECK(m(t) == doctest::Approx(std::exp(t)).epsilon(1e-6));
}

TEST_CASE("number format") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333333");
  CHECK(format_number(1e-20) == "1e-20");
}

TEST_CASE("csv round trip through an atomic write") {
  const fs::path dir = fs::temp_directory_path() / "specinv_csv_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path p = dir / "t.csv";
  write_csv(p, {"a", "b"}, {{1.0, 2.5}, {-3.0, 1e-7}});
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "a,b\n1,2.5\n-3,1e-07\n");
  const CsvTable t = read_csv(p);
  CHECK(t.column("b") == 1);
  CHECK(t.column("c") == -1);
  CHECK(t.rows[1][1] == 1e-7);
  int files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
  CHECK(files == 1);
  fs::remove_all(dir);
}

TEST_CASE("parallel_for fills every slot and rethrows") {
  std::vector<int> out(1000, -1);
  parallel_for(out.size(), [&](std::size_t i) { out[i] = static_cast<int>(i * i % 97); });
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i * i % 97));
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                    if (i == 3) throw Error(ErrorKind::NonConvergent, "x");
                  }),
                  Error);
  CHECK(worker_count() >= 1);
}

TEST_CASE("analytic shapes") {
  const auto s = PotentialShape::sech_squared();
  CHECK(s(0.0) == -1.0);
  CHECK(s(-1.0) == s(1.0));
  CHECK(s.limit_at_infinity() == 0.0);
  CHECK(s.constant_beyond().has_value());
  CHECK(std::abs(s(*s.constant_beyond())) <= 1e-13);
  const auto e = PotentialShape::exponential();
  CHECK(std::abs(e(*e.constant_beyond())) <= 1e-13);
  const auto p = PotentialShape::shifted_power(-1.0, 1.0, 1.5);
  CHECK(p(4.0) == doctest::Approx(7.0));
  CHECK_FALSE(p.bounded());
  CHECK_THROWS_AS(PotentialShape::shifted_power(0.0, -1.0, 1.5), Error);
  CHECK(s.level_crossing(-0.5, 10.0) == doctest::Approx(std::acosh(std::sqrt(2.0))).epsilon(1e-12));
}

TEST_CASE("tabulated shape: straight and power continuation, cut at zero") {
  std::vector<double> x{0.0, 1.0, 2.0}, f{-1.0, -0.5, -0.25};
  const auto t = PotentialShape::tabulated(x, f, 0.25, true);
  CHECK(t(3.0) == doctest::Approx(0.0));
  CHECK(t(10.0) == 0.0);
  CHECK(*t.constant_beyond() == doctest::Approx(3.0));
  CHECK(t.limit_at_infinity() == 0.0);

  // f = -1 + x^1.5 continued from its last two knots
  std::vector<double> xp{0.0, 1.0, 2.0}, fp{-1.0, 0.0, std::pow(2.0, 1.5) - 1.0};
  const double slope = 1.5 * std::pow(2.0, 0.5);
  const auto pw = PotentialShape::tabulated(xp, fp, slope, false, 1.5);
  for (double z : {2.5, 4.0, 9.0}) CHECK(pw(z) == doctest::Approx(std::pow(z, 1.5) - 1.0).epsilon(1e-12));
  CHECK_FALSE(pw.constant_beyond().has_value());

  const auto cut = PotentialShape::tabulated(x, f, 0.25, true, 2.0);
  const double xc = *cut.constant_beyond();
  CHECK(std::abs(cut(xc - 1e-9)) < 1e-8);
  CHECK(cut(xc + 1.0) == 0.0);

  CHECK_THROWS_AS(PotentialShape::tabulated(x, {-1.0, -1.5, 0.0}, 0.0), Error);
  CHECK_THROWS_AS(PotentialShape::tabulated(x, f, -1.0), Error);
  CHECK_THROWS_AS(PotentialShape::tabulated(x, f, 1.0, false, 0.0), Error);
}

TEST_CASE("head plus segments") {
  HeadPlusSegments m;
  m.head = HeadModel::power(-1.0, 1.0, 2.0, 0.1);
  m.h = 0.05;
  m.nodes = {-0.98, -0.95};
  m.tail_slope = 0.6;
  m.cut_to_zero = true;
  const auto g = PotentialShape::head_plus_segments(m);
  CHECK(g(0.05) == doctest::Approx(-1.0 + 0.0025));
  CHECK(g(0.175) == doctest::Approx(-0.965));
  CHECK(g(0.2 + 0.5) == doctest::Approx(-0.65));
  CHECK(g(10.0) == 0.0);
  CHECK(monotone_on(g, linspace(0.0, 3.0, 301)));
}
