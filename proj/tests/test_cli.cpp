#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int status;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "spectra-invert");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = specinv::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("specinv_cli_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("head-fit prints the sech^2 head") {
  const auto dir = scratch("head");
  const auto r = run({"head-fit", "--analytic", "sech2", "--v1", "1e4", "--out", dir.string()});
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["q"].get<double>() == doctest::Approx(2.0).epsilon(0.02));
  CHECK(j["b"].get<double>() == doctest::Approx(0.1).epsilon(0.05));
  CHECK(fs::exists(dir / "head.json"));
  CHECK(fs::exists(dir / "config.json"));
}

TEST_CASE("figures fig1 starts F_1 at v = 2") {
  const auto dir = scratch("fig1");
  REQUIRE(run({"figures", "fig1", "--out", dir.string()}).status == 0);
  std::ifstream in(dir / "fig1.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "n,v,F");
  std::string first_level1;
  while (std::getline(in, line))
    if (line.rfind("1,", 0) == 0) {
      first_level1 = line;
      break;
    }
  CHECK(first_level1 == "1,2,0");
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run({}).status == 2);
  CHECK(run({"nonsense"}).status == 2);
  CHECK(run({"head-fit", "--analytic", "cosine"}).status == 2);
  CHECK(run({"head-fit"}).status == 2);
  CHECK(run({"head-fit", "--analytic", "sech2", "--input", "x.csv", "--out", scratch("u").string()}).status == 2);
  CHECK(run({"invert-functional", "--analytic", "sech2", "--seed", "cubic:1", "--out", scratch("u").string()})
            .status == 2);
  CHECK(run({"invert-constructive", "--analytic", "sech2", "--sigma", "1.5", "--out", scratch("u").string()}).status == 2);
  CHECK(run({"--help"}).status == 0);
}

TEST_CASE("numeric failures exit with 1 and name the error") {
  const auto dir = scratch("bad");
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "convex.csv");
    out << "v,F\n1,1\n2,4\n3,9\n4,16\n";
  }
  const auto r = run({"trajectory", "--input", (dir / "convex.csv").string(), "--out", dir.string()});
  CHECK(r.status == 1);
  CHECK(r.err.rfind("InvalidData", 0) == 0);

  {
    std::ofstream out(dir / "short.csv");
    out << "v,F\n";
    for (double v : {1.0, 2.0, 4.0, 8.0}) out << v << "," << -(std::sqrt(v + 0.25) - 0.5) * (std::sqrt(v + 0.25) - 0.5) << "\n";
  }
  const auto c = run({"invert-constructive", "--input", (dir / "short.csv").string(), "--out", dir.string()});
  CHECK(c.status == 1);
  CHECK_FALSE(c.err.empty());
}

TEST_CASE("flags override the config file, which overrides defaults") {
  const auto dir = scratch("cfg");
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "run.toml");
    out << "[head-fit]\nv1 = 20000\nanalytic = \"sech2\"\n";
  }
  const std::string cfg = (dir / "run.toml").string();
  REQUIRE(run({"head-fit", "--config", cfg, "--out", (dir / "a").string()}).status == 0);
  auto j = nlohmann::json::parse(slurp(dir / "a" / "config.json"));
  CHECK(j["constructive"]["v1"].get<double>() == 20000.0);
  CHECK(j["input"]["analytic"] == "sech2");
  CHECK(j["constructive"]["h"].get<double>() == 0.05);

  REQUIRE(run({"head-fit", "--config", cfg, "--v1", "5000", "--out", (dir / "b").string()}).status == 0);
  j = nlohmann::json::parse(slurp(dir / "b" / "config.json"));
  CHECK(j["constructive"]["v1"].get<double>() == 5000.0);
}

TEST_CASE("identical runs write identical files") {
  const auto a = scratch("det_a"), b = scratch("det_b");
  REQUIRE(run({"figures", "fig6", "--out", a.string()}).status == 0);
  REQUIRE(run({"figures", "fig6", "--out", b.string()}).status == 0);
  for (const char* f : {"fig6.csv", "fig6.json", "fig6_shape.csv", "fig6_exact.csv"}) {
    CHECK(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
}

TEST_CASE("invert-functional writes the seed and every iterate") {
  const auto dir = scratch("func");
  const auto r = run({"invert-functional", "--analytic", "sech2", "--seed", "quadratic:1/20", "--x-points", "4",
                      "--x-max", "2", "--stop-tolerance", "0", "--out", dir.string()});
  REQUIRE(r.status == 0);
  for (int n = 0; n <= 5; ++n) CHECK(fs::exists(dir / ("iterate_" + std::to_string(n) + ".csv")));
  CHECK_FALSE(fs::exists(dir / "iterate_6.csv"));
  CHECK(fs::exists(dir / "summary.csv"));
}

TEST_CASE("seed grammar") {
  using specinv::cli::parse_seed;
  CHECK(parse_seed("quadratic:1/20", -1.0)(2.0) == doctest::Approx(-0.8));
  CHECK(parse_seed("power:1.5:2", 0.5)(4.0) == doctest::Approx(16.5));
  CHECK(parse_seed("sech2", -1.0)(0.0) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(parse_seed("quadratic:1/0", -1.0), specinv::cli::UsageError);
  CHECK_THROWS_AS(parse_seed("quadratic", -1.0), specinv::cli::UsageError);
}

TEST_CASE("trajectory and kinetic exports") {
  const auto dir = scratch("exp");
  REQUIRE(run({"trajectory", "--analytic", "power", "--out", dir.string()}).status == 0);
  CHECK(slurp(dir / "trajectory.csv").rfind("v,F,Fprime\n", 0) == 0);
  REQUIRE(run({"kinetic", "--analytic", "harmonic", "--x-points", "5", "--out", dir.string()}).status == 0);
  CHECK(slurp(dir / "kinetic.csv").rfind("s,fbar\n", 0) == 0);
  CHECK(slurp(dir / "K.csv").rfind("x,K\n", 0) == 0);
  REQUIRE(run({"forward", "--analytic", "sech2", "--v-points", "5", "--out", dir.string()}).status == 0);
  CHECK(fs::exists(dir / "forward.csv"));
}
