#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "specinv/constructive.hpp"
#include "specinv/csv.hpp"
#include "specinv/error.hpp"
#include "specinv/functional.hpp"
#include "specinv/kinetic.hpp"
#include "specinv/parallel.hpp"

namespace specinv::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

double parse_ratio(const std::string& s) {
  std::size_t used = 0;
  try {
    const auto slash = s.find('/');
    if (slash == std::string::npos) {
      const double v = std::stod(s, &used);
      if (used == s.size()) return v;
    } else {
      const std::string a = s.substr(0, slash), b = s.substr(slash + 1);
      std::size_t ua = 0, ub = 0;
      const double num = std::stod(a, &ua), den = std::stod(b, &ub);
      if (ua == a.size() && ub == b.size() && den != 0.0) return num / den;
    }
  } catch (const std::exception&) {
  }
  throw UsageError{"not a number: '" + s + "'"};
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  for (std::string p; std::getline(ss, p, sep);) parts.push_back(p);
  return parts;
}

SolverConfig solver_config(const Options& o) {
  SolverConfig c;
  c.grid_points = o.grid_points;
  c.energy_tolerance = o.energy_tolerance;
  return c;
}

std::optional<bool> bounded_flag(const Options& o) {
  if (o.bounded == "yes") return true;
  if (o.bounded == "no") return false;
  return std::nullopt;
}

ConstructiveConfig constructive_config(const Options& o) {
  ConstructiveConfig c;
  c.v1 = o.v1;
  c.h = o.h;
  c.sigma = o.sigma;
  c.steps = o.steps;
  c.bounded = bounded_flag(o);
  c.solver = solver_config(o);
  return c;
}

FunctionalConfig functional_config(const Options& o) {
  FunctionalConfig c;
  c.x_grid = linspace(o.x_min, o.x_max, static_cast<std::size_t>(o.x_points));
  c.max_iterations = o.iterations;
  c.stop_tolerance = o.stop_tolerance;
  c.bounded = bounded_flag(o);
  c.solver = solver_config(o);
  return c;
}

ordered_json options_json(const Options& o) {
  ordered_json j;
  j["command"] = o.command;
  if (!o.figure.empty()) j["figure"] = o.figure;
  j["input"] = {{"analytic", o.analytic}, {"csv", o.input}, {"f0", o.f0}, {"A", o.A}, {"q", o.q}};
  j["out"] = o.out;
  j["v_grid"] = {{"min", o.v_min}, {"max", o.v_max}, {"points", o.v_points}};
  j["constructive"] = {{"v1", o.v1}, {"h", o.h}, {"sigma", o.sigma}, {"steps", o.steps}, {"bounded", o.bounded}};
  j["functional"] = {{"seed", o.seed},
                     {"iterations", o.iterations},
                     {"stop_tolerance", o.stop_tolerance},
                     {"x_min", o.x_min},
                     {"x_max", o.x_max},
                     {"x_points", o.x_points}};
  j["solver"] = {{"grid_points", o.grid_points}, {"energy_tolerance", o.energy_tolerance}};
  return j;
}

ordered_json head_json(const HeadModel& h) {
  if (h.kind == HeadModel::Kind::flat) return {{"kind", "flat"}, {"f0", h.f0}, {"b", h.b}};
  return {{"kind", "power"}, {"f0", h.f0}, {"A", h.A}, {"q", h.q}, {"b", h.b}};
}

void write_shape_csv(const PotentialShape& f, double x_end, const fs::path& path) {
  std::vector<std::vector<double>> rows;
  for (double x : linspace(0.0, x_end, 401)) rows.push_back({x, f(x)});
  write_csv(path, {"x", "f"}, rows);
}

// -- subcommands ------------------------------------------------------------

int cmd_forward(const Options& o, std::ostream& out) {
  const auto shape = analytic_shape(o);
  if (!shape) throw UsageError{"forward needs --analytic"};
  const auto traj = EnergyTrajectory::numeric(*shape, solver_config(o));
  write_trajectory_csv(traj, geometric_grid(o.v_min, o.v_max, o.v_points), fs::path(o.out) / "forward.csv");
  out << "forward: " << shape->describe() << "\n";
  return 0;
}

int cmd_trajectory(const Options& o, std::ostream& out) {
  const auto traj = input_trajectory(o);
  const auto grid = geometric_grid(o.v_min, o.v_max, o.v_points);
  write_trajectory_csv(traj, grid, fs::path(o.out) / "trajectory.csv");
  const StructureReport r = check_structure(traj, grid);
  out << "trajectory: " << traj.describe() << "\n";
  if (!r.ok()) {
    std::ostringstream os;
    os << "structure check failed (concavity " << r.concavity_violations << ", R " << r.r_violations
       << ", kinetic " << r.kinetic_violations << ")";
    throw Error(ErrorKind::InvalidData, os.str());
  }
  return 0;
}

int cmd_head_fit(const Options& o, std::ostream& out) {
  const auto traj = input_trajectory(o);
  const double f0 = estimate_f0(traj);
  HeadModel head;
  if (auto b = detect_flat(traj, default_flat_probes()))
    head = HeadModel::flat(f0, *b);
  else
    head = fit_head(traj, o.v1, f0);
  ordered_json j = head_json(head);
  j["v1"] = o.v1;
  write_text_atomic(fs::path(o.out) / "head.json", j.dump(2) + "\n");
  out << j.dump(2) << "\n";
  return 0;
}

int report_constructive(const ReconstructionReport& rep, const fs::path& dir, const std::string& stem,
                        std::ostream& out) {
  write_report_csv(rep, dir / (stem + ".csv"));
  write_text_atomic(dir / (stem + ".json"), report_json(rep));
  if (rep.shape) write_shape_csv(*rep.shape, rep.steps.back().x, dir / (stem + "_shape.csv"));
  for (const auto& w : rep.warnings) out << "warning: " << w << "\n";
  if (auto e = rep.max_error()) out << stem << ": max error " << format_number(*e) << "\n";
  if (!rep.ok()) throw Error(*rep.failure, rep.failure_message.substr(rep.failure_message.find(": ") + 2));
  return 0;
}

int cmd_constructive(const Options& o, std::ostream& out) {
  const auto traj = input_trajectory(o);
  const auto rep = run_constructive(traj, constructive_config(o));
  return report_constructive(rep, o.out, "constructive", out);
}

void report_functional(const FunctionalResult& res, const fs::path& dir, std::ostream& out) {
  write_functional_csv(res, dir);
  for (const auto& it : res.iterates) {
    out << "iterate " << it.n;
    if (it.dist_prev) out << "  dist_prev " << format_number(*it.dist_prev);
    if (it.dist_target) out << "  dist_target " << format_number(*it.dist_target);
    out << "\n";
  }
}

int cmd_functional(const Options& o, std::ostream& out) {
  const auto traj = input_trajectory(o);
  const auto seed = parse_seed(o.seed, estimate_f0(traj));
  report_functional(run_functional(traj, seed, functional_config(o)), o.out, out);
  return 0;
}

int cmd_kinetic(const Options& o, std::ostream& out) {
  const auto traj = input_trajectory(o);
  const fs::path dir = o.out;
  write_kinetic_csv(trajectory_to_kinetic(traj, geometric_grid(o.v_min, o.v_max, o.v_points)),
                    dir / "kinetic.csv");
  if (const auto shape = traj.exact_shape()) {
    const auto K = KFunction::numeric(traj, *shape);
    write_k_csv(K, linspace(o.x_min, o.x_max, static_cast<std::size_t>(o.x_points)), dir / "K.csv");
  }
  out << "kinetic: " << traj.describe() << "\n";
  return 0;
}

// -- figures ----------------------------------------------------------------

void fig1(const fs::path& dir) {
  std::vector<std::vector<double>> rows;
  for (int n = 0; n <= 3; ++n) {
    const auto traj = EnergyTrajectory::sech_squared(n);
    for (double v : linspace(n * (n + 1.0), 30.0, 301)) rows.push_back({double(n), v, traj.F(v)});
  }
  write_csv(dir / "fig1.csv", {"n", "v", "F"}, rows);
}

void fig_constructive(const EnergyTrajectory& traj, const Options& o, const fs::path& dir,
                      const std::string& stem, std::ostream& out) {
  ConstructiveConfig cfg;
  cfg.solver = solver_config(o);
  const auto rep = run_constructive(traj, cfg);
  const double x_end = rep.steps.empty() ? 2.0 : rep.steps.back().x;
  if (auto exact = traj.exact_shape()) write_shape_csv(*exact, x_end, dir / (stem + "_exact.csv"));
  report_constructive(rep, dir, stem, out);
}

void fig4(const Options& o, const fs::path& dir) {
  const auto e = EnergyTrajectory::numeric(PotentialShape::exponential(), solver_config(o));
  const auto s = EnergyTrajectory::sech_squared();
  const auto grid = linspace(0.05, 10.0, 200);
  std::vector<std::vector<double>> rows(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { rows[i] = {grid[i], e.F(grid[i]), s.F(grid[i])}; });
  write_csv(dir / "fig4.csv", {"v", "F_exponential", "F_sech2"}, rows);
}

void fig7(const Options& o, const fs::path& dir, std::ostream& out) {
  const auto traj = EnergyTrajectory::sech_squared();
  FunctionalConfig cfg;
  cfg.max_iterations = 5;
  cfg.stop_tolerance = 0.0;
  cfg.solver = solver_config(o);
  report_functional(run_functional(traj, PotentialShape::harmonic(-1.0, 1.0 / 20.0), cfg), dir / "fig7", out);
  std::vector<std::vector<double>> rows;
  for (double x : cfg.x_grid) rows.push_back({x, -2.0 / (1.0 + std::sqrt(1.0 + 4.0 * x * x))});
  write_csv(dir / "fig7" / "f1_closed.csv", {"x", "f1"}, rows);
}

int cmd_figures(const Options& o, std::ostream& out) {
  const fs::path dir = o.out;
  const std::string& f = o.figure;
  const bool all = f == "all";
  if (all || f == "fig1") fig1(dir);
  if (all || f == "fig3")
    fig_constructive(EnergyTrajectory::shifted_power(-1.0, 1.0, 1.5), o, dir, "fig3", out);
  if (all || f == "fig4") fig4(o, dir);
  if (all || f == "fig5")
    fig_constructive(EnergyTrajectory::numeric(PotentialShape::exponential(), solver_config(o)), o, dir, "fig5",
                     out);
  if (all || f == "fig6") fig_constructive(EnergyTrajectory::sech_squared(), o, dir, "fig6", out);
  if (all || f == "fig7") fig7(o, dir, out);
  return 0;
}

}  // namespace

std::vector<double> geometric_grid(double lo, double hi, int n) {
  if (!(lo > 0.0 && hi > lo) || n < 2) throw UsageError{"v grid needs 0 < v-min < v-max and at least 2 points"};
  std::vector<double> g = linspace(std::log(lo), std::log(hi), static_cast<std::size_t>(n));
  for (double& t : g) t = std::exp(t);
  g.front() = lo;
  g.back() = hi;
  return g;
}

PotentialShape parse_seed(const std::string& text, double f0) {
  const auto parts = split(text, ':');
  if (parts.empty()) throw UsageError{"empty seed"};
  const std::string& kind = parts[0];
  if (kind == "quadratic" && parts.size() == 2) return PotentialShape::harmonic(f0, parse_ratio(parts[1]));
  if (kind == "power" && parts.size() == 3)
    return PotentialShape::shifted_power(f0, parse_ratio(parts[2]), parse_ratio(parts[1]));
  if (kind == "sech2" && parts.size() == 1) return PotentialShape::sech_squared(f0 + 1.0);
  if (kind == "exponential" && parts.size() == 1) return PotentialShape::exponential(f0 + 1.0);
  throw UsageError{"unknown seed '" + text + "' (quadratic:c, power:q:c, sech2, exponential)"};
}

std::optional<PotentialShape> analytic_shape(const Options& o) {
  if (o.analytic.empty()) return std::nullopt;
  if (o.analytic == "sech2") return PotentialShape::sech_squared();
  if (o.analytic == "exponential") return PotentialShape::exponential();
  if (o.analytic == "harmonic") return PotentialShape::harmonic();
  if (o.analytic == "power") return PotentialShape::shifted_power(o.f0, o.A, o.q);
  throw UsageError{"unknown analytic potential '" + o.analytic + "'"};
}

EnergyTrajectory input_trajectory(const Options& o) {
  if (o.analytic.empty() == o.input.empty()) throw UsageError{"give exactly one of --analytic and --input"};
  if (!o.input.empty()) return read_trajectory_csv(o.input);
  if (o.analytic == "sech2") return EnergyTrajectory::sech_squared();
  if (o.analytic == "harmonic") return EnergyTrajectory::harmonic();
  if (o.analytic == "power") return EnergyTrajectory::shifted_power(o.f0, o.A, o.q);
  return EnergyTrajectory::numeric(*analytic_shape(o), solver_config(o));
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Potential shape from its ground-state energy trajectory", "spectra-invert"};
  app.set_help_flag("--help", "print this help and exit");
  app.set_config("--config", "", "TOML/INI file; flags given on the command line take precedence");
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->always_capture_default();

  auto input_opts = [&](CLI::App* s) {
    s->add_option("--analytic", o.analytic, "sech2, exponential, power or harmonic")
        ->check(CLI::IsMember({"sech2", "exponential", "power", "harmonic"}));
    s->add_option("--input", o.input, "trajectory CSV with columns v,F[,Fprime]");
    s->add_option("--f0", o.f0, "power: f0 in f0 + A|x|^q");
    s->add_option("--A", o.A, "power: A");
    s->add_option("--q", o.q, "power: q");
  };
  auto common = [&](CLI::App* s) {
    s->add_option("--out", o.out, "output directory");
    s->add_option("--grid-points", o.grid_points, "eigensolver grid points")->check(CLI::Range(100, 1000000));
    s->add_option("--energy-tolerance", o.energy_tolerance, "eigenvalue tolerance")->check(CLI::PositiveNumber);
  };
  auto v_grid = [&](CLI::App* s) {
    s->add_option("--v-min", o.v_min, "smallest coupling")->check(CLI::PositiveNumber);
    s->add_option("--v-max", o.v_max, "largest coupling")->check(CLI::PositiveNumber);
    s->add_option("--v-points", o.v_points, "number of couplings (geometric)")->check(CLI::Range(2, 100000));
  };
  auto x_grid = [&](CLI::App* s) {
    s->add_option("--x-min", o.x_min, "first grid point")->check(CLI::PositiveNumber);
    s->add_option("--x-max", o.x_max, "last grid point")->check(CLI::PositiveNumber);
    s->add_option("--x-points", o.x_points, "grid points")->check(CLI::Range(2, 100000));
  };
  auto v1 = [&](CLI::App* s) { s->add_option("--v1", o.v1, "coupling for the head fit")->check(CLI::PositiveNumber); };

  auto* forward = app.add_subcommand("forward", "ground-state energies of an analytic shape by the eigensolver");
  input_opts(forward), common(forward), v_grid(forward);
  auto* trajectory = app.add_subcommand("trajectory", "tabulate a trajectory and check its structure");
  input_opts(trajectory), common(trajectory), v_grid(trajectory);
  auto* head = app.add_subcommand("head-fit", "f(0) and the model near x = 0");
  input_opts(head), common(head), v1(head);
  auto* cons = app.add_subcommand("invert-constructive", "constructive reconstruction");
  input_opts(cons), common(cons), v1(cons);
  cons->add_option("--h", o.h, "step size")->check(CLI::PositiveNumber);
  cons->add_option("--sigma", o.sigma, "turning point fraction")->check(CLI::Range(0.0, 1.0));
  cons->add_option("--steps", o.steps, "number of steps")->check(CLI::NonNegativeNumber);
  auto bounded = [&](CLI::App* s) {
    s->add_option("--bounded", o.bounded, "cut extensions at zero")->check(CLI::IsMember({"auto", "yes", "no"}));
  };
  bounded(cons);
  auto* func = app.add_subcommand("invert-functional", "kinetic-potential inversion sequence");
  input_opts(func), common(func), x_grid(func), bounded(func);
  func->add_option("--seed", o.seed, "quadratic:c, power:q:c, sech2 or exponential");
  func->add_option("--iterations", o.iterations, "maximum number of iterations")->check(CLI::NonNegativeNumber);
  func->add_option("--stop-tolerance", o.stop_tolerance, "stop when successive iterates agree this well");
  auto* kin = app.add_subcommand("kinetic", "kinetic potential fbar(s) and K(x)");
  input_opts(kin), common(kin), v_grid(kin), x_grid(kin);
  auto* figs = app.add_subcommand("figures", "data for the figures");
  common(figs);
  figs->add_option("name", o.figure, "fig1, fig3, fig4, fig5, fig6, fig7 or all")
      ->required()
      ->check(CLI::IsMember({"fig1", "fig3", "fig4", "fig5", "fig6", "fig7", "all"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }
  o.command = app.get_subcommands().front()->get_name();

  try {
    fs::create_directories(o.out);
    write_text_atomic(fs::path(o.out) / "config.json", options_json(o).dump(2) + "\n");
    if (o.command == "forward") return cmd_forward(o, out);
    if (o.command == "trajectory") return cmd_trajectory(o, out);
    if (o.command == "head-fit") return cmd_head_fit(o, out);
    if (o.command == "invert-constructive") return cmd_constructive(o, out);
    if (o.command == "invert-functional") return cmd_functional(o, out);
    if (o.command == "kinetic") return cmd_kinetic(o, out);
    return cmd_figures(o, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.message << "\n";
    return 2;
  } catch (const Error& e) {
    err << e.name() << "\n" << e.what() << "\n";
    return e.kind() == ErrorKind::InvalidArgument ? 2 : 1;
  } catch (const fs::filesystem_error& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace specinv::cli
