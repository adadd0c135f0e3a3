#include "specinv/constructive.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "specinv/csv.hpp"

namespace specinv {

std::optional<double> ReconstructionReport::max_error() const {
  std::optional<double> worst;
  for (const auto& s : steps)
    if (s.exact) worst = std::max(worst.value_or(0.0), std::abs(s.g - *s.exact));
  return worst;
}

PotentialShape ConstructiveState::shape() const {
  HeadPlusSegments m = model;
  m.cut_to_zero = bounded;
  return PotentialShape::head_plus_segments(std::move(m));
}

ConstructiveState init(const EnergyTrajectory& traj, const ConstructiveConfig& cfg) {
  if (!(cfg.sigma > 0.0 && cfg.sigma < 1.0)) throw Error(ErrorKind::InvalidArgument, "sigma must lie in (0, 1)");
  if (!(cfg.h > 0.0 && cfg.v1 > 0.0 && cfg.y_tolerance > 0.0) || cfg.steps < 0)
    throw Error(ErrorKind::InvalidArgument, "v1, h and y_tolerance must be positive");
  ConstructiveState st;
  st.f0 = estimate_f0(traj);
  if (auto b = detect_flat(traj, default_flat_probes()))
    st.model.head = HeadModel::flat(st.f0, *b);
  else
    st.model.head = fit_head(traj, cfg.v1, st.f0);
  st.model.h = cfg.h;
  st.bounded = cfg.bounded ? *cfg.bounded : infer_bounded(traj, st.f0);
  st.model.cut_to_zero = st.bounded;
  const double b = st.model.head.b;
  st.slope_guess = st.model.head.slope(b);
  if (!(st.slope_guess > 0.0)) st.slope_guess = std::max(std::abs(st.f0), 1.0) / std::max(b, cfg.h);
  st.model.tail_slope = st.slope_guess;
  return st;
}

CouplingChoice coupling_for_step(const ConstructiveState& state, const EnergyTrajectory& traj,
                                 const ConstructiveConfig& cfg) {
  const PotentialShape g = state.shape();
  double sigma = cfg.sigma;
  for (int relax = 0;; ++relax) {
    const double anchor = cfg.anchor_next ? state.x_k() + state.model.h : state.x_k();
    const double target = g(sigma * anchor);
    try {
      return {invert_R(traj, target), sigma};
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::OutOfRange || relax >= cfg.sigma_relaxations) throw;
    }
    sigma = std::min(sigma * 1.2, 0.5 * (1.0 + sigma));
  }
}

PotentialShape extended_shape(const ConstructiveState& state, double y) {
  HeadPlusSegments m = state.model;
  const double gk = state.g_k();
  m.nodes.push_back(y);
  // a falling extension would leave the trial potential unbounded below
  m.tail_slope = std::max(0.0, (y - gk) / m.h);
  m.cut_to_zero = state.bounded;
  return PotentialShape::head_plus_segments(std::move(m));
}

NextValue solve_next_value(const ConstructiveState& state, const EnergyTrajectory& traj, double v,
                           const ConstructiveConfig& cfg) {
  const double target = traj.F(v);
  const double tol = cfg.y_tolerance * std::max(1.0, std::abs(target));
  auto G = [&](double y) { return ground_energy(extended_shape(state, y), v, cfg.solver) - target; };

  const double gk = state.g_k();
  double lo = gk;
  double width = 4.0 * cfg.h * state.slope_guess;
  double hi = gk + width;
  if (state.bounded) hi = std::min(hi, 0.0);
  double glo = G(lo);
  if (std::abs(glo) <= tol) return {lo, std::abs(glo), 1, false};
  int evaluations = 1;
  // the data ask for a value below the last node; f(0) is the floor
  const double floor_y = state.model.head.value(0.0);
  while (glo > 0.0) {
    if (lo <= floor_y || evaluations > 40)
      throw Error(ErrorKind::NoBracket, "no y between f(0) and the last node matches F(v)");
    hi = lo;
    lo = std::max(lo - 0.25 * width, floor_y);
    width *= 2.0;
    glo = G(lo);
    ++evaluations;
  }
  double ghi = G(hi);
  ++evaluations;
  while (ghi < 0.0) {
    if (state.bounded && hi >= 0.0) return {0.0, std::abs(ghi), evaluations, true};
    if (evaluations > 60) {
      std::ostringstream os;
      os << "G(v, y) stays below F(v) = " << target << " up to y = " << hi;
      throw Error(ErrorKind::NoBracket, os.str());
    }
    lo = hi;
    glo = ghi;
    width *= 2.0;
    hi = lo + width;
    if (state.bounded) hi = std::min(hi, 0.0);
    ghi = G(hi);
    ++evaluations;
  }
  RootTolerance rt;
  rt.f_tol = tol;
  rt.x_tol = 1e-12 * std::max(1.0, std::abs(gk));
  rt.max_iterations = 100;
  const RootResult r = bracketed_secant(G, lo, hi, glo, ghi, rt);
  if (std::abs(r.fx) > tol) {
    std::ostringstream os;
    os << "y search stalled with |G - F| = " << std::abs(r.fx) << " at v = " << v;
    throw Error(ErrorKind::NonConvergent, os.str());
  }
  return {r.x, std::abs(r.fx), evaluations + r.iterations, false};
}

ReconstructionReport run_constructive(const EnergyTrajectory& traj, const ConstructiveConfig& cfg) {
  ReconstructionReport rep;
  rep.config = cfg;
  const auto exact = traj.exact_shape();
  try {
    ConstructiveState st = init(traj, cfg);
    rep.f0 = st.f0;
    rep.head = st.model.head;
    rep.bounded = st.bounded;
    StepRecord first;
    first.x = st.x_k();
    first.g = st.g_k();
    first.v = cfg.v1;
    if (exact) first.exact = (*exact)(first.x);
    rep.steps.push_back(first);

    for (int k = 0; k < cfg.steps; ++k) {
      if (st.bounded && st.g_k() >= 0.0) {
        rep.warnings.push_back("reconstruction reached zero at x = " + format_number(st.x_k()) +
                               "; the bounded well is complete");
        break;
      }
      CouplingChoice c;
      try {
        c = coupling_for_step(st, traj, cfg);
      } catch (const Error& e) {
        if (st.bounded && e.kind() == ErrorKind::OutOfRange) {
          rep.warnings.push_back("no coupling reaches g(sigma x_k) at x = " + format_number(st.x_k()) +
                                 "; stopping");
          break;
        }
        throw;
      }
      if (c.sigma != cfg.sigma)
        rep.warnings.push_back("sigma relaxed to " + format_number(c.sigma) + " at step " + std::to_string(k));
      const NextValue nv = solve_next_value(st, traj, c.v, cfg);
      const double gk = st.g_k();
      st.model.nodes.push_back(nv.y);
      const double slope = (nv.y - gk) / cfg.h;
      st.model.tail_slope = std::max(0.0, slope);
      if (slope > 0.0) st.slope_guess = slope;

      StepRecord rec;
      rec.k = k + 1;
      rec.x = st.x_k();
      rec.g = nv.y;
      rec.v = c.v;
      rec.sigma = c.sigma;
      rec.residual = nv.residual;
      rec.iterations = nv.iterations;
      if (exact) rec.exact = (*exact)(rec.x);
      rep.steps.push_back(rec);
      if (nv.capped) {
        rep.warnings.push_back("value held at zero at x = " + format_number(rec.x) + "; stopping");
        break;
      }
    }
    rep.shape = st.shape();
  } catch (const Error& e) {
    rep.failure = e.kind();
    rep.failure_message = e.what();
  }
  return rep;
}

void write_report_csv(const ReconstructionReport& rep, const std::filesystem::path& path) {
  const bool with_exact = !rep.steps.empty() && rep.steps.front().exact.has_value();
  std::vector<std::string> header{"x", "g"};
  if (with_exact) header.push_back("exact");
  header.push_back("v_used");
  header.push_back("residual");
  std::vector<std::vector<double>> rows;
  for (const auto& s : rep.steps) {
    std::vector<double> row{s.x, s.g};
    if (with_exact) row.push_back(s.exact.value_or(std::nan("")));
    row.push_back(s.v);
    row.push_back(s.residual);
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

std::string report_json(const ReconstructionReport& rep) {
  using nlohmann::ordered_json;
  ordered_json j;
  const auto& c = rep.config;
  j["config"] = {{"v1", c.v1},
                 {"sigma", c.sigma},
                 {"h", c.h},
                 {"steps", c.steps},
                 {"bounded", c.bounded ? ordered_json(*c.bounded) : ordered_json(nullptr)},
                 {"y_tolerance", c.y_tolerance},
                 {"grid_points", c.solver.grid_points},
                 {"energy_tolerance", c.solver.energy_tolerance}};
  j["f0"] = rep.f0;
  j["bounded"] = rep.bounded;
  if (rep.head.kind == HeadModel::Kind::flat)
    j["head"] = {{"kind", "flat"}, {"f0", rep.head.f0}, {"b", rep.head.b}};
  else
    j["head"] = {{"kind", "power"}, {"f0", rep.head.f0}, {"A", rep.head.A}, {"q", rep.head.q}, {"b", rep.head.b}};
  ordered_json nodes = ordered_json::array();
  for (const auto& s : rep.steps) {
    ordered_json n = {{"k", s.k}, {"x", s.x}, {"g", s.g}, {"v", s.v}, {"sigma", s.sigma},
                      {"residual", s.residual}, {"iterations", s.iterations}};
    if (s.exact) n["exact"] = *s.exact;
    nodes.push_back(n);
  }
  j["nodes"] = nodes;
  j["warnings"] = rep.warnings;
  if (rep.failure) j["failure"] = {{"kind", error_name(*rep.failure)}, {"message", rep.failure_message}};
  if (auto e = rep.max_error()) j["max_error"] = *e;
  return j.dump(2) + "\n";
}

}  // namespace specinv
