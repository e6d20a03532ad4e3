#pragma once

// Command-line front end. run_cli() is the whole program minus process plumbing,
// so tests can drive it in-process.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hbvwave/io.hpp"

namespace hbvwave::cli {

namespace fs = std::filesystem;
using io::Json;

enum ExitCode : int { kOk = 0, kUsage = 2, kAllFailed = 3, kSolver = 4 };

struct GlobalOptions {
  std::string preset;
  std::string params;
  std::string params_scaled;
  std::string out;
  std::vector<std::string> overrides;
};

inline io::ParameterSet resolve_parameters(const GlobalOptions& g) {
  const int sources = !g.preset.empty() + !g.params.empty() + !g.params_scaled.empty();
  if (sources == 0) throw InvalidArgument("give one of --preset, --params or --params-scaled");
  if (sources > 1) throw InvalidArgument("--preset, --params and --params-scaled are mutually exclusive");
  io::ParameterSet set;
  if (!g.preset.empty()) set = io::find_preset(g.preset).params;
  else if (!g.params.empty()) set = io::dimensional_from_json(io::read_json_file(g.params));
  else set = io::scaled_from_json(io::read_json_file(g.params_scaled));
  for (const auto& o : g.overrides) io::apply_override(set, o);
  return set;
}

struct Resolved {
  ScaledParams sp;
  std::optional<ValidatedParams> vp;
};

inline Resolved resolve_scaled(const io::ParameterSet& set, bool allow_zero_diffusion) {
  if (const auto* dp = std::get_if<DimensionalParams>(&set)) {
    ValidatedParams vp = validate(*dp);
    return {scale(vp), vp};
  }
  return {validate(std::get<ScaledParams>(set), allow_zero_diffusion), std::nullopt};
}

inline fs::path require_out(const GlobalOptions& g, std::string_view command) {
  if (g.out.empty()) throw InvalidArgument(std::string(command) + " needs --out <dir>");
  return g.out;
}

inline std::string error_kind(const Error& e) {
  if (dynamic_cast<const StabilityViolation*>(&e)) return "StabilityViolation";
  if (dynamic_cast<const NegativeState*>(&e)) return "NegativeState";
  if (dynamic_cast<const NoEndemicEquilibrium*>(&e)) return "NoEndemicEquilibrium";
  if (dynamic_cast<const NoUnstableDirection*>(&e)) return "NoUnstableDirection";
  if (dynamic_cast<const MultipleUnstableDirections*>(&e)) return "MultipleUnstableDirections";
  if (dynamic_cast<const NoConvergence*>(&e)) return "NoConvergence";
  if (dynamic_cast<const NonPositiveParameter*>(&e)) return "NonPositiveParameter";
  if (dynamic_cast<const NonPositiveRs*>(&e)) return "NonPositiveRs";
  if (dynamic_cast<const StepTooLarge*>(&e)) return "StepTooLarge";
  if (dynamic_cast<const InvalidArgument*>(&e)) return "InvalidArgument";
  return "Error";
}

// -------------------------------------------------------------------- r0

inline int cmd_r0(const GlobalOptions& g, std::ostream& out) {
  const Resolved r = resolve_scaled(resolve_parameters(g), /*allow_zero_diffusion=*/true);
  const std::string text = io::dump(io::r0_report(r.sp, r.vp));
  out << text;
  if (!g.out.empty()) io::write_file(fs::path(g.out) / "r0.json", text);
  return kOk;
}

// ------------------------------------------------------------ elasticity

struct ElasticityOptions {
  double h = 1e-6;
  bool all = false;
};

inline int cmd_elasticity(const GlobalOptions& g, const ElasticityOptions& o, std::ostream& out) {
  const io::ParameterSet set = resolve_parameters(g);
  const auto* dp = std::get_if<DimensionalParams>(&set);
  if (!dp) throw InvalidArgument("elasticities need dimensional parameters (use --preset table1 or --params)");
  const ValidatedParams vp = validate(*dp);
  std::vector<Parameter> which{Parameter::alpha, Parameter::beta, Parameter::gamma};
  if (o.all) which.assign(kAllParameters.begin(), kAllParameters.end());
  std::vector<io::ElasticityRow> rows;
  for (Parameter p : which) rows.push_back({p, elasticity(vp, p), elasticity_fd(vp, p, o.h)});
  std::ostringstream csv;
  io::write_elasticity_csv(csv, rows);
  out << csv.str();
  if (!g.out.empty()) {
    io::write_file(fs::path(g.out) / "elasticity.csv", csv.str());
    io::write_file(fs::path(g.out) / "elasticity.json", io::dump(io::elasticity_report(rows, o.h)));
  }
  return kOk;
}

// ----------------------------------------------------------------- discs

struct DiscOptions {
  std::string matrix;
  std::optional<double> c;
};

inline int cmd_discs(const GlobalOptions& g, const DiscOptions& o, std::ostream& out) {
  Json report;
  if (!o.matrix.empty()) {
    if (!g.preset.empty() || !g.params.empty() || !g.params_scaled.empty())
      throw InvalidArgument("--matrix cannot be combined with a parameter source");
    report = io::disc_report(io::matrix_from_json(io::read_json_file(o.matrix)));
  } else {
    if (!o.c) throw InvalidArgument("discs needs --matrix <file> or a parameter source with --c");
    const WaveParams wp{resolve_scaled(resolve_parameters(g), false).sp, *o.c};
    validate(wp);
    report = io::disc_report(wave_submatrix(wp));
    report["c"] = wp.c;
  }
  const std::string text = io::dump(report);
  out << text;
  if (!g.out.empty()) io::write_file(fs::path(g.out) / "discs.json", text);
  return kOk;
}

// ------------------------------------------------------------------ wave

struct WaveOptions {
  std::vector<double> c;
  std::vector<double> c_sweep;
  ShootOptions shoot;
  std::string direction = "slowest";
};

inline LaunchDirection parse_direction(const std::string& s) {
  if (s == "slowest") return LaunchDirection::Slowest;
  if (s == "fastest") return LaunchDirection::Fastest;
  if (s == "unique") return LaunchDirection::Unique;
  throw InvalidArgument("unknown launch direction '" + s + "'");
}

inline int cmd_wave(const GlobalOptions& g, WaveOptions o, std::ostream& out) {
  const fs::path dir = require_out(g, "wave");
  std::vector<double> speeds = o.c;
  speeds.insert(speeds.end(), o.c_sweep.begin(), o.c_sweep.end());
  if (speeds.empty()) throw InvalidArgument("wave needs --c or --c-sweep");
  const ScaledParams sp = resolve_scaled(resolve_parameters(g), false).sp;
  for (double c : speeds) validate(WaveParams{sp, c});
  o.shoot.direction = parse_direction(o.direction);

  std::ostringstream table;
  table << "c,overall,verdict,terminal_distance,hump_height,hump_location,u1_non_monotone,error\n";
  Json summary = Json::array();
  std::size_t succeeded = 0;
  for (double c : speeds) {
    const WaveParams wp{sp, c};
    const std::string tag = io::short_real(c);
    Json row{{"c", c}};
    std::string verdict, distance, height, location, non_monotone, error;
    bool overall = false;
    try {
      const ConditionReport rep = check_existence(wp);
      overall = rep.overall;
      io::write_file(dir / ("conditions_" + tag + ".json"), io::dump(io::to_json(rep)));
      Json discs = io::disc_report(wave_submatrix(wp));
      discs["c"] = c;
      io::write_file(dir / ("discs_" + tag + ".json"), io::dump(discs));
      const WaveProfile profile = shoot(wp, o.shoot);
      std::ostringstream csv;
      io::write_profile_csv(csv, profile);
      io::write_file(dir / ("profile_" + tag + ".csv"), csv.str());
      const ProfileMetrics m = profile_metrics(profile);
      verdict = verdict_name(profile.verdict);
      distance = io::format_real(profile.terminal_distance);
      height = io::format_real(m.hump_height);
      location = io::format_real(m.hump_location);
      non_monotone = m.u1_non_monotone ? "true" : "false";
      row["verdict"] = verdict;
      row["terminal_distance"] = io::number(profile.terminal_distance);
      row["launch_eigenvalue"] = profile.launch_eigenvalue;
      row["metrics"] = io::to_json(m);
      row["error"] = nullptr;
      ++succeeded;
    } catch (const Error& e) {
      error = error_kind(e);
      row["verdict"] = nullptr;
      row["error"] = Json{{"type", error_kind(e)}, {"message", e.what()}};
    }
    row["overall"] = overall;
    summary.push_back(row);
    table << io::format_real(c) << ',' << (overall ? "true" : "false") << ',' << verdict << ',' << distance << ','
          << height << ',' << location << ',' << non_monotone << ',' << error << '\n';
  }
  io::write_file(dir / "summary.csv", table.str());
  io::write_file(dir / "summary.json", io::dump(Json{{"params", io::to_json(sp)}, {"runs", summary}}));
  out << table.str();
  return succeeded > 0 ? kOk : kAllFailed;
}

// -------------------------------------------------------------- simulate

struct SimulateOptions {
  std::size_t nx = 201;
  double L = 1.0;
  double tmax = 100.0;
  double out_every = 1.0;
  std::string scheme = "imex";
  double dt = 0.0;
  std::optional<double> dv;
  std::string dv_kind = "scaled";
  InitialConditionSpec ic;
  bool compare = false;
};

inline Scheme parse_scheme(const std::string& s) {
  if (s == "imex") return Scheme::Imex;
  if (s == "explicit") return Scheme::Explicit;
  throw InvalidArgument("unknown scheme '" + s + "'");
}

/// Runs one simulation into `dir`. Returns kSolver (with the diagnostic in meta.json) on solver errors.
inline int run_simulation(const ScaledParams& sp, const Grid& grid, const InitialConditionSpec& ic,
                          const SimulationOptions& opts, const fs::path& dir, std::optional<SpaceTimeSeries>& result) {
  try {
    result = simulate(sp, grid, ic, opts);
  } catch (const Error& e) {
    Json meta = Json::object();
    meta["status"] = "error";
    meta["error"] = Json{{"type", error_kind(e)}, {"message", e.what()}};
    meta["grid"] = io::to_json(grid);
    meta["scheme"] = scheme_name(opts.scheme);
    meta["dt"] = opts.dt > 0.0 ? opts.dt : default_time_step(sp, grid, opts.scheme);
    meta["tmax"] = opts.tmax;
    meta["out_every"] = opts.out_every;
    meta["params"] = io::to_json(sp);
    meta["initial_condition"] = io::to_json(ic);
    io::write_file(dir / "meta.json", io::dump(meta));
    return kSolver;
  }
  for (std::size_t f = 0; f < 4; ++f) {
    std::ostringstream csv;
    io::write_field_csv(csv, *result, f);
    io::write_file(dir / (std::string(kFieldNames[f]) + ".csv"), csv.str());
  }
  io::write_file(dir / "meta.json", io::dump(io::series_meta(*result, ic, opts)));
  return kOk;
}

inline int cmd_simulate(const GlobalOptions& g, const SimulateOptions& o, std::ostream& out) {
  const fs::path dir = require_out(g, "simulate");
  const io::ParameterSet set = resolve_parameters(g);
  Resolved r = resolve_scaled(set, /*allow_zero_diffusion=*/true);
  if (o.dv) {
    if (o.dv_kind == "scaled") {
      r.sp.Dv = *o.dv;
    } else if (o.dv_kind == "dimensional") {
      if (!r.vp) throw InvalidArgument("--dv-kind dimensional needs dimensional parameters");
      r.sp.Dv = r.vp->raw().mu * *o.dv;
    } else {
      throw InvalidArgument("--dv-kind must be scaled or dimensional");
    }
    validate(r.sp, true);
  }
  const Grid grid{o.L, o.nx};
  validate(grid);
  validate(o.ic);
  const SimulationOptions opts{o.tmax, o.out_every, parse_scheme(o.scheme), o.dt};
  if (!std::isfinite(opts.tmax) || opts.tmax < 0.0) throw InvalidArgument("tmax must be non-negative");
  if (!std::isfinite(opts.out_every) || !(opts.out_every > 0.0)) throw InvalidArgument("out-every must be positive");
  if (!std::isfinite(opts.dt) || opts.dt < 0.0) throw InvalidArgument("dt must be non-negative");

  if (!o.compare) {
    std::optional<SpaceTimeSeries> series;
    const int code = run_simulation(r.sp, grid, o.ic, opts, dir, series);
    if (code != kOk) {
      out << "simulation failed, see " << (dir / "meta.json").string() << '\n';
      return code;
    }
    out << "wrote " << series->snapshots.size() << " snapshots to " << dir.string() << '\n';
    return kOk;
  }

  if (!(r.sp.Dv > 0.0)) throw InvalidArgument("--compare-diffusion needs Dv > 0");
  ScaledParams still = r.sp;
  still.Dv = 0.0;
  std::optional<SpaceTimeSeries> a, b;
  const int ca = run_simulation(still, grid, o.ic, opts, dir / "no_diffusion", a);
  const int cb = run_simulation(r.sp, grid, o.ic, opts, dir / "diffusion", b);
  if (ca != kOk || cb != kOk) {
    out << "simulation failed, see meta.json under " << dir.string() << '\n';
    return kSolver;
  }
  Json rows = Json::array();
  std::size_t larger = 0;
  for (std::size_t k = 0; k < a->snapshots.size(); ++k) {
    const double wa = half_max_width(a->snapshots[k].V1, grid);
    const double wb = half_max_width(b->snapshots[k].V1, grid);
    larger += wb > wa;
    rows.push_back({{"t", a->snapshots[k].t},
                    {"width_no_diffusion", wa},
                    {"width_diffusion", wb},
                    {"peak_node_no_diffusion", peak_node(a->snapshots[k].V1)},
                    {"peak_node_diffusion", peak_node(b->snapshots[k].V1)}});
  }
  const Json cmp{{"metric", "V1 half-max width"},
                 {"snapshots", rows},
                 {"times_diffusion_wider", larger},
                 {"final_distance_no_diffusion", io::series_meta(*a, o.ic, opts)["final_distance_to_endemic"]},
                 {"final_distance_diffusion", io::series_meta(*b, o.ic, opts)["final_distance_to_endemic"]}};
  io::write_file(dir / "comparison.json", io::dump(cmp));
  out << "diffusive run wider at " << larger << " of " << rows.size() << " snapshots\n";
  return kOk;
}

// ------------------------------------------------------------------ main

/// `args` excludes the program name.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"HBV reaction-diffusion model: R0, elasticities, Gershgorin discs, traveling waves, simulation"};
  app.name("hbvwave");
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--preset", g.preset, "built-in parameter set: table1, table1-fig5, paper-rho, reference");
  app.add_option("--params", g.params, "JSON file with dimensional parameters");
  app.add_option("--params-scaled", g.params_scaled, "JSON file with rho1..rho5 and Dv");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--override", g.overrides, "name=value, repeatable")->take_all();

  auto* r0 = app.add_subcommand("r0", "R0, scaled parameters and equilibria");

  ElasticityOptions eo;
  auto* el = app.add_subcommand("elasticity", "elasticities of R0, closed form and finite difference");
  el->set_help_flag("--help", "Print this help message and exit");
  el->add_option("--h", eo.h, "relative finite-difference step");
  el->add_flag("--all", eo.all, "every parameter, not only alpha, beta, gamma");

  DiscOptions dop;
  auto* di = app.add_subcommand("discs", "Gershgorin discs of a matrix or of the wave submatrix");
  di->add_option("--matrix", dop.matrix, "JSON file with nested row arrays");
  di->add_option("--c", dop.c, "wave speed");

  WaveOptions wo;
  auto* wa = app.add_subcommand("wave", "existence conditions and shooting per wave speed");
  wa->add_option("--c", wo.c, "wave speed, repeatable")->delimiter(',');
  wa->add_option("--c-sweep", wo.c_sweep, "comma-separated wave speeds")->delimiter(',');
  wa->add_option("--epsilon", wo.shoot.epsilon, "launch offset");
  wa->add_option("--tol", wo.shoot.tol, "convergence radius");
  wa->add_option("--blowup", wo.shoot.blowup, "divergence threshold");
  wa->add_option("--s-max", wo.shoot.s_max, "integration budget in s");
  wa->add_option("--stride", wo.shoot.stride, "sample spacing");
  wa->add_option("--direction", wo.direction, "slowest, fastest or unique");

  SimulateOptions so;
  auto* si = app.add_subcommand("simulate", "1-D reaction-diffusion run");
  si->add_option("--nx", so.nx, "grid nodes");
  si->add_option("--L", so.L, "domain length");
  si->add_option("--tmax", so.tmax, "final time");
  si->add_option("--out-every", so.out_every, "snapshot interval");
  si->add_option("--scheme", so.scheme, "imex or explicit");
  si->add_option("--dt", so.dt, "time step, 0 for automatic");
  si->add_option("--dv", so.dv, "diffusion coefficient replacing the parameter set's");
  si->add_option("--dv-kind", so.dv_kind, "scaled or dimensional (multiplied by mu)");
  si->add_option("--T0", so.ic.T0);
  si->add_option("--I0", so.ic.I0);
  si->add_option("--D0", so.ic.D0);
  si->add_option("--V0", so.ic.V0);
  si->add_option("--epsilon", so.ic.epsilon, "Gaussian width");
  si->add_flag("--compare-diffusion", so.compare, "run Dv = 0 and the given Dv side by side");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (r0->parsed()) return cmd_r0(g, out);
    if (el->parsed()) return cmd_elasticity(g, eo, out);
    if (di->parsed()) return cmd_discs(g, dop, out);
    if (wa->parsed()) return cmd_wave(g, wo, out);
    if (si->parsed()) return cmd_simulate(g, so, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return kUsage;
}

}  // namespace hbvwave::cli
