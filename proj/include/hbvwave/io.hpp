#pragma once

// JSON and CSV serialization, parameter files and built-in presets.

#include <charconv>
#include <complex>
#include <cstdio>
#include <fstream>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "hbvwave/errors.hpp"
#include "hbvwave/model.hpp"
#include "hbvwave/pde.hpp"
#include "hbvwave/spectral.hpp"
#include "hbvwave/wave.hpp"

namespace hbvwave::io {

using Json = nlohmann::ordered_json;

/// Reals in CSV files: 17 significant digits.
inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Shortest round-trip text, used in file names (e.g. "19.6", "20").
inline std::string short_real(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Non-finite values become null.
inline Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

// ---------------------------------------------------------------- parameters

inline Json to_json(const DimensionalParams& p) {
  Json j = Json::object();
  for (Parameter which : kAllParameters) j[std::string(parameter_name(which))] = field(p, which);
  return j;
}

inline constexpr std::array<std::string_view, 6> kScaledNames = {"rho1", "rho2", "rho3", "rho4", "rho5", "Dv"};

inline double& scaled_field(ScaledParams& sp, std::size_t i) {
  switch (i) {
    case 0: return sp.rho1;
    case 1: return sp.rho2;
    case 2: return sp.rho3;
    case 3: return sp.rho4;
    case 4: return sp.rho5;
    default: return sp.Dv;
  }
}

inline std::optional<std::size_t> parse_scaled_name(std::string_view name) {
  for (std::size_t i = 0; i < kScaledNames.size(); ++i)
    if (kScaledNames[i] == name) return i;
  return std::nullopt;
}

inline Json to_json(const ScaledParams& sp) {
  ScaledParams copy = sp;
  Json j = Json::object();
  for (std::size_t i = 0; i < kScaledNames.size(); ++i) j[std::string(kScaledNames[i])] = scaled_field(copy, i);
  return j;
}

namespace detail {

inline double require_number(const Json& j, const std::string& key) {
  if (!j.contains(key)) throw InvalidArgument("missing parameter '" + key + "'");
  const Json& v = j.at(key);
  if (!v.is_number()) throw InvalidArgument("parameter '" + key + "' must be a number");
  return v.get<double>();
}

inline void reject_unknown(const Json& j, auto&& known) {
  for (const auto& [key, _] : j.items())
    if (!known(key)) throw InvalidArgument("unknown parameter '" + key + "'");
}

}  // namespace detail

/// Object with exactly the ten DimensionalParams field names.
inline DimensionalParams dimensional_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidArgument("parameter file must hold a JSON object");
  detail::reject_unknown(j, [](const std::string& k) {
    for (Parameter p : kAllParameters)
      if (parameter_name(p) == k) return true;
    return false;
  });
  DimensionalParams p;
  for (Parameter which : kAllParameters) field(p, which) = detail::require_number(j, std::string(parameter_name(which)));
  return p;
}

/// Object with keys rho1..rho5 and Dv.
inline ScaledParams scaled_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidArgument("parameter file must hold a JSON object");
  detail::reject_unknown(j, [](const std::string& k) { return parse_scaled_name(k).has_value(); });
  ScaledParams sp;
  for (std::size_t i = 0; i < kScaledNames.size(); ++i)
    scaled_field(sp, i) = detail::require_number(j, std::string(kScaledNames[i]));
  return sp;
}

inline Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
}

// ------------------------------------------------------------------ presets

using ParameterSet = std::variant<DimensionalParams, ScaledParams>;

struct Preset {
  std::string_view name;
  std::string_view description;
  ParameterSet params;
};

inline DimensionalParams table1_params() {
  return DimensionalParams{.lambda_ = 2.6e7, .k = 1.67e-12, .mu = 0.01, .delta = 0.053, .a = 150.0,
                           .gamma = 0.6931, .alpha = 0.8, .beta = 0.87, .delta_v = 3.8, .d_v = 0.08};
}

inline const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = [] {
    DimensionalParams fig5 = table1_params();
    fig5.d_v = 0.2;
    return std::vector<Preset>{
        {"table1", "tabulated dimensional values, d_v = 0.08", table1_params()},
        {"table1-fig5", "tabulated dimensional values with d_v = 0.2", fig5},
        {"paper-rho", "scaled values 2.81, 25, 70.71, 0.84, 170 with Dv = 0.2",
         ScaledParams{2.81, 25.0, 70.71, 0.84, 170.0, 0.2}},
        {"reference", "wave reference set 21.5, 30, 50.5, 19, 0.5 with Dv = 0.1",
         ScaledParams{21.5, 30.0, 50.5, 19.0, 0.5, 0.1}},
    };
  }();
  return all;
}

inline const Preset& find_preset(std::string_view name) {
  for (const auto& p : presets())
    if (p.name == name) return p;
  std::string known;
  for (const auto& p : presets()) known += (known.empty() ? "" : ", ") + std::string(p.name);
  throw InvalidArgument("unknown preset '" + std::string(name) + "' (known: " + known + ")");
}

inline Json to_json(const ParameterSet& ps) {
  return std::visit([](const auto& p) { return to_json(p); }, ps);
}

/// Applies key=value to whichever parameter kind the set holds.
inline void apply_override(ParameterSet& ps, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw InvalidArgument("override must look like name=value, got '" + std::string(assignment) + "'");
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw InvalidArgument("override value for '" + key + "' is not a number: '" + text + "'");
  if (auto* dp = std::get_if<DimensionalParams>(&ps)) {
    const auto which = parse_parameter(key);
    if (!which) throw InvalidArgument("unknown parameter '" + key + "'");
    field(*dp, *which) = value;
  } else {
    auto& sp = std::get<ScaledParams>(ps);
    const auto i = parse_scaled_name(key);
    if (!i) throw InvalidArgument("unknown scaled parameter '" + key + "'");
    scaled_field(sp, *i) = value;
  }
}

// ---------------------------------------------------------- model reports

inline Json to_json(const EquilibriumPoint& e) {
  return Json{{"T1", e.T1}, {"I1", e.I1}, {"D1", e.D1}, {"V1", e.V1}};
}

inline Json to_json(const Equilibria& eq) {
  return Json{{"disease_free", to_json(eq.disease_free)},
              {"endemic", eq.endemic ? to_json(*eq.endemic) : Json(nullptr)}};
}

/// R0 report. `vp` is present when the parameters were dimensional.
inline Json r0_report(const ScaledParams& sp, const std::optional<ValidatedParams>& vp) {
  Json j = Json::object();
  j["source"] = vp ? "dimensional" : "scaled";
  j["R_s"] = vp ? Json(vp->rs()) : Json(nullptr);
  j["rho"] = to_json(sp);
  j["R0"] = basic_reproduction_number(sp);
  j["R0_dimensional"] = vp ? Json(basic_reproduction_number(*vp)) : Json(nullptr);
  j["equilibria"] = to_json(equilibria(sp));
  return j;
}

struct ElasticityRow {
  Parameter which;
  double closed_form;
  double finite_difference;
};

inline void write_elasticity_csv(std::ostream& os, const std::vector<ElasticityRow>& rows) {
  os << "param,closed_form,finite_difference\n";
  for (const auto& r : rows)
    os << parameter_name(r.which) << ',' << format_real(r.closed_form) << ','
       << format_real(r.finite_difference) << '\n';
}

inline Json elasticity_report(const std::vector<ElasticityRow>& rows, double h) {
  Json arr = Json::array();
  for (const auto& r : rows)
    arr.push_back({{"param", parameter_name(r.which)},
                   {"closed_form", r.closed_form},
                   {"finite_difference", r.finite_difference}});
  return Json{{"h", h}, {"rows", arr}};
}

// ---------------------------------------------------------------- spectral

inline Json to_json(std::complex<double> z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

inline Json to_json(const std::vector<std::complex<double>>& zs) {
  Json arr = Json::array();
  for (const auto& z : zs) arr.push_back(to_json(z));
  return arr;
}

inline Json to_json(const SquareMatrix& a) {
  Json rows = Json::array();
  for (const auto& r : a.rows()) rows.push_back(r);
  return rows;
}

/// Nested arrays, one inner array per row.
inline SquareMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw InvalidArgument("matrix must be a non-empty array of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& r : j) {
    if (!r.is_array()) throw InvalidArgument("matrix rows must be arrays");
    std::vector<double> row;
    for (const auto& v : r) {
      if (!v.is_number()) throw InvalidArgument("matrix entries must be numbers");
      row.push_back(v.get<double>());
    }
    rows.push_back(std::move(row));
  }
  return SquareMatrix::from_rows(rows);
}

inline Json to_json(const Disc& d) {
  return Json{{"center", d.center}, {"radius", d.radius}, {"lower", d.lower()}, {"upper", d.upper()}};
}

inline Json discs_json(const std::vector<Disc>& discs, const DiscPartition& part) {
  Json arr = Json::array();
  for (std::size_t i = 0; i < discs.size(); ++i) {
    Json d = to_json(discs[i]);
    d["label"] = "G" + std::to_string(i + 1);
    arr.push_back(std::move(d));
  }
  Json groups = Json::array();
  for (const auto& g : part.groups) groups.push_back(g);
  return Json{{"discs", arr}, {"groups", groups}};
}

/// Discs, their partition and the spectrum of an arbitrary matrix.
inline Json disc_report(const SquareMatrix& a) {
  const auto discs = gershgorin_discs(a);
  const auto part = connected_components(discs);
  Json j = Json::object();
  j["matrix"] = to_json(a);
  const Json geo = discs_json(discs, part);
  j["discs"] = geo["discs"];
  j["groups"] = geo["groups"];
  j["eigenvalues"] = to_json(eigenvalues(a));
  return j;
}

// -------------------------------------------------------------------- wave

inline Json to_json(const Inequality& q) { return Json{{"holds", q.holds}, {"lhs", q.lhs}, {"rhs", q.rhs}}; }

inline Json to_json(const ConditionReport& r) {
  Json j = Json::object();
  j["c"] = r.wp.c;
  j["params"] = to_json(r.wp.sp);
  j["cond1"] = to_json(r.cond1);
  j["cond2"] = to_json(r.cond2);
  j["cond3"] = to_json(r.cond3);
  j["c_star"] = r.c_star;
  const Json geo = discs_json(r.discs, r.partition);
  j["discs"] = geo["discs"];
  j["groups"] = geo["groups"];
  j["discs_separated"] = r.discs_separated;
  j["eigenvalues"] = to_json(r.eigenvalues);
  j["determinant"] = r.determinant;
  j["positive_real_count"] = r.positive_real_count;
  j["complex_unstable_count"] = r.complex_unstable_count;
  Json cls = Json::array();
  for (const auto& g : r.classification)
    cls.push_back({{"name", g.name},
                   {"discs", g.discs},
                   {"expected", g.expected},
                   {"observed", g.observed},
                   {"eigenvalues", to_json(g.eigenvalues)},
                   {"consistent", g.consistent}});
  j["classification"] = cls;
  j["diagnostics"] = r.diagnostics;
  j["overall"] = r.overall;
  return j;
}

inline void write_profile_csv(std::ostream& os, const WaveProfile& p) {
  os << "s,u1,u2,u3,u4,u5\n";
  for (const auto& smp : p.samples) {
    os << format_real(smp.s);
    for (double v : smp.u) os << ',' << format_real(v);
    os << '\n';
  }
}

inline Json to_json(const ProfileMetrics& m) {
  Json comps = Json::array();
  for (const auto& c : m.components) comps.push_back({{"min", c.min}, {"max", c.max}, {"monotone", c.monotone}});
  return Json{{"components", comps},
              {"hump_height", m.hump_height},
              {"hump_location", m.hump_location},
              {"u1_non_monotone", m.u1_non_monotone}};
}

// --------------------------------------------------------------------- pde

inline const std::vector<double>& field_of(const FieldState& s, std::size_t f) {
  switch (f) {
    case 0: return s.T1;
    case 1: return s.I1;
    case 2: return s.D1;
    default: return s.V1;
  }
}

/// One row per snapshot: t followed by the field at every node.
inline void write_field_csv(std::ostream& os, const SpaceTimeSeries& series, std::size_t f) {
  os << 't';
  for (std::size_t i = 0; i < series.grid.nx; ++i) os << ",x" << i;
  os << '\n';
  for (const auto& snap : series.snapshots) {
    os << format_real(snap.t);
    for (double v : field_of(snap, f)) os << ',' << format_real(v);
    os << '\n';
  }
}

inline Json to_json(const Grid& g) { return Json{{"L", g.L}, {"nx", g.nx}, {"dx", g.dx()}}; }

inline Json to_json(const InitialConditionSpec& ic) {
  return Json{{"T0", ic.T0}, {"I0", ic.I0}, {"D0", ic.D0}, {"V0", ic.V0}, {"epsilon", ic.epsilon}};
}

inline Json series_meta(const SpaceTimeSeries& s, const InitialConditionSpec& ic, const SimulationOptions& opts) {
  double left = 0.0, right = 0.0;
  for (const auto& f : s.fluxes) {
    left = std::max(left, std::abs(f.left));
    right = std::max(right, std::abs(f.right));
  }
  Json times = Json::array();
  Json widths = Json::array();
  Json peaks = Json::array();
  for (const auto& snap : s.snapshots) {
    times.push_back(snap.t);
    widths.push_back(half_max_width(snap.V1, s.grid));
    peaks.push_back(peak_node(snap.V1));
  }
  Json j = Json::object();
  j["status"] = "ok";
  j["grid"] = to_json(s.grid);
  j["scheme"] = scheme_name(s.scheme);
  j["dt"] = s.dt;
  j["tmax"] = opts.tmax;
  j["out_every"] = opts.out_every;
  j["params"] = to_json(s.params);
  j["initial_condition"] = to_json(ic);
  j["times"] = times;
  j["clamp_count"] = s.clamp_count;
  j["limiter_count"] = s.limiter_count;
  j["boundary_flux_max"] = Json{{"left", left}, {"right", right}};
  j["V1_half_max_width"] = widths;
  j["V1_peak_node"] = peaks;
  const auto eq = equilibria(s.params);
  j["final_distance_to_endemic"] =
      eq.endemic && !s.snapshots.empty() ? number(distance_to(s.snapshots.back(), *eq.endemic)) : Json(nullptr);
  return j;
}

// ------------------------------------------------------------------ files

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  os << content;
  if (!os) throw Error("write failed for " + path.string());
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace hbvwave::io
