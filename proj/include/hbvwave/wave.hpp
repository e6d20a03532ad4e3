#pragma once

// Traveling-wave ODE in the wave variable s = x + c t, its disease-free
// linearization, the disc-based existence checker and a shooting integrator.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hbvwave/errors.hpp"
#include "hbvwave/model.hpp"
#include "hbvwave/spectral.hpp"

namespace hbvwave {

struct WaveParams {
  ScaledParams sp;
  double c = 0.0;  ///< wave speed
};

inline const WaveParams& validate(const WaveParams& wp) {
  validate(wp.sp);
  if (!std::isfinite(wp.c) || !(wp.c > 0.0)) throw NonPositiveParameter("c");
  return wp;
}

/// (u1, u2, u3, u4, u5) with u5 = u4'.
using WaveState = std::array<double, 5>;

inline WaveState wave_rhs(const WaveState& u, const WaveParams& wp) {
  const ScaledParams& p = wp.sp;
  const double c = wp.c;
  return {
      (1.0 - u[0] - u[0] * u[3]) / c,
      (u[0] * u[3] - p.rho1 * u[1]) / c,
      (p.rho2 * u[1] - p.rho3 * u[2]) / c,
      u[4],
      (c * u[4] - p.rho4 * u[2] + p.rho5 * u[3]) / p.Dv,
  };
}

/// E1* = (1,0,0,0,0) and E2* = (endemic point, 0).
inline std::pair<WaveState, WaveState> boundary_states(const ScaledParams& sp) {
  const Equilibria eq = equilibria(sp);
  if (!eq.endemic) throw NoEndemicEquilibrium(basic_reproduction_number(sp));
  const EquilibriumPoint& e = *eq.endemic;
  return {WaveState{1.0, 0.0, 0.0, 0.0, 0.0}, WaveState{e.T1, e.I1, e.D1, e.V1, 0.0}};
}

inline SquareMatrix jacobian_disease_free(const WaveParams& wp) {
  const ScaledParams& p = wp.sp;
  const double c = wp.c;
  return SquareMatrix{
      {-1.0 / c, 0.0, 0.0, -1.0 / c, 0.0},
      {0.0, -p.rho1 / c, 0.0, 1.0 / c, 0.0},
      {0.0, p.rho2 / c, -p.rho3 / c, 0.0, 0.0},
      {0.0, 0.0, 0.0, 0.0, 1.0},
      {0.0, 0.0, -p.rho4 / p.Dv, p.rho5 / p.Dv, c / p.Dv},
  };
}

/// The Jacobian with the u1 row and column removed; its spectrum plus -1/c is the full one.
inline SquareMatrix wave_submatrix(const WaveParams& wp) {
  const SquareMatrix j = jacobian_disease_free(wp);
  SquareMatrix sub(4);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t col = 0; col < 4; ++col) sub(r, col) = j(r + 1, col + 1);
  return sub;
}

/// Sufficient lower bound c* = Dv + rho4 + rho5.
constexpr double minimal_wave_speed(const ScaledParams& sp) { return sp.Dv + sp.rho4 + sp.rho5; }

/// One inequality lhs > rhs with its evaluated sides.
struct Inequality {
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
};

inline Inequality strictly_greater(double lhs, double rhs) { return {lhs > rhs, lhs, rhs}; }

/// Eigenvalues found inside one disc group and whether they have the nature the
/// disc geometry predicts.
struct GroupClassification {
  std::string name;
  std::vector<std::size_t> discs;
  std::string expected;
  std::string observed;
  std::vector<std::complex<double>> eigenvalues;
  bool consistent = false;
};

struct ConditionReport {
  WaveParams wp;
  Inequality cond1;  ///< rho1 > 1 + c
  Inequality cond2;  ///< rho3 - rho2 > c
  Inequality cond3;  ///< c > c*
  double c_star = 0.0;
  std::vector<Disc> discs;  ///< G1..G4 of the 4x4 submatrix
  DiscPartition partition;
  bool discs_separated = false;  ///< G1 u G2, G3, G4 pairwise strictly disjoint
  std::vector<std::complex<double>> eigenvalues;
  double determinant = 0.0;
  std::size_t positive_real_count = 0;
  std::size_t complex_unstable_count = 0;
  std::vector<GroupClassification> classification;
  std::vector<std::string> diagnostics;
  bool overall = false;
};

namespace detail {

inline std::string describe(const std::vector<std::complex<double>>& eig) {
  if (eig.empty()) return "none";
  std::string out;
  for (const auto& z : eig) {
    if (!out.empty()) out += ", ";
    if (z.imag() != 0.0) {
      out += "complex(Re " + std::string(z.real() < 0.0 ? "<0" : ">=0") + ")";
    } else {
      out += z.real() > 0.0 ? "positive real" : (z.real() < 0.0 ? "negative real" : "zero");
    }
  }
  return out;
}

inline bool strictly_apart(const Disc& x, const Disc& y) {
  return std::abs(x.center - y.center) > x.radius + y.radius;
}

}  // namespace detail

inline ConditionReport check_existence(const WaveParams& wp) {
  validate(wp);
  const ScaledParams& p = wp.sp;
  ConditionReport rep;
  rep.wp = wp;
  rep.c_star = minimal_wave_speed(p);
  rep.cond1 = strictly_greater(p.rho1, 1.0 + wp.c);
  rep.cond2 = strictly_greater(p.rho3 - p.rho2, wp.c);
  rep.cond3 = strictly_greater(wp.c, rep.c_star);

  const SquareMatrix sub = wave_submatrix(wp);
  rep.discs = gershgorin_discs(sub);
  rep.partition = connected_components(rep.discs);
  const auto& g = rep.discs;
  rep.discs_separated = detail::strictly_apart(g[0], g[2]) && detail::strictly_apart(g[1], g[2]) &&
                        detail::strictly_apart(g[0], g[3]) && detail::strictly_apart(g[1], g[3]) &&
                        detail::strictly_apart(g[2], g[3]);

  rep.eigenvalues = eigenvalues(sub);
  rep.determinant = determinant(sub);
  for (const auto& z : rep.eigenvalues) {
    if (!(z.real() > 0.0)) continue;
    if (z.imag() == 0.0)
      ++rep.positive_real_count;
    else
      ++rep.complex_unstable_count;
  }

  const double tol = 1e-8 * std::max(1.0, sub.norm_inf());
  for (const auto& z : rep.eigenvalues) {
    const bool inside = std::any_of(g.begin(), g.end(), [&](const Disc& d) { return d.contains(z, tol); });
    if (!inside) rep.diagnostics.push_back("ContainmentViolation: eigenvalue outside every disc");
  }

  if (rep.discs_separated) {
    struct Spec {
      const char* name;
      std::vector<std::size_t> discs;
      const char* expected;
    };
    const std::array<Spec, 3> specs = {{
        {"G1+G2", {0, 1}, "two eigenvalues with negative real parts (real or a conjugate pair)"},
        {"G3", {2}, "one nonzero real eigenvalue"},
        {"G4", {3}, "one positive real eigenvalue"},
    }};
    for (const Spec& s : specs) {
      GroupClassification gc{s.name, s.discs, s.expected, {}, {}, false};
      for (const auto& z : rep.eigenvalues)
        if (group_contains(g, gc.discs, z, tol)) gc.eigenvalues.push_back(z);
      const auto& e = gc.eigenvalues;
      if (gc.name == "G4") {
        gc.consistent = e.size() == 1 && e[0].imag() == 0.0 && e[0].real() > 0.0;
      } else if (gc.name == "G3") {
        gc.consistent = e.size() == 1 && e[0].imag() == 0.0 && e[0].real() != 0.0;
      } else {
        const bool negative = e.size() == 2 && e[0].real() < 0.0 && e[1].real() < 0.0;
        const bool real_pair = negative && e[0].imag() == 0.0 && e[1].imag() == 0.0;
        const bool conjugate = negative && e[0] == std::conj(e[1]);
        gc.consistent = real_pair || conjugate;
      }
      gc.observed = detail::describe(e);
      if (!gc.consistent)
        rep.diagnostics.push_back("ClassificationMismatch: " + gc.name + " expected " + gc.expected +
                                  ", observed " + gc.observed);
      rep.classification.push_back(std::move(gc));
    }
  } else {
    rep.diagnostics.push_back("discs G1+G2, G3, G4 are not pairwise disjoint; classification undetermined");
  }
  if (rep.determinant == 0.0) rep.diagnostics.push_back("submatrix is numerically singular");

  rep.overall = rep.cond1.holds && rep.cond2.holds && rep.cond3.holds && rep.discs_separated;
  return rep;
}

/// Conditions (i) and (ii) stated on dimensional parameters.
struct DimensionalConditions {
  Inequality cond1;  ///< delta > (1 + c) mu
  Inequality cond2;  ///< R_s - a > c mu
};

inline DimensionalConditions check_existence_dimensional(const ValidatedParams& vp, double c) {
  const DimensionalParams& p = vp.raw();
  return {strictly_greater(p.delta, (1.0 + c) * p.mu), strictly_greater(vp.rs() - p.a, c * p.mu)};
}

enum class Verdict { Converged, Diverged, BudgetExhausted };

constexpr std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Converged: return "Converged";
    case Verdict::Diverged: return "Diverged";
    case Verdict::BudgetExhausted: return "BudgetExhausted";
  }
  return "?";
}

/// Which unstable eigendirection of the disease-free state to launch along.
enum class LaunchDirection {
  Slowest,  ///< smallest positive real eigenvalue
  Fastest,  ///< largest positive real eigenvalue
  Unique,   ///< require exactly one unstable direction
};

struct ShootOptions {
  double epsilon = 1e-6;  ///< launch offset along the unit eigenvector
  double tol = 1e-6;      ///< sup-norm convergence radius around E2*
  double blowup = 1e6;
  double s_max = 1e4;
  double stride = 0.1;  ///< sample spacing in s
  double rtol = 1e-9;
  double atol = 1e-12;
  std::size_t max_steps = 10'000'000;
  LaunchDirection direction = LaunchDirection::Slowest;
};

struct WaveSample {
  double s = 0.0;
  WaveState u{};
};

struct WaveProfile {
  std::vector<WaveSample> samples;
  double c = 0.0;
  double terminal_distance = 0.0;
  Verdict verdict = Verdict::BudgetExhausted;
  double launch_eigenvalue = 0.0;
  std::vector<double> launch_direction;
};

namespace detail {

inline double sup_distance4(const WaveState& u, const WaveState& e) {
  double d = 0.0;
  for (std::size_t i = 0; i < 4; ++i) d = std::max(d, std::abs(u[i] - e[i]));
  return d;
}

// One Dormand-Prince 5(4) step; returns the 5th-order solution and the error estimate.
inline std::pair<WaveState, WaveState> dopri_step(const WaveState& y, double h, const WaveParams& wp) {
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695, e4 = b4 - 393.0 / 640,
                   e5 = b5 - -92097.0 / 339200, e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

  auto combo = [&](std::initializer_list<std::pair<double, const WaveState*>> terms) {
    WaveState out = y;
    for (const auto& [coef, k] : terms)
      for (std::size_t i = 0; i < 5; ++i) out[i] += h * coef * (*k)[i];
    return out;
  };
  const WaveState k1 = wave_rhs(y, wp);
  const WaveState k2 = wave_rhs(combo({{a21, &k1}}), wp);
  const WaveState k3 = wave_rhs(combo({{a31, &k1}, {a32, &k2}}), wp);
  const WaveState k4 = wave_rhs(combo({{a41, &k1}, {a42, &k2}, {a43, &k3}}), wp);
  const WaveState k5 = wave_rhs(combo({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}), wp);
  const WaveState k6 =
      wave_rhs(combo({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}), wp);
  const WaveState next = combo({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
  const WaveState k7 = wave_rhs(next, wp);
  WaveState err{};
  for (std::size_t i = 0; i < 5; ++i)
    err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
  return {next, err};
}

}  // namespace detail

/// Integrates the wave system forward from E1* + epsilon * v, v a unit unstable
/// eigenvector of the disease-free Jacobian with positive u4 component.
inline WaveProfile shoot(const WaveParams& wp, const ShootOptions& opts = {}) {
  validate(wp);
  if (!(opts.tol > 0.0) || !(opts.blowup > 0.0) || !(opts.s_max > 0.0) || !(opts.stride > 0.0) ||
      !(opts.epsilon >= 0.0))
    throw InvalidArgument("shoot options must be positive (epsilon non-negative)");
  const auto [e1, e2] = boundary_states(wp.sp);

  const SquareMatrix jac = jacobian_disease_free(wp);
  constexpr std::size_t kVirusComponent = 3;
  EigenPair launch;
  if (opts.direction == LaunchDirection::Unique) {
    launch = unstable_eigenvector(jac, kVirusComponent);
  } else {
    auto pairs = unstable_eigenpairs(jac, kVirusComponent);
    if (pairs.empty()) throw NoUnstableDirection("no real eigenvalue with positive real part at E1*");
    launch = opts.direction == LaunchDirection::Slowest ? pairs.front() : pairs.back();
  }

  WaveProfile prof;
  prof.c = wp.c;
  prof.launch_eigenvalue = launch.value;
  prof.launch_direction = launch.vector;

  WaveState y = e1;
  for (std::size_t i = 0; i < 5; ++i) y[i] += opts.epsilon * launch.vector[i];
  double s = 0.0;
  prof.samples.push_back({s, y});

  double h = std::min(opts.stride, 1e-2 / std::max(1.0, launch.value));
  double next_sample = opts.stride;
  std::size_t steps = 0;
  auto finish = [&](Verdict v) {
    if (prof.samples.back().s < s) prof.samples.push_back({s, y});
    prof.verdict = v;
    prof.terminal_distance = detail::sup_distance4(y, e2);
    return prof;
  };

  while (true) {
    if (detail::sup_distance4(y, e2) <= opts.tol && std::abs(y[4]) <= 10.0 * opts.tol)
      return finish(Verdict::Converged);
    double norm = 0.0;
    for (double v : y) norm = std::max(norm, std::abs(v));
    if (!std::isfinite(norm) || norm > opts.blowup) return finish(Verdict::Diverged);
    if (s >= opts.s_max || steps >= opts.max_steps) return finish(Verdict::BudgetExhausted);

    const double limit = std::min(next_sample, opts.s_max) - s;
    const double trial = std::min(h, limit);
    const auto [cand, err] = detail::dopri_step(y, trial, wp);
    double err_norm = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
      const double sc = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(cand[i]));
      err_norm = std::max(err_norm, std::abs(err[i]) / sc);
    }
    if (!std::isfinite(err_norm)) err_norm = std::numeric_limits<double>::infinity();
    const double factor =
        err_norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
    if (err_norm <= 1.0) {
      s = (trial == limit) ? std::min(next_sample, opts.s_max) : s + trial;
      y = cand;
      ++steps;
      if (s >= next_sample) {
        prof.samples.push_back({s, y});
        next_sample += opts.stride;
      }
      if (trial == h) h = trial * factor;
      else h = std::max(h, trial * factor);
    } else {
      h = trial * factor;
      if (h < 1e-14 * (1.0 + std::abs(s))) return finish(Verdict::Diverged);
    }
  }
}

struct ComponentMetrics {
  double min = 0.0;
  double max = 0.0;
  bool monotone = true;
};

struct ProfileMetrics {
  std::array<ComponentMetrics, 5> components{};
  /// Largest excursion of u1 outside the range spanned by its end values.
  double hump_height = 0.0;
  double hump_location = 0.0;
  bool u1_non_monotone = false;
};

inline ProfileMetrics profile_metrics(const WaveProfile& p) {
  if (p.samples.empty()) throw InvalidArgument("profile has no samples");
  ProfileMetrics m;
  for (std::size_t k = 0; k < 5; ++k) {
    ComponentMetrics cm{p.samples.front().u[k], p.samples.front().u[k], true};
    bool up = true, down = true;
    for (std::size_t i = 1; i < p.samples.size(); ++i) {
      const double prev = p.samples[i - 1].u[k];
      const double cur = p.samples[i].u[k];
      cm.min = std::min(cm.min, cur);
      cm.max = std::max(cm.max, cur);
      if (cur < prev) up = false;
      if (cur > prev) down = false;
    }
    cm.monotone = up || down;
    m.components[k] = cm;
  }
  const double first = p.samples.front().u[0];
  const double last = p.samples.back().u[0];
  const double hi = std::max(first, last);
  const double lo = std::min(first, last);
  for (const auto& smp : p.samples) {
    const double excursion = std::max(smp.u[0] - hi, lo - smp.u[0]);
    if (excursion > m.hump_height) {
      m.hump_height = excursion;
      m.hump_location = smp.s;
    }
  }
  m.u1_non_monotone = !m.components[0].monotone;
  return m;
}

}  // namespace hbvwave
