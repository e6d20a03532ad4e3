#pragma once

// Method-of-lines solver for the scaled reaction-diffusion system on [0, L]
// with zero-flux boundaries. Only V1 diffuses.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hbvwave/errors.hpp"
#include "hbvwave/model.hpp"

namespace hbvwave {

/// Uniform grid with nodes x_i = i * dx, i = 0..nx-1.
struct Grid {
  double L = 1.0;
  std::size_t nx = 201;

  double dx() const { return L / static_cast<double>(nx - 1); }
  double x(std::size_t i) const { return static_cast<double>(i) * dx(); }
};

inline const Grid& validate(const Grid& g) {
  if (g.nx < 3) throw InvalidArgument("grid needs at least 3 nodes, got " + std::to_string(g.nx));
  if (!std::isfinite(g.L) || !(g.L > 0.0)) throw InvalidArgument("domain length L must be positive");
  return g;
}

struct FieldState {
  double t = 0.0;
  std::vector<double> T1, I1, D1, V1;

  std::size_t size() const { return V1.size(); }
};

inline constexpr std::array<std::string_view, 4> kFieldNames = {"T1", "I1", "D1", "V1"};

struct InitialConditionSpec {
  double T0 = 1.0;
  double I0 = 0.0;
  double D0 = 0.0;
  double V0 = 1.0;
  double epsilon = 0.02;  ///< Gaussian width parameter
};

inline const InitialConditionSpec& validate(const InitialConditionSpec& ic) {
  for (double amp : {ic.T0, ic.I0, ic.D0, ic.V0})
    if (!std::isfinite(amp) || amp < 0.0) throw InvalidArgument("initial amplitudes must be non-negative");
  if (!std::isfinite(ic.epsilon) || !(ic.epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  return ic;
}

/// Gaussian infection seed at x = 0; uninfected cells are depleted there.
inline FieldState initial_state(const Grid& grid, const InitialConditionSpec& ic) {
  validate(grid);
  validate(ic);
  FieldState s;
  s.t = 0.0;
  s.T1.resize(grid.nx);
  s.I1.resize(grid.nx);
  s.D1.resize(grid.nx);
  s.V1.resize(grid.nx);
  for (std::size_t i = 0; i < grid.nx; ++i) {
    const double x = grid.x(i);
    const double bump = std::exp(-x * x / ic.epsilon);
    s.T1[i] = ic.T0 * (1.0 - bump);
    s.I1[i] = ic.I0 * bump;
    s.D1[i] = ic.D0 * bump;
    s.V1[i] = ic.V0 * bump;
  }
  return s;
}

/// Uniform state at an equilibrium point.
inline FieldState uniform_state(const Grid& grid, const EquilibriumPoint& e, double t = 0.0) {
  validate(grid);
  return FieldState{t, std::vector<double>(grid.nx, e.T1), std::vector<double>(grid.nx, e.I1),
                    std::vector<double>(grid.nx, e.D1), std::vector<double>(grid.nx, e.V1)};
}

/// Reaction terms at one node: (dT1, dI1, dD1, dV1).
inline std::array<double, 4> reaction_at(const std::array<double, 4>& u, const ScaledParams& sp) {
  const auto [T, I, D, V] = u;
  return {1.0 - T - V * T, V * T - sp.rho1 * I, sp.rho2 * I - sp.rho3 * D, sp.rho4 * D - sp.rho5 * V};
}

struct FieldDerivative {
  std::vector<double> dT1, dI1, dD1, dV1;
};

inline FieldDerivative reaction_rhs(const FieldState& s, const ScaledParams& sp) {
  const std::size_t n = s.size();
  FieldDerivative d{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n),
                    std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = reaction_at({s.T1[i], s.I1[i], s.D1[i], s.V1[i]}, sp);
    d.dT1[i] = r[0];
    d.dI1[i] = r[1];
    d.dD1[i] = r[2];
    d.dV1[i] = r[3];
  }
  return d;
}

/// Second difference with ghost-node reflection at both ends (zero flux).
inline void apply_laplacian(std::span<const double> v, double dx, std::span<double> out) {
  const std::size_t n = v.size();
  const double inv = 1.0 / (dx * dx);
  out[0] = 2.0 * (v[1] - v[0]) * inv;
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (v[i - 1] - 2.0 * v[i] + v[i + 1]) * inv;
  out[n - 1] = 2.0 * (v[n - 2] - v[n - 1]) * inv;
}

inline std::vector<double> diffusion_operator(std::span<const double> v, const Grid& grid) {
  validate(grid);
  if (v.size() != grid.nx) throw InvalidArgument("field length does not match the grid");
  std::vector<double> out(v.size());
  apply_laplacian(v, grid.dx(), out);
  return out;
}

struct BoundaryFlux {
  double left = 0.0;
  double right = 0.0;
};

/// One-sided second-order estimates of dV1/dx at x = 0 and x = L.
inline BoundaryFlux boundary_flux(const FieldState& s, const Grid& grid) {
  validate(grid);
  const auto& v = s.V1;
  const std::size_t n = v.size();
  const double h = 2.0 * grid.dx();
  // Differences are taken first so constant fields give exactly zero.
  return {(4.0 * (v[1] - v[0]) - (v[2] - v[0])) / h, (4.0 * (v[n - 1] - v[n - 2]) - (v[n - 1] - v[n - 3])) / h};
}

enum class Scheme {
  Explicit,  ///< classical RK4 on the full semi-discrete system
  Imex,      ///< Strang splitting (Crank-Nicolson diffusion, RK4 reactions) with Richardson extrapolation
};

constexpr std::string_view scheme_name(Scheme s) { return s == Scheme::Explicit ? "explicit" : "imex"; }

/// dt limit enforced for the explicit scheme: 0.9 dx^2 / (2 Dv).
inline double explicit_stability_bound(const Grid& grid, double Dv) {
  if (!(Dv > 0.0)) return std::numeric_limits<double>::infinity();
  const double dx = grid.dx();
  return 0.9 * dx * dx / (2.0 * Dv);
}

/// A step size that resolves the fastest linear reaction rate; explicit runs also
/// stay at half the diffusion bound.
inline double default_time_step(const ScaledParams& sp, const Grid& grid, Scheme scheme) {
  const double fastest = std::max({1.0, sp.rho1, sp.rho3, sp.rho5, std::sqrt(sp.rho2 * sp.rho4)});
  double dt = std::min(0.02, 1.0 / fastest);
  if (scheme == Scheme::Explicit) dt = std::min(dt, 0.5 * explicit_stability_bound(grid, sp.Dv));
  return dt;
}

/// Advances field states in time. One stepper per simulation; not shared between threads.
class Stepper {
public:
  static constexpr double kClampFloor = -1e-12;

  Stepper(const ScaledParams& sp, const Grid& grid, Scheme scheme)
      : sp_(validate(sp, /*allow_zero_diffusion=*/true)), grid_(validate(grid)), scheme_(scheme),
        dx_(grid.dx()) {}

  void advance(FieldState& s, double dt) {
    if (!std::isfinite(dt) || !(dt > 0.0)) throw InvalidArgument("time step must be positive");
    if (s.size() != grid_.nx) throw InvalidArgument("state does not match the grid");
    if (scheme_ == Scheme::Explicit) {
      if (dt > explicit_stability_bound(grid_, sp_.Dv)) throw StabilityViolation(dt, dx_);
      explicit_rk4(s, dt);
    } else {
      imex_extrapolated(s, dt);
    }
    s.t += dt;
    enforce_non_negative(s);
  }

  std::size_t clamp_count() const noexcept { return clamps_; }
  /// Nodes where the IMEX extrapolation fell back to the fine solution.
  std::size_t limiter_count() const noexcept { return limited_; }
  Scheme scheme() const noexcept { return scheme_; }

private:
  struct Tridiagonal {
    double theta = 0.0;  // solves (I - theta Dv L) x = b
    std::vector<double> c_prime;
    std::vector<double> inv_denom;
  };

  void explicit_rk4(FieldState& s, double dt) {
    const std::size_t n = grid_.nx;
    const std::size_t m = 4 * n;
    std::vector<double> y(m), k1(m), k2(m), k3(m), k4(m), tmp(m);
    pack(s, y);
    auto rhs = [&](const std::vector<double>& u, std::vector<double>& out) {
      for (std::size_t i = 0; i < n; ++i) {
        const auto r = reaction_at({u[i], u[n + i], u[2 * n + i], u[3 * n + i]}, sp_);
        for (std::size_t f = 0; f < 4; ++f) out[f * n + i] = r[f];
      }
      if (sp_.Dv > 0.0) {
        lap_.resize(n);
        apply_laplacian(std::span<const double>(u.data() + 3 * n, n), dx_, lap_);
        for (std::size_t i = 0; i < n; ++i) out[3 * n + i] += sp_.Dv * lap_[i];
      }
    };
    rhs(y, k1);
    for (std::size_t j = 0; j < m; ++j) tmp[j] = y[j] + 0.5 * dt * k1[j];
    rhs(tmp, k2);
    for (std::size_t j = 0; j < m; ++j) tmp[j] = y[j] + 0.5 * dt * k2[j];
    rhs(tmp, k3);
    for (std::size_t j = 0; j < m; ++j) tmp[j] = y[j] + dt * k3[j];
    rhs(tmp, k4);
    for (std::size_t j = 0; j < m; ++j) y[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    unpack(y, s);
  }

  // Nodewise RK4 on the reaction system.
  void react(FieldState& s, double h) const {
    for (std::size_t i = 0; i < s.size(); ++i) {
      const std::array<double, 4> y{s.T1[i], s.I1[i], s.D1[i], s.V1[i]};
      auto shifted = [&](const std::array<double, 4>& k, double f) {
        return std::array<double, 4>{y[0] + f * k[0], y[1] + f * k[1], y[2] + f * k[2], y[3] + f * k[3]};
      };
      const auto k1 = reaction_at(y, sp_);
      const auto k2 = reaction_at(shifted(k1, 0.5 * h), sp_);
      const auto k3 = reaction_at(shifted(k2, 0.5 * h), sp_);
      const auto k4 = reaction_at(shifted(k3, h), sp_);
      std::array<double, 4> out{};
      for (std::size_t f = 0; f < 4; ++f) out[f] = y[f] + h / 6.0 * (k1[f] + 2.0 * k2[f] + 2.0 * k3[f] + k4[f]);
      s.T1[i] = out[0];
      s.I1[i] = out[1];
      s.D1[i] = out[2];
      s.V1[i] = out[3];
    }
  }

  const Tridiagonal& factor(double theta) {
    for (const auto& f : factors_)
      if (f.theta == theta) return f;
    const std::size_t n = grid_.nx;
    const double r = theta * sp_.Dv / (dx_ * dx_);
    // row 0: (1+2r, -2r); rows 1..n-2: (-r, 1+2r, -r); row n-1: (-2r, 1+2r)
    Tridiagonal f{theta, std::vector<double>(n), std::vector<double>(n)};
    const double diag = 1.0 + 2.0 * r;
    auto lower = [&](std::size_t i) { return i == n - 1 ? -2.0 * r : -r; };
    auto upper = [&](std::size_t i) { return i == 0 ? -2.0 * r : -r; };
    double denom = diag;
    f.inv_denom[0] = 1.0 / denom;
    f.c_prime[0] = upper(0) / denom;
    for (std::size_t i = 1; i < n; ++i) {
      denom = diag - lower(i) * f.c_prime[i - 1];
      f.inv_denom[i] = 1.0 / denom;
      f.c_prime[i] = i + 1 < n ? upper(i) / denom : 0.0;
    }
    if (factors_.size() > 8) factors_.erase(factors_.begin());
    factors_.push_back(std::move(f));
    return factors_.back();
  }

  // Crank-Nicolson over h: (I - h/2 Dv L) V+ = (I + h/2 Dv L) V.
  void diffuse(std::vector<double>& v, double h) {
    if (!(sp_.Dv > 0.0)) return;
    const std::size_t n = v.size();
    const double theta = 0.5 * h;
    lap_.resize(n);
    apply_laplacian(v, dx_, lap_);
    rhs_.resize(n);
    for (std::size_t i = 0; i < n; ++i) rhs_[i] = v[i] + theta * sp_.Dv * lap_[i];
    const Tridiagonal& f = factor(theta);
    const double r = theta * sp_.Dv / (dx_ * dx_);
    auto lower = [&](std::size_t i) { return i == n - 1 ? -2.0 * r : -r; };
    v[0] = rhs_[0] * f.inv_denom[0];
    for (std::size_t i = 1; i < n; ++i) v[i] = (rhs_[i] - lower(i) * v[i - 1]) * f.inv_denom[i];
    for (std::size_t i = n - 1; i-- > 0;) v[i] -= f.c_prime[i] * v[i + 1];
  }

  void strang(FieldState& s, double h) {
    diffuse(s.V1, 0.5 * h);
    react(s, h);
    diffuse(s.V1, 0.5 * h);
  }

  void imex_extrapolated(FieldState& s, double dt) {
    FieldState coarse = s;
    strang(coarse, dt);
    strang(s, 0.5 * dt);
    strang(s, 0.5 * dt);
    // Where the combination undershoots zero the fine value is kept.
    auto extrapolate = [this](std::vector<double>& fine, const std::vector<double>& c) {
      for (std::size_t i = 0; i < fine.size(); ++i) {
        const double x = (4.0 * fine[i] - c[i]) / 3.0;
        if (x < 0.0 && fine[i] >= 0.0) {
          ++limited_;
          continue;
        }
        fine[i] = x;
      }
    };
    extrapolate(s.T1, coarse.T1);
    extrapolate(s.I1, coarse.I1);
    extrapolate(s.D1, coarse.D1);
    extrapolate(s.V1, coarse.V1);
  }

  void enforce_non_negative(FieldState& s) {
    std::array<std::vector<double>*, 4> fields{&s.T1, &s.I1, &s.D1, &s.V1};
    for (std::size_t f = 0; f < 4; ++f) {
      auto& v = *fields[f];
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i]))
          throw NegativeState(i, std::string(kFieldNames[f]), v[i]);
        if (v[i] < 0.0) {
          if (v[i] < kClampFloor) throw NegativeState(i, std::string(kFieldNames[f]), v[i]);
          v[i] = 0.0;
          ++clamps_;
        }
      }
    }
  }

  static void pack(const FieldState& s, std::vector<double>& y) {
    const std::size_t n = s.size();
    std::copy(s.T1.begin(), s.T1.end(), y.begin());
    std::copy(s.I1.begin(), s.I1.end(), y.begin() + static_cast<std::ptrdiff_t>(n));
    std::copy(s.D1.begin(), s.D1.end(), y.begin() + static_cast<std::ptrdiff_t>(2 * n));
    std::copy(s.V1.begin(), s.V1.end(), y.begin() + static_cast<std::ptrdiff_t>(3 * n));
  }

  static void unpack(const std::vector<double>& y, FieldState& s) {
    const std::size_t n = s.size();
    auto at = [&](std::size_t f) { return y.begin() + static_cast<std::ptrdiff_t>(f * n); };
    std::copy(at(0), at(1), s.T1.begin());
    std::copy(at(1), at(2), s.I1.begin());
    std::copy(at(2), at(3), s.D1.begin());
    std::copy(at(3), at(4), s.V1.begin());
  }

  ScaledParams sp_;
  Grid grid_;
  Scheme scheme_;
  double dx_;
  std::size_t clamps_ = 0;
  std::size_t limited_ = 0;
  std::vector<Tridiagonal> factors_;
  std::vector<double> lap_, rhs_;
};

/// Single step from a fresh stepper.
inline FieldState step(const FieldState& s, const ScaledParams& sp, const Grid& grid, double dt,
                       Scheme scheme) {
  FieldState out = s;
  Stepper(sp, grid, scheme).advance(out, dt);
  return out;
}

struct SimulationOptions {
  double tmax = 0.0;
  double out_every = 1.0;
  Scheme scheme = Scheme::Imex;
  double dt = 0.0;  ///< 0 selects default_time_step()
};

struct SpaceTimeSeries {
  Grid grid;
  ScaledParams params;
  Scheme scheme = Scheme::Imex;
  double dt = 0.0;
  std::vector<FieldState> snapshots;
  std::vector<BoundaryFlux> fluxes;  ///< one per snapshot
  std::size_t clamp_count = 0;
  std::size_t limiter_count = 0;
};

/// Output times 0, out_every, 2 out_every, ... up to tmax (tmax itself always included).
inline std::vector<double> output_times(double tmax, double out_every) {
  std::vector<double> times{0.0};
  if (!(tmax > 0.0)) return times;
  for (std::size_t k = 1;; ++k) {
    const double t = static_cast<double>(k) * out_every;
    if (t >= tmax * (1.0 - 1e-12)) break;
    times.push_back(t);
  }
  times.push_back(tmax);
  return times;
}

/// Runs from `init` (or the Gaussian seed) and records snapshots at output_times().
inline SpaceTimeSeries simulate(const ScaledParams& sp, const Grid& grid, const FieldState& init,
                                const SimulationOptions& opts) {
  validate(grid);
  if (!std::isfinite(opts.tmax) || opts.tmax < 0.0) throw InvalidArgument("tmax must be non-negative");
  if (!std::isfinite(opts.out_every) || !(opts.out_every > 0.0))
    throw InvalidArgument("output interval must be positive");
  Stepper stepper(sp, grid, opts.scheme);
  const double dt = opts.dt > 0.0 ? opts.dt : default_time_step(sp, grid, opts.scheme);

  SpaceTimeSeries out{grid, sp, opts.scheme, dt, {}, {}, 0, 0};
  FieldState state = init;
  state.t = 0.0;
  const std::vector<double> times = output_times(opts.tmax, opts.out_every);
  out.snapshots.push_back(state);
  out.fluxes.push_back(boundary_flux(state, grid));
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double span = times[k] - times[k - 1];
    const auto n = static_cast<std::size_t>(std::ceil(span / dt - 1e-9));
    const double h = span / static_cast<double>(std::max<std::size_t>(n, 1));
    for (std::size_t j = 0; j < std::max<std::size_t>(n, 1); ++j) stepper.advance(state, h);
    state.t = times[k];
    out.snapshots.push_back(state);
    out.fluxes.push_back(boundary_flux(state, grid));
  }
  out.clamp_count = stepper.clamp_count();
  out.limiter_count = stepper.limiter_count();
  return out;
}

inline SpaceTimeSeries simulate(const ScaledParams& sp, const Grid& grid, const InitialConditionSpec& ic,
                                const SimulationOptions& opts) {
  return simulate(sp, grid, initial_state(grid, ic), opts);
}

/// Extent dx * #{i : V_i > max(V)/2}.
inline double half_max_width(std::span<const double> v, const Grid& grid) {
  if (v.empty()) return 0.0;
  const double half = 0.5 * *std::max_element(v.begin(), v.end());
  const auto count = std::count_if(v.begin(), v.end(), [&](double x) { return x > half; });
  return static_cast<double>(count) * grid.dx();
}

/// Index of the first maximum.
inline std::size_t peak_node(std::span<const double> v) {
  return static_cast<std::size_t>(std::distance(v.begin(), std::max_element(v.begin(), v.end())));
}

/// Sup-norm distance of all four fields to a uniform equilibrium.
inline double distance_to(const FieldState& s, const EquilibriumPoint& e) {
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    d = std::max({d, std::abs(s.T1[i] - e.T1), std::abs(s.I1[i] - e.I1), std::abs(s.D1[i] - e.D1),
                  std::abs(s.V1[i] - e.V1)});
  }
  return d;
}

}  // namespace hbvwave
