#pragma once

// Independent reference computations and frozen values used by the tests.
// Nothing here calls into the library's numerical kernels.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <vector>

#include "hbvwave/model.hpp"
#include "hbvwave/spectral.hpp"
#include "hbvwave/wave.hpp"

namespace oracle {

// Frozen with mpmath at 30 digits from the tabulated dimensional values.
namespace table1 {
inline constexpr double kRs = 0.61038;
inline constexpr double kRho1 = 5.3;
inline constexpr double kRho2 = 15000.0;
inline constexpr double kRho3 = 61.038;
inline constexpr double kRho4 = 30.22032;
inline constexpr double kRho5 = 380.0;
inline constexpr double kDv = 8e-4;
inline constexpr double kR0 = 3.68748749903726;
inline constexpr double kT1 = 0.27118736002795;
inline constexpr double kI1 = 0.13751181886265;
inline constexpr double kD1 = 33.793330104848633;
inline constexpr double kV1 = 2.68748749903726;
inline constexpr double kEAlpha = -1.04869097938989;
inline constexpr double kEBeta = -0.14027327238769;
inline constexpr double kEGamma = 0.22710442675055;
inline constexpr double kEDelta = -1.08683115436286;
}  // namespace table1

namespace reference {
inline constexpr double kR0 = 1.04996546166245;  // 570 / 542.875
inline constexpr double kT1 = 0.95241228070175;
inline constexpr double kI1 = 0.00221338229294;
inline constexpr double kD1 = 0.00131488057006;
inline constexpr double kV1 = 0.04996546166245;
// Spectrum of the 5x5 Jacobian at E1* with Dv = 0.1, c = 20 (mpmath.eig, 30 digits).
inline constexpr std::array<double, 5> kJacobianSpectrum = {-2.5051638006460342791, -1.1210384974753806272, -0.05,
                                                            0.0012071711077290462474, 200.02499512701368586};
inline constexpr double kSubmatrixDet = 217.0 / 320.0;  // exact, sympy
}  // namespace reference

// Reaction system at (rho1..rho5) = (21.5, 30, 50.5, 19, 0.5) from (0.9, 0.01, 0.02, 0.5),
// integrated with mpmath's Taylor method to 1e-25.
inline constexpr std::array<double, 4> kReactionAtOne = {0.72744034025232536686, 0.015723380791796377436,
                                                         0.009379221271737086179, 0.4602844776319487786};
inline constexpr std::array<double, 4> kReactionStart = {0.9, 0.01, 0.02, 0.5};

inline hbvwave::ScaledParams reference_params() { return {21.5, 30.0, 50.5, 19.0, 0.5, 0.1}; }

inline hbvwave::DimensionalParams table1_params() {
  return {2.6e7, 1.67e-12, 0.01, 0.053, 150.0, 0.6931, 0.8, 0.87, 3.8, 0.08};
}

/// Determinant of a complex matrix by Gaussian elimination with partial pivoting.
inline std::complex<double> complex_det(std::vector<std::complex<double>> m, std::size_t n) {
  std::complex<double> det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(m[i * n + k]) > std::abs(m[p * n + k])) p = i;
    if (std::abs(m[p * n + k]) == 0.0) return 0.0;
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m[k * n + j], m[p * n + j]);
      det = -det;
    }
    det *= m[k * n + k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const auto f = m[i * n + k] / m[k * n + k];
      for (std::size_t j = k; j < n; ++j) m[i * n + j] -= f * m[k * n + j];
    }
  }
  return det;
}

/// |det(A - z I)| for a row-major real matrix.
inline double char_poly_abs(const std::vector<std::vector<double>>& a, std::complex<double> z) {
  const std::size_t n = a.size();
  std::vector<std::complex<double>> m(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i * n + j] = a[i][j] - (i == j ? z : 0.0);
  return std::abs(complex_det(std::move(m), n));
}

/// Classical RK4 on the 4-dim reaction system, fixed step.
inline std::array<double, 4> reaction_ode(std::array<double, 4> y, const hbvwave::ScaledParams& p, double t_end,
                                          std::size_t steps) {
  auto f = [&](const std::array<double, 4>& u) {
    return std::array<double, 4>{1.0 - u[0] - u[3] * u[0], u[3] * u[0] - p.rho1 * u[1], p.rho2 * u[1] - p.rho3 * u[2],
                                 p.rho4 * u[2] - p.rho5 * u[3]};
  };
  const double h = t_end / static_cast<double>(steps);
  for (std::size_t s = 0; s < steps; ++s) {
    auto add = [&](const std::array<double, 4>& k, double w) {
      std::array<double, 4> r{};
      for (int i = 0; i < 4; ++i) r[i] = y[i] + w * k[i];
      return r;
    };
    const auto k1 = f(y);
    const auto k2 = f(add(k1, h / 2));
    const auto k3 = f(add(k2, h / 2));
    const auto k4 = f(add(k3, h));
    for (int i = 0; i < 4; ++i) y[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }
  return y;
}

/// Central-difference Jacobian of the traveling-wave right-hand side.
inline std::vector<std::vector<double>> fd_wave_jacobian(const hbvwave::WaveState& u, const hbvwave::WaveParams& wp,
                                                         double h = 1e-6) {
  std::vector<std::vector<double>> jac(5, std::vector<double>(5));
  for (std::size_t j = 0; j < 5; ++j) {
    auto up = u, dn = u;
    up[j] += h;
    dn[j] -= h;
    const auto fu = hbvwave::wave_rhs(up, wp);
    const auto fd = hbvwave::wave_rhs(dn, wp);
    for (std::size_t i = 0; i < 5; ++i) jac[i][j] = (fu[i] - fd[i]) / (2 * h);
  }
  return jac;
}

/// Dense uniform entries; `spread` pulls the diagonal apart so discs tend to separate.
inline hbvwave::SquareMatrix random_matrix(std::mt19937_64& rng, std::size_t n, bool spread) {
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  hbvwave::SquareMatrix a(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = u(rng);
  if (spread) {
    // Push diagonal entries apart and shrink the rest so discs separate.
    std::uniform_real_distribution<double> shrink(0.0, 0.3);
    const double s = shrink(rng);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) a(i, j) = i == j ? a(i, j) + 12.0 * static_cast<double>(i) : s * a(i, j);
  }
  return a;
}

/// Log-uniform draw in [lo, hi].
inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

/// Random dimensional parameters with R_s > 0, spanning several decades.
inline hbvwave::DimensionalParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (true) {
    hbvwave::DimensionalParams p{log_uniform(rng, 1e3, 1e8),   log_uniform(rng, 1e-13, 1e-9), log_uniform(rng, 1e-3, 1.0),
                                 log_uniform(rng, 1e-3, 1.0),  log_uniform(rng, 1.0, 500.0),  log_uniform(rng, 1e-2, 5.0),
                                 0.01 + 0.99 * unit(rng),       log_uniform(rng, 1e-2, 5.0),   log_uniform(rng, 0.1, 20.0),
                                 log_uniform(rng, 1e-3, 1.0)};
    if (hbvwave::capsid_removal_rate(p) > 0.0) return p;
  }
}

}  // namespace oracle
