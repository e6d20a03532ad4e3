#pragma once

// Parameters, nondimensionalization, basic reproduction number, equilibria and
// elasticities of the HBV capsid-recycling model.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "hbvwave/errors.hpp"

namespace hbvwave {

/// Dimensional model parameters (per-day rates, concentration units).
struct DimensionalParams {
  double lambda_ = 0.0;  ///< growth rate of uninfected hepatocytes
  double k = 0.0;        ///< infection rate per virion
  double mu = 0.0;       ///< uninfected hepatocyte death rate
  double delta = 0.0;    ///< infected hepatocyte death rate
  double a = 0.0;        ///< capsid production rate
  double gamma = 0.0;    ///< capsid recycling rate
  double alpha = 0.0;    ///< volume fraction of capsids used for virus production, in (0, 1]
  double beta = 0.0;     ///< virus production rate
  double delta_v = 0.0;  ///< virus clearance rate
  double d_v = 0.0;      ///< virus diffusion coefficient

  friend bool operator==(const DimensionalParams&, const DimensionalParams&) = default;
};

enum class Parameter { lambda_, k, mu, delta, a, gamma, alpha, beta, delta_v, d_v };

inline constexpr std::array<Parameter, 10> kAllParameters = {
    Parameter::lambda_, Parameter::k,     Parameter::mu,   Parameter::delta,   Parameter::a,
    Parameter::gamma,   Parameter::alpha, Parameter::beta, Parameter::delta_v, Parameter::d_v};

constexpr std::string_view parameter_name(Parameter p) {
  switch (p) {
    case Parameter::lambda_: return "lambda_";
    case Parameter::k: return "k";
    case Parameter::mu: return "mu";
    case Parameter::delta: return "delta";
    case Parameter::a: return "a";
    case Parameter::gamma: return "gamma";
    case Parameter::alpha: return "alpha";
    case Parameter::beta: return "beta";
    case Parameter::delta_v: return "delta_v";
    case Parameter::d_v: return "d_v";
  }
  return "?";
}

/// Accepts the field names; "lambda" is taken as an alias for "lambda_".
inline std::optional<Parameter> parse_parameter(std::string_view name) {
  if (name == "lambda") return Parameter::lambda_;
  for (Parameter p : kAllParameters)
    if (parameter_name(p) == name) return p;
  return std::nullopt;
}

constexpr double& field(DimensionalParams& p, Parameter which) {
  switch (which) {
    case Parameter::lambda_: return p.lambda_;
    case Parameter::k: return p.k;
    case Parameter::mu: return p.mu;
    case Parameter::delta: return p.delta;
    case Parameter::a: return p.a;
    case Parameter::gamma: return p.gamma;
    case Parameter::alpha: return p.alpha;
    case Parameter::beta: return p.beta;
    case Parameter::delta_v: return p.delta_v;
    case Parameter::d_v: return p.d_v;
  }
  return p.d_v;
}

constexpr double field(const DimensionalParams& p, Parameter which) {
  return field(const_cast<DimensionalParams&>(p), which);
}

/// Net capsid removal rate R_s = alpha*beta - gamma*(1-alpha) + delta.
constexpr double capsid_removal_rate(const DimensionalParams& p) {
  return p.alpha * p.beta - p.gamma * (1.0 - p.alpha) + p.delta;
}

/// Parameters that passed the positivity and R_s > 0 gate. Only validate() builds one.
class ValidatedParams {
public:
  const DimensionalParams& raw() const noexcept { return params_; }
  double rs() const noexcept { return rs_; }

private:
  ValidatedParams(const DimensionalParams& p, double rs) : params_(p), rs_(rs) {}
  friend ValidatedParams validate(const DimensionalParams& p);

  DimensionalParams params_;
  double rs_;
};

inline ValidatedParams validate(const DimensionalParams& p) {
  for (Parameter which : kAllParameters) {
    const double v = field(p, which);
    if (!std::isfinite(v) || !(v > 0.0)) throw NonPositiveParameter(std::string(parameter_name(which)));
  }
  if (p.alpha > 1.0)
    throw NonPositiveParameter("alpha", "parameter 'alpha' must lie in (0, 1]");
  const double rs = capsid_removal_rate(p);
  if (!(rs > 0.0)) throw NonPositiveRs(rs);
  return ValidatedParams(p, rs);
}

/// Dimensionless parameters of the scaled system.
struct ScaledParams {
  double rho1 = 0.0;  ///< delta / mu
  double rho2 = 0.0;  ///< a / mu
  double rho3 = 0.0;  ///< R_s / mu
  double rho4 = 0.0;  ///< k alpha beta lambda / mu^3
  double rho5 = 0.0;  ///< delta_v / mu
  double Dv = 0.0;    ///< mu d_v

  friend bool operator==(const ScaledParams&, const ScaledParams&) = default;
};

/// Positivity gate for scaled parameters. Dv = 0 is allowed only when `allow_zero_diffusion`.
inline const ScaledParams& validate(const ScaledParams& sp, bool allow_zero_diffusion = false) {
  const std::array<std::pair<const char*, double>, 5> rhos = {
      {{"rho1", sp.rho1}, {"rho2", sp.rho2}, {"rho3", sp.rho3}, {"rho4", sp.rho4}, {"rho5", sp.rho5}}};
  for (const auto& [name, v] : rhos)
    if (!std::isfinite(v) || !(v > 0.0)) throw NonPositiveParameter(name);
  const bool dv_ok = allow_zero_diffusion ? sp.Dv >= 0.0 : sp.Dv > 0.0;
  if (!std::isfinite(sp.Dv) || !dv_ok) throw NonPositiveParameter("Dv");
  return sp;
}

inline ScaledParams scale(const ValidatedParams& vp) {
  const DimensionalParams& p = vp.raw();
  const double mu3 = p.mu * p.mu * p.mu;
  return ScaledParams{
      .rho1 = p.delta / p.mu,
      .rho2 = p.a / p.mu,
      .rho3 = vp.rs() / p.mu,
      .rho4 = p.k * p.alpha * p.beta * p.lambda_ / mu3,
      .rho5 = p.delta_v / p.mu,
      .Dv = p.mu * p.d_v,
  };
}

/// R0 = rho2 rho4 / (rho1 rho3 rho5).
constexpr double basic_reproduction_number(const ScaledParams& sp) {
  return (sp.rho2 * sp.rho4) / (sp.rho1 * sp.rho3 * sp.rho5);
}

/// Dimensional form a k lambda alpha beta / (R_s delta delta_v mu).
inline double basic_reproduction_number(const ValidatedParams& vp) {
  const DimensionalParams& p = vp.raw();
  return (p.a * p.k * p.lambda_ * p.alpha * p.beta) / (vp.rs() * p.delta * p.delta_v * p.mu);
}

/// State (T1, I1, D1, V1) of the scaled reaction system.
struct EquilibriumPoint {
  double T1 = 0.0;
  double I1 = 0.0;
  double D1 = 0.0;
  double V1 = 0.0;

  friend bool operator==(const EquilibriumPoint&, const EquilibriumPoint&) = default;
};

struct Equilibria {
  EquilibriumPoint disease_free;
  std::optional<EquilibriumPoint> endemic;  ///< present iff R0 > 1 (strict)
};

inline Equilibria equilibria(const ScaledParams& sp) {
  Equilibria eq{.disease_free = {1.0, 0.0, 0.0, 0.0}, .endemic = std::nullopt};
  const double gain = sp.rho2 * sp.rho4;
  const double loss = sp.rho1 * sp.rho3 * sp.rho5;
  if (!(gain > loss)) return eq;
  const double excess = gain - loss;
  eq.endemic = EquilibriumPoint{
      .T1 = loss / gain,
      .I1 = excess / (sp.rho1 * sp.rho2 * sp.rho4),
      .D1 = excess / (sp.rho1 * sp.rho3 * sp.rho4),
      .V1 = excess / loss,
  };
  return eq;
}

/// Elasticities of R0 with respect to alpha, beta and gamma.
struct ElasticityReport {
  double e_alpha = 0.0;
  double e_beta = 0.0;
  double e_gamma = 0.0;
};

inline ElasticityReport elasticities(const ValidatedParams& vp) {
  const DimensionalParams& p = vp.raw();
  const double rs = vp.rs();
  return ElasticityReport{
      .e_alpha = (p.delta - p.gamma) / rs,
      .e_beta = ((p.alpha - 1.0) * p.gamma + p.delta) / rs,
      .e_gamma = p.gamma * (1.0 - p.alpha) / rs,
  };
}

/// Closed-form elasticity of R0 for any single dimensional parameter.
inline double elasticity(const ValidatedParams& vp, Parameter which) {
  const DimensionalParams& p = vp.raw();
  const ElasticityReport e = elasticities(vp);
  switch (which) {
    case Parameter::lambda_:
    case Parameter::k:
    case Parameter::a: return 1.0;
    case Parameter::mu:
    case Parameter::delta_v: return -1.0;
    case Parameter::delta: return -1.0 - p.delta / vp.rs();
    case Parameter::alpha: return e.e_alpha;
    case Parameter::beta: return e.e_beta;
    case Parameter::gamma: return e.e_gamma;
    case Parameter::d_v: return 0.0;
  }
  return 0.0;
}

/// Central-difference elasticity (p/R0)(R0(p+hp) - R0(p-hp))/(2hp), h a relative step in (0, 1e-3].
inline double elasticity_fd(const ValidatedParams& vp, Parameter which, double h) {
  if (!(h > 0.0) || h > 1e-3) throw InvalidArgument("relative step h must lie in (0, 1e-3]");
  const double base = field(vp.raw(), which);
  auto r0_at = [&](double value) {
    DimensionalParams q = vp.raw();
    field(q, which) = value;
    try {
      return basic_reproduction_number(validate(q));
    } catch (const Error& e) {
      throw StepTooLarge(std::string("perturbing '") + std::string(parameter_name(which)) +
                         "' leaves the valid parameter set: " + e.what());
    }
  };
  const double step = h * base;
  const double up = r0_at(base + step);
  const double down = r0_at(base - step);
  return (base / basic_reproduction_number(vp)) * (up - down) / (2.0 * step);
}

}  // namespace hbvwave
