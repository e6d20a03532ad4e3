#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace hbvwave {

namespace detail {

inline std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace detail

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
  using Error::Error;
};

class NonPositiveParameter : public Error {
public:
  explicit NonPositiveParameter(std::string name)
      : Error("parameter '" + name + "' must be strictly positive"), name_(std::move(name)) {}
  NonPositiveParameter(std::string name, const std::string& what)
      : Error(what), name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }

private:
  std::string name_;
};

/// R_s = alpha*beta - gamma*(1-alpha) + delta is not positive.
class NonPositiveRs : public Error {
public:
  explicit NonPositiveRs(double value)
      : Error("R_s = " + detail::short_number(value) + " must be strictly positive"), value_(value) {}

  double value() const noexcept { return value_; }

private:
  double value_;
};

class StepTooLarge : public Error {
public:
  using Error::Error;
};

class NoConvergence : public Error {
public:
  explicit NoConvergence(std::size_t iterations)
      : Error("eigenvalue iteration did not converge after " + std::to_string(iterations) +
              " iterations"),
        iterations_(iterations) {}

  std::size_t iterations() const noexcept { return iterations_; }

private:
  std::size_t iterations_;
};

class NoUnstableDirection : public Error {
public:
  NoUnstableDirection() : Error("matrix has no eigenvalue with positive real part") {}
  explicit NoUnstableDirection(const std::string& what) : Error(what) {}
};

class MultipleUnstableDirections : public Error {
public:
  explicit MultipleUnstableDirections(std::size_t count)
      : Error(std::to_string(count) + " eigenvalues with positive real part, expected one"),
        count_(count) {}

  std::size_t count() const noexcept { return count_; }

private:
  std::size_t count_;
};

class NoEndemicEquilibrium : public Error {
public:
  explicit NoEndemicEquilibrium(double r0)
      : Error("no endemic equilibrium: R0 = " + detail::short_number(r0) + " <= 1"), r0_(r0) {}

  double r0() const noexcept { return r0_; }

private:
  double r0_;
};

class StabilityViolation : public Error {
public:
  StabilityViolation(double dt, double dx)
      : Error("explicit step dt = " + detail::short_number(dt) + " exceeds the stability bound for dx = " +
              detail::short_number(dx)),
        dt_(dt), dx_(dx) {}

  double dt() const noexcept { return dt_; }
  double dx() const noexcept { return dx_; }

private:
  double dt_;
  double dx_;
};

class NegativeState : public Error {
public:
  NegativeState(std::size_t node, std::string field, double value)
      : Error("field " + field + " became negative at node " + std::to_string(node) + ": " +
              detail::short_number(value)),
        node_(node), field_(std::move(field)), value_(value) {}

  std::size_t node() const noexcept { return node_; }
  const std::string& field() const noexcept { return field_; }
  double value() const noexcept { return value_; }

private:
  std::size_t node_;
  std::string field_;
  double value_;
};

}  // namespace hbvwave
