#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace arsm {

/// Base of every error raised by the solvers.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameters outside the domain of the requested solution method.
/// `route_hint` names the path that can handle them, when one exists.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what, std::string route_hint = {})
      : Error(what), route_hint_(std::move(route_hint)) {}
  const std::string& route_hint() const noexcept { return route_hint_; }

 private:
  std::string route_hint_;
};

/// g1*g2 = 0 (or g1 = g2 = 0) where a finite product is required.
class DegenerateCoupling : public Error {
 public:
  using Error::Error;
};

/// Energy within the pole guard of a recurrence denominator.
class PoleHit : public Error {
 public:
  PoleHit(const std::string& what, int pole_index, double pole_energy)
      : Error(what), pole_index_(pole_index), pole_energy_(pole_energy) {}
  int pole_index() const noexcept { return pole_index_; }
  double pole_energy() const noexcept { return pole_energy_; }

 private:
  int pole_index_;
  double pole_energy_;
};

class NotConverged : public Error {
 public:
  using Error::Error;
};

class NotARoot : public Error {
 public:
  using Error::Error;
};

class TruncationTooSmall : public Error {
 public:
  using Error::Error;
};

/// Dense eigensolver failure.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, long iterations)
      : Error(what), iterations_(iterations) {}
  long iterations() const noexcept { return iterations_; }

 private:
  long iterations_;
};

class NoRealSolution : public Error {
 public:
  using Error::Error;
};

class BranchEmpty : public Error {
 public:
  using Error::Error;
};

class NoTransition : public Error {
 public:
  using Error::Error;
};

class ComplexFrequency : public Error {
 public:
  using Error::Error;
};

}  // namespace arsm
