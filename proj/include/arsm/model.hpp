#pragma once

// Parameter records of the anisotropic Rabi-Stark Hamiltonian
//
//   H = (Delta/2 + U a^dag a) sigma_z + a^dag a
//       + g1 (a^dag sigma_- + a sigma_+) + g2 (a^dag sigma_+ + a sigma_-)
//
// with the cavity frequency fixed to 1. Every quantity is in these units.

#include <string_view>

namespace arsm {

/// |U| within this distance above 1 is snapped to the |U| = 1 path.
inline constexpr double kUnitStarkTolerance = 1e-12;

enum class Parity : int { Even = 1, Odd = -1 };

constexpr int sign(Parity p) noexcept { return static_cast<int>(p); }
constexpr Parity opposite(Parity p) noexcept {
  return p == Parity::Even ? Parity::Odd : Parity::Even;
}
std::string_view to_string(Parity p) noexcept;

enum class SolverPath { Boa, UnitStark };

struct ModelParams {
  double delta = 0.0;
  double g1 = 0.0;
  double g2 = 0.0;
  double stark_u = 0.0;

  /// Validating constructor; throws DomainError on negative couplings,
  /// non-finite input or |U| > 1.
  static ModelParams make(double delta, double g1, double g2, double stark_u);

  void validate() const;
};

/// Boa for |U| < 1, UnitStark for |U| = 1 (see kUnitStarkTolerance).
SolverPath route(const ModelParams& p);

/// Quantities derived from the couplings that the displaced-oscillator
/// expansion needs.
struct DerivedParams {
  double r = 0.0;             // g2 / g1
  double lambda_plus = 0.0;   // (g1^2 + g2^2) / 2
  double lambda_minus = 0.0;  // (g1^2 - g2^2) / 2
  double beta = 0.0;          // sqrt(g1 g2)
  double w = 0.0;             // beta / sqrt(1 - U^2)
  double alpha = 0.0;         // (g1 + g2) / 2
  double kappa = 0.0;         // (g1 - g2) / (g1 + g2)
  double root_one_minus_u2 = 1.0;
};

/// Throws DomainError when |U| >= 1 (with a route hint towards the unit
/// Stark solver) and DegenerateCoupling when g1 g2 = 0.
DerivedParams derive(const ModelParams& p);

struct AlphaKappa {
  double alpha = 0.0;
  double kappa = 0.0;
};

/// alpha = (g1+g2)/2, kappa alpha = (g1-g2)/2. Throws DegenerateCoupling
/// when g1 = g2 = 0.
AlphaKappa to_alpha_kappa(const ModelParams& p);

struct Couplings {
  double g1 = 0.0;
  double g2 = 0.0;
};

Couplings from_alpha_kappa(double alpha, double kappa);

/// A one-parameter family of models at fixed (Delta, U, r), swept in g1.
struct CouplingFamily {
  double delta = 0.0;
  double stark_u = 0.0;
  double ratio = 1.0;  // r = g2 / g1

  ModelParams at(double g1) const {
    return ModelParams::make(delta, g1, ratio * g1, stark_u);
  }
};

}  // namespace arsm
