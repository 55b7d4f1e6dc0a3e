#pragma once

// The |U| = 1 path. In the sigma_x basis the model reduces to an effective
// oscillator per spin branch,
//
//   [(E + 1 - D/2)(E + D/2) - 2 k a^2] / (E + D/2 + 2 k^2 a^2)
//       = (2n + 1) sqrt((E + D/2 + 2 a^2) / (E + D/2 + 2 k^2 a^2)),
//
// with D = Delta, k = kappa, a = alpha for U = +1. U = -1 follows from
// (Delta, kappa) -> (-Delta, -kappa).

#include <vector>

#include "arsm/model.hpp"

namespace arsm::u1 {

enum class StarkSign : int { Plus = 1, Minus = -1 };
enum class Branch { Lower, Upper };

struct U1Params {
  double delta = 0.0;
  double alpha = 0.0;
  double kappa = 0.0;
  StarkSign u_sign = StarkSign::Plus;

  static U1Params make(double delta, double alpha, double kappa,
                       StarkSign sign);
  void validate() const;

  /// The U = +1 problem with identical levels.
  U1Params as_plus() const;
};

/// Throws DomainError unless |U| = 1 within kUnitStarkTolerance.
U1Params from_model(const ModelParams& p);
ModelParams to_model(const U1Params& p);

/// sqrt((1 - Delta + kappa)/2) for U = +1. Throws NoTransition when the
/// radicand is negative.
double critical_alpha(const U1Params& p);

/// Upper edge of the lower branch, -+Delta/2 - 2 alpha^2 for U = +-1.
double critical_energy(const U1Params& p);

/// Lower edge of the upper branch, -+Delta/2 - 2 kappa^2 alpha^2.
double upper_branch_edge(const U1Params& p);

/// critical_energy - E_n of the lower branch, kept in relative precision.
/// Throws NoRealSolution for alpha >= alpha_c.
double lower_depth(const U1Params& p, int n);

double self_consistent_level(const U1Params& p, int n, Branch branch);

/// sqrt((eps + 2 alpha^2) / (eps + 2 kappa^2 alpha^2)), eps = E +- Delta/2.
/// Throws ComplexFrequency when the ratio is negative or undefined.
double effective_frequency(const U1Params& p, double energy);

/// Closed form at kappa = 1 (the U = +1 equivalent must have kappa = 1),
///   E_n = n +- sqrt((n + Delta/2)^2 + 4 alpha^2 (n + 1)).
double rwa_level(const U1Params& p, long n, Branch branch);

struct GroundIndex {
  enum class Kind { Finite, Unbounded, Degenerate };
  Kind kind = Kind::Finite;
  long n = 0;           // argmin over the sampled n
  double energy = 0.0;  // E_n, or the n -> infinity limit when Unbounded
};

GroundIndex rwa_ground_index(const U1Params& p, long n_max);

struct GapSample {
  double alpha = 0.0;
  double gap = 0.0;  // E_1 - E_0 of the lower branch
};

struct GapFit {
  std::vector<GapSample> samples;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double alpha_min = 0.0;
  double alpha_max = 0.0;
  /// r^2 >= 0.9999 and the window ends within 1e-2 of alpha_c.
  bool reliable = false;
};

/// Log-log fit of the lower-branch gap against alpha_c - alpha, sampled at
/// n_samples log-spaced distances in [dist_min, dist_max].
GapFit gap_fit(const U1Params& p, double dist_min, double dist_max,
               int n_samples);

struct BranchLevel {
  int n = 0;
  double energy = 0.0;
};

struct BranchSpectrum {
  Branch branch = Branch::Lower;
  std::vector<BranchLevel> levels;
  double critical_alpha = 0.0;  // NaN when there is no transition
  double upper_bound = 0.0;     // critical_energy
};

/// Levels n = 0..n_levels-1; the lower branch is empty at alpha >= alpha_c.
BranchSpectrum branch_spectrum(const U1Params& p, Branch branch, int n_levels);

}  // namespace arsm::u1
