#pragma once

// Displaced-oscillator (Bogoliubov operator) expansion for |U| < 1.
//
// The eigenstate is expanded in number states of A = a + w,
//   |psi> = ( sum_n sqrt(n!) e_n |n>_A ,  sum_n sqrt(n!) f_n |n>_A )^T,
// in the frame rotated by P = [[sqrt r, 1], [-sqrt r, 1]] / sqrt 2. Starting
// from f_0 = 1, e_{-1} = f_{-1} = 0 the pair (e_m, f_m) follows from the
// Lambda-free combination of the two projected Schroedinger equations at m
// together with the second projected equation at m - 1. The regular spectrum
// is the zero set of
//   G_even(E) = sum_n (e_n - f_n) w^n,   G_odd(E) = sum_n (e_n + f_n) w^n.

#include <vector>

#include "arsm/model.hpp"

namespace arsm::boa {

struct Options {
  int max_terms = 400;
  /// Relative size below which a series term counts as negligible.
  double tol = 1e-15;
  /// Minimum distance in energy to any pole before PoleHit is raised.
  double pole_guard = 1e-8;
  /// GValue::near_pole is set inside this band (>= pole_guard).
  double near_pole_band = 1e-6;
  /// Stop at the first pole inside the guard instead of throwing; the table
  /// is then terminated with Termination::PoleProximity.
  bool stop_at_pole = false;
};

enum class Termination { Converged, MaxTerms, PoleProximity };

struct CoefficientTable {
  /// Series terms e_n w^n and f_n w^n. The recursion runs on these, so they
  /// stay finite even when w is tiny and e_n, f_n themselves overflow.
  std::vector<double> te;
  std::vector<double> tf;
  /// Bare coefficients e_n, f_n (may be +-inf for very small w).
  std::vector<double> e;
  std::vector<double> f;
  int n_used = 0;  // index of the last stored coefficient
  Termination terminated_on = Termination::MaxTerms;
  double energy = 0.0;
  double w = 0.0;
  /// Pole index that stopped the recursion (PoleProximity only).
  int pole_index = -1;
};

struct GValue {
  double value = 0.0;
  Parity parity = Parity::Even;
  double truncation_estimate = 0.0;
  bool near_pole = false;
  int n_used = 0;
};

/// Both parities from a single coefficient run.
struct GPair {
  GValue even;
  GValue odd;
};

/// e_n, f_n until both e_n w^n and f_n w^n are negligible for four
/// consecutive n. Throws PoleHit, or DomainError/DegenerateCoupling from
/// derive(); NotConverged is not raised (see terminated_on).
CoefficientTable coefficients(const ModelParams& p, double energy,
                              const Options& opt = {});

/// Throws NotConverged when max_terms is reached before four consecutive
/// negligible terms.
GValue g_function(const ModelParams& p, double energy, Parity parity,
                  const Options& opt = {});

GPair g_functions(const ModelParams& p, double energy, const Options& opt = {});

/// Coefficients of a verified eigenstate. Throws NotARoot when
/// |G_parity(energy)| >= root_tol.
CoefficientTable eigenvector_coefficients(const ModelParams& p, double energy,
                                          Parity parity,
                                          const Options& opt = {},
                                          double root_tol = 1e-8);

/// Largest residual of the two raw projected Schroedinger equations over
/// m = 0..n_used-1, each scaled by max(|e_m|, |f_m|, 1). Evaluated on the
/// series terms, i.e. with both sides multiplied by w^m.
double projection_residual(const ModelParams& p, const CoefficientTable& t);

/// Consistency condition of the pole-m equations at E = E_m^pole, divided
/// by a positive scale built from the coefficient magnitudes; it vanishes
/// exactly where a doubly degenerate level sits on the pole line.
/// Requires m >= 1.
double pole_consistency(const ModelParams& p, int m, const Options& opt = {});

/// Sum of the stored series for the given parity, sum_n (e_n -+ f_n) w^n.
double series_value(const CoefficientTable& t, Parity parity);

}  // namespace arsm::boa
