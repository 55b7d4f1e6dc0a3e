#pragma once

// Pole ladder, G-function root finding and level crossings for |U| < 1.

#include <optional>
#include <vector>

#include "arsm/boa.hpp"
#include "arsm/model.hpp"

namespace arsm::spectrum {

struct PoleLadder {
  double first_pole = 0.0;            // E_0^pole
  std::vector<double> regular_poles;  // E_m^pole, m = 1..M
};

PoleLadder poles(const ModelParams& p, int m_max);

struct Level {
  double energy = 0.0;
  Parity parity = Parity::Even;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int iterations = 0;
  double residual = 0.0;  // |G(energy)|
  /// Zero of |G| without sign change, located by a local minimum.
  bool tangency = false;
  /// Found only after shrinking the pole guard below its default.
  bool near_pole = false;
  /// A level of the other parity sits within kDegeneracyTol.
  bool degenerate = false;
};

struct SpectrumResult {
  std::vector<Level> levels;  // ascending in energy
  int g_evaluations = 0;
  int failed_points = 0;  // scan points where G did not converge
};

struct FindOptions {
  boa::Options boa;
  double root_tol = 1e-10;
  /// Same-parity roots closer than this are merged.
  double level_merge_tol = 1e-9;
  /// Smallest pole guard tried when looking for roots hugging a pole.
  double min_guard = 1e-12;
  /// |G| at a local minimum below which a tangency root is reported.
  double tangency_tol = 1e-8;
};

inline constexpr double kDegeneracyTol = 1e-8;

/// Roots of G_parity in [e_lo, e_hi], scanned on `scan_points` uniformly
/// spaced energies split at every pole and refined by bisection.
SpectrumResult find_levels(const ModelParams& p, double e_lo, double e_hi,
                           Parity parity, int scan_points,
                           const FindOptions& opt = {});

/// Both parities merged; marks cross-parity degeneracies.
SpectrumResult find_spectrum(const ModelParams& p, double e_lo, double e_hi,
                             int scan_points, const FindOptions& opt = {});

/// A lower bound for the spectrum, used as the start of level searches.
double spectrum_floor(const ModelParams& p);

/// The lowest `count` levels of one parity, widening the energy window
/// until enough are found. `points_per_unit` sets the scan density.
std::vector<Level> lowest_levels(const ModelParams& p, Parity parity,
                                 int count, int points_per_unit = 400,
                                 const FindOptions& opt = {});

enum class CrossingKind { FirstOrderQPT, Juddian };

struct CrossingPoint {
  double g1_critical = 0.0;
  double energy = 0.0;
  int pole_index = 0;
  CrossingKind kind = CrossingKind::FirstOrderQPT;
  /// Gap between the two crossing levels (ED path only).
  double gap = 0.0;
};

/// Radicand of the critical coupling, Delta (1-U^2) / (U (1+r^2) + 1 - r^2).
double critical_radicand(const CouplingFamily& fam);

/// g1c of the ground-state crossing, with energy E_0^pole(g1c); empty when
/// the radicand is not finite and positive.
std::optional<CrossingPoint> first_order_critical(const CouplingFamily& fam);

/// Couplings where a level pair meets the pole line m: the consistency
/// condition of the pole-m equations vanishes there.
std::vector<CrossingPoint> juddian_crossings(const CouplingFamily& fam,
                                             int pole_index, double g1_lo,
                                             double g1_hi,
                                             int scan_points = 200,
                                             const boa::Options& opt = {});

struct EdCrossingOptions {
  int n_truncation = 300;
  int scan_points = 41;
  double g1_tol = 1e-12;
  /// Parity gaps below this are treated as unresolved on the scan grid.
  double resolution = 1e-9;
};

/// Ground-state crossing located by ED: the first sign change of
/// E_even,0 - E_odd,0 between resolved grid points, refined by bisection.
std::optional<CrossingPoint> crossing_via_ed(const CouplingFamily& fam,
                                             double g1_lo, double g1_hi,
                                             const EdCrossingOptions& opt = {});

}  // namespace arsm::spectrum
