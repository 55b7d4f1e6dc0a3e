#pragma once

// Exact diagonalization in the truncated Fock x spin basis.
//
// Basis ordering: index 2n + 0 is |n, up>, index 2n + 1 is |n, down>,
// n = 0..n_truncation. The parity operator is diagonal in this basis with
// entries (-1)^(n + (s+1)/2), i.e. -1 for |0, up> and +1 for |0, down>.

#include <vector>

#include <Eigen/Dense>

#include "arsm/boa.hpp"
#include "arsm/model.hpp"

namespace arsm::ed {

/// Level agreement required between truncations N and 2N.
inline constexpr double kConvergenceTol = 1e-8;

inline constexpr int kDefaultTruncation = 200;
inline constexpr int kUnitStarkTruncation = 600;

constexpr int basis_index(int n, bool up) { return 2 * n + (up ? 0 : 1); }

Eigen::MatrixXd hamiltonian_matrix(const ModelParams& p, int n_truncation);

Eigen::VectorXd parity_diagonal(int n_truncation);

struct EdResult {
  std::vector<double> energies;  // ascending
  std::vector<double> parities;  // <Pi> per eigenvector
  int n_truncation = 0;
  /// Leading levels that moved by less than kConvergenceTol when the
  /// truncation was doubled; -1 when the check was not run.
  int converged_count = -1;
  /// Eigenvectors as columns (empty unless requested).
  Eigen::MatrixXd vectors;
};

/// Dense symmetric eigendecomposition; the matrix must come from
/// hamiltonian_matrix (its size fixes the parity operator). Throws
/// NoConvergence.
EdResult eigensolve(const Eigen::MatrixXd& h, bool keep_vectors = false);

/// eigensolve at n_truncation, plus the truncation-doubling check when
/// `check_convergence` is set.
EdResult solve(const ModelParams& p, int n_truncation,
               bool check_convergence = true, bool keep_vectors = false);

struct ParityBlocks {
  std::vector<double> even;
  std::vector<double> odd;
};

/// Eigenvalues of the two parity blocks, each ascending.
ParityBlocks solve_parity_blocks(const ModelParams& p, int n_truncation);

/// Entries <m|D(-w)|n>, m, n = 0..size-1, of the real displacement
/// D(a) = exp(a a^dag - a a), by the normalized Laguerre recurrence along
/// each diagonal.
Eigen::MatrixXd displaced_overlap_matrix(double w, int size);

/// Normalized bare-basis state of a BOA eigenvector table. The A-basis sum
/// is cut where the amplitudes sqrt(n!) e_n, sqrt(n!) f_n are smallest.
/// Throws TruncationTooSmall when the series terms never fall below 1e-10
/// within the Fock space.
Eigen::VectorXd boa_fock_state(const ModelParams& p,
                               const boa::CoefficientTable& table,
                               int n_truncation);

/// Squared overlap of the assembled BOA state with an ED eigenvector of
/// matching size. Throws NotARoot when table.energy is not a root of
/// either parity.
double fidelity(const boa::CoefficientTable& table, const ModelParams& p,
                const Eigen::VectorXd& ed_vector, double root_tol = 1e-8);

}  // namespace arsm::ed
