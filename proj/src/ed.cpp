#include "arsm/ed.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "arsm/errors.hpp"

namespace arsm::ed {

namespace {

int truncation_from_dim(Eigen::Index dim) {
  if (dim < 2 || dim % 2 != 0) {
    throw DomainError("matrix dimension must be 2 (n_truncation + 1)");
  }
  return static_cast<int>(dim / 2) - 1;
}

void check_truncation(int n_truncation) {
  if (n_truncation < 0) {
    throw DomainError("n_truncation must be non-negative");
  }
}

std::vector<Eigen::Index> block_indices(int n_truncation, int parity_sign) {
  const Eigen::VectorXd pi = parity_diagonal(n_truncation);
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < pi.size(); ++i) {
    if (pi(i) == parity_sign) idx.push_back(i);
  }
  return idx;
}

std::vector<double> block_eigenvalues(const Eigen::MatrixXd& h,
                                      const std::vector<Eigen::Index>& idx) {
  const auto k = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd b(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) b(i, j) = h(idx[i], idx[j]);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NoConvergence("parity-block eigensolver failed", 0);
  }
  const Eigen::VectorXd& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

// One diagonal k = m - n >= 0 of <m|D(a)|n>, n = 0..len-1.
void fill_diagonal(Eigen::MatrixXd& d, double a, int k, int len, bool lower) {
  const double x = a * a;
  double t0 = std::exp(k * std::log(std::abs(a)) - 0.5 * std::lgamma(k + 1.0) -
                       0.5 * x);
  if (a < 0.0 && k % 2 == 1) t0 = -t0;
  auto put = [&](int n, double v) {
    if (lower) {
      d(n + k, n) = v;
    } else {
      d(n, n + k) = v;
    }
  };
  put(0, t0);
  if (len == 1) return;
  double prev = t0;
  double cur = (1.0 + k - x) * t0 / std::sqrt(1.0 + k);
  put(1, cur);
  for (int n = 1; n + 1 < len; ++n) {
    const double next = ((2.0 * n + 1.0 + k - x) * cur -
                         std::sqrt(static_cast<double>(n) * (n + k)) * prev) /
                        std::sqrt((n + 1.0) * (n + 1.0 + k));
    put(n + 1, next);
    prev = cur;
    cur = next;
  }
}

}  // namespace

Eigen::MatrixXd hamiltonian_matrix(const ModelParams& p, int n_truncation) {
  p.validate();
  check_truncation(n_truncation);
  const int dim = 2 * (n_truncation + 1);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (int n = 0; n <= n_truncation; ++n) {
    const double shift = 0.5 * p.delta + p.stark_u * n;
    h(basis_index(n, true), basis_index(n, true)) = n + shift;
    h(basis_index(n, false), basis_index(n, false)) = n - shift;
    if (n < n_truncation) {
      const double root = std::sqrt(n + 1.0);
      const int dn1 = basis_index(n + 1, false), up0 = basis_index(n, true);
      const int up1 = basis_index(n + 1, true), dn0 = basis_index(n, false);
      h(dn1, up0) = h(up0, dn1) = p.g1 * root;
      h(up1, dn0) = h(dn0, up1) = p.g2 * root;
    }
  }
  return h;
}

Eigen::VectorXd parity_diagonal(int n_truncation) {
  check_truncation(n_truncation);
  Eigen::VectorXd pi(2 * (n_truncation + 1));
  for (int n = 0; n <= n_truncation; ++n) {
    const double s = n % 2 == 0 ? 1.0 : -1.0;
    pi(basis_index(n, true)) = -s;
    pi(basis_index(n, false)) = s;
  }
  return pi;
}

EdResult eigensolve(const Eigen::MatrixXd& h, bool keep_vectors) {
  const int n_tr = truncation_from_dim(h.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  if (es.info() != Eigen::Success) {
    throw NoConvergence("dense symmetric eigensolver failed", 0);
  }
  const Eigen::VectorXd pi = parity_diagonal(n_tr);
  EdResult r;
  r.n_truncation = n_tr;
  const auto& ev = es.eigenvalues();
  const auto& vec = es.eigenvectors();
  r.energies.assign(ev.data(), ev.data() + ev.size());
  r.parities.resize(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    r.parities[i] = vec.col(i).cwiseAbs2().dot(pi);
  }
  if (keep_vectors) r.vectors = vec;
  return r;
}

EdResult solve(const ModelParams& p, int n_truncation, bool check_convergence,
               bool keep_vectors) {
  EdResult r = eigensolve(hamiltonian_matrix(p, n_truncation), keep_vectors);
  if (check_convergence) {
    const auto big = solve_parity_blocks(p, 2 * n_truncation);
    std::vector<double> merged = big.even;
    merged.insert(merged.end(), big.odd.begin(), big.odd.end());
    std::sort(merged.begin(), merged.end());
    int count = 0;
    while (count < static_cast<int>(r.energies.size()) &&
           std::abs(r.energies[count] - merged[count]) < kConvergenceTol) {
      ++count;
    }
    r.converged_count = count;
  }
  return r;
}

ParityBlocks solve_parity_blocks(const ModelParams& p, int n_truncation) {
  const Eigen::MatrixXd h = hamiltonian_matrix(p, n_truncation);
  return {block_eigenvalues(h, block_indices(n_truncation, 1)),
          block_eigenvalues(h, block_indices(n_truncation, -1))};
}

Eigen::MatrixXd displaced_overlap_matrix(double w, int size) {
  if (size < 1) throw DomainError("size must be at least 1");
  if (w == 0.0) return Eigen::MatrixXd::Identity(size, size);
  Eigen::MatrixXd d(size, size);
  const double a = -w;
  for (int k = 0; k < size; ++k) {
    fill_diagonal(d, a, k, size - k, true);
    // <m|D(a)|n> for m < n equals <n|D(-a)|m>.
    if (k > 0) fill_diagonal(d, -a, k, size - k, false);
  }
  return d;
}

Eigen::VectorXd boa_fock_state(const ModelParams& p,
                               const boa::CoefficientTable& table,
                               int n_truncation) {
  check_truncation(n_truncation);
  const DerivedParams dp = derive(p);
  const int fock = n_truncation + 1;
  const int last = std::min(table.n_used, static_cast<int>(table.te.size()) - 1);

  // The series terms must become negligible inside the Fock space.
  double peak = 0.0;
  int decayed_at = -1;
  for (int n = 0; n <= last; ++n) {
    const double term = std::max(std::abs(table.te[n]), std::abs(table.tf[n]));
    peak = std::max(peak, term);
    if (term < 1e-10 * peak) {
      decayed_at = n;
      break;
    }
  }
  if (decayed_at < 0 || decayed_at >= fock) {
    std::ostringstream os;
    os << "BOA series terms stay above 1e-10 within " << fock
       << " Fock states";
    throw TruncationTooSmall(os.str());
  }

  // Amplitudes sqrt(n!) e_n, sqrt(n!) f_n; the forward recursion picks up
  // the dominant solution beyond their minimum.
  const double log_w = std::log(table.w);
  auto log_factor = [&](int n) { return 0.5 * std::lgamma(n + 1.0) - n * log_w; };
  int cut = 0;
  double best = HUGE_VAL;
  for (int n = 0; n <= last; ++n) {
    const double amp = std::max(std::abs(table.te[n]), std::abs(table.tf[n]));
    const double v = amp > 0.0 ? std::log(amp) + log_factor(n) : -HUGE_VAL;
    if (v < best) {
      best = v;
      cut = n;
    }
  }
  cut = std::min(cut, fock - 1);

  Eigen::VectorXd ea(cut + 1), fa(cut + 1);
  for (int n = 0; n <= cut; ++n) {
    const double s = std::exp(log_factor(n));
    ea(n) = s * table.te[n];
    fa(n) = s * table.tf[n];
  }
  const Eigen::MatrixXd d =
      displaced_overlap_matrix(dp.w, std::max(fock, cut + 1))
          .topLeftCorner(fock, cut + 1);
  const Eigen::VectorXd phi1 = d * ea;
  const Eigen::VectorXd phi2 = d * fa;

  Eigen::VectorXd psi(2 * fock);
  const double up_scale = 1.0 / std::sqrt(2.0 * dp.r);
  const double dn_scale = 1.0 / std::sqrt(2.0);
  for (int n = 0; n < fock; ++n) {
    psi(basis_index(n, true)) = up_scale * (phi1(n) - phi2(n));
    psi(basis_index(n, false)) = dn_scale * (phi1(n) + phi2(n));
  }
  return psi.normalized();
}

double fidelity(const boa::CoefficientTable& table, const ModelParams& p,
                const Eigen::VectorXd& ed_vector, double root_tol) {
  const double ge = std::abs(boa::series_value(table, Parity::Even));
  const double go = std::abs(boa::series_value(table, Parity::Odd));
  if (!(std::min(ge, go) < root_tol)) {
    std::ostringstream os;
    os.precision(17);
    os << "E = " << table.energy << " is not a root of either G-function";
    throw NotARoot(os.str());
  }
  const int n_tr = truncation_from_dim(ed_vector.size());
  const Eigen::VectorXd psi = boa_fock_state(p, table, n_tr);
  const double ov = psi.dot(ed_vector) / ed_vector.norm();
  return std::min(1.0, ov * ov);
}

}  // namespace arsm::ed
