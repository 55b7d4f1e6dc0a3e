#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "arsm/boa.hpp"
#include "arsm/ed.hpp"
#include "arsm/errors.hpp"
#include "arsm/spectrum.hpp"
#include "oracles/displacement_expm.hpp"

using namespace arsm;
using namespace arsm::ed;

namespace {

const ModelParams kRef = ModelParams::make(0.7, 0.8, 0.4, 0.2);

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("decoupled matrix is diagonal") {
  const auto p = ModelParams::make(0.7, 0.0, 0.0, 0.3);
  const auto h = hamiltonian_matrix(p, 12);
  CHECK(max_abs(h - Eigen::MatrixXd(h.diagonal().asDiagonal())) == 0.0);
  for (int n = 0; n <= 12; ++n) {
    CHECK(h(basis_index(n, true), basis_index(n, true)) == n + (0.35 + 0.3 * n));
    CHECK(h(basis_index(n, false), basis_index(n, false)) == n - (0.35 + 0.3 * n));
  }
}

TEST_CASE("coupling entries") {
  const auto h = hamiltonian_matrix(kRef, 10);
  for (int n = 0; n < 10; ++n) {
    CHECK(h(basis_index(n + 1, false), basis_index(n, true)) ==
          doctest::Approx(0.8 * std::sqrt(n + 1.0)));
    CHECK(h(basis_index(n + 1, true), basis_index(n, false)) ==
          doctest::Approx(0.4 * std::sqrt(n + 1.0)));
  }
}

TEST_CASE("property: H is symmetric and commutes with parity exactly") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> d(-1.0, 2.0), g(0.0, 2.0), u(-1.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const auto p = ModelParams::make(d(rng), g(rng), g(rng), u(rng));
    const auto h = hamiltonian_matrix(p, 40);
    CHECK(max_abs(h - h.transpose()) == 0.0);
    const Eigen::MatrixXd pi = parity_diagonal(40).asDiagonal();
    CHECK(max_abs(h * pi - pi * h) == 0.0);
  }
}

TEST_CASE("2x2 case") {
  const auto r = eigensolve(hamiltonian_matrix(ModelParams::make(0.9, 0.5, 0.3, 0.0), 0));
  REQUIRE(r.energies.size() == 2);
  CHECK(r.energies[0] == doctest::Approx(-0.45).epsilon(1e-15));
  CHECK(r.energies[1] == doctest::Approx(0.45).epsilon(1e-15));
  CHECK_THROWS_AS(eigensolve(Eigen::MatrixXd::Zero(3, 3)), DomainError);
  CHECK_THROWS_AS(hamiltonian_matrix(kRef, -1), DomainError);
}

TEST_CASE("parity blocks merge into the full spectrum") {
  const auto full = solve(kRef, 120, false);
  const auto b = solve_parity_blocks(kRef, 120);
  std::vector<double> merged = b.even;
  merged.insert(merged.end(), b.odd.begin(), b.odd.end());
  std::sort(merged.begin(), merged.end());
  REQUIRE(merged.size() == full.energies.size());
  for (std::size_t i = 0; i < merged.size(); ++i) {
    CHECK(std::abs(merged[i] - full.energies[i]) < 1e-12 * std::max(1.0, std::abs(merged[i])));
  }
  CHECK(std::is_sorted(full.energies.begin(), full.energies.end()));
}

TEST_CASE("truncation convergence and parity purity at the reference point") {
  const auto r = solve(kRef, kDefaultTruncation, true);
  CHECK(r.converged_count >= 20);
  const auto big = solve(kRef, 2 * kDefaultTruncation, false);
  for (int i = 0; i < r.converged_count; ++i) {
    CHECK(std::abs(r.energies[i] - big.energies[i]) < kConvergenceTol);
    CHECK(std::abs(r.parities[i]) > 1 - 1e-8);
  }
  CHECK(solve(kRef, 50, false).converged_count == -1);
}

TEST_CASE("property: ground energy is non-increasing in the truncation") {
  for (double r : {0.5, 2.0}) {
    const auto p = ModelParams::make(0.7, 0.8, 0.8 * r, 0.2);
    double prev = HUGE_VAL;
    for (int n : {2, 5, 10, 20, 40, 80, 160}) {
      const double e0 = solve(p, n, false).energies.front();
      CHECK(e0 <= prev + 1e-13);
      prev = e0;
    }
  }
}

TEST_CASE("displaced overlap matrix") {
  SUBCASE("w = 0 is the identity") {
    CHECK(max_abs(displaced_overlap_matrix(0.0, 30) - Eigen::MatrixXd::Identity(30, 30)) == 0.0);
  }
  SUBCASE("column 0 is a coherent state") {
    const double w = 0.7;
    const auto d = displaced_overlap_matrix(w, 40);
    for (int m = 0; m < 40; ++m) {
      const double ref = std::exp(-0.5 * w * w) * std::pow(-w, m) /
                         std::exp(0.5 * std::lgamma(m + 1.0));
      CHECK(std::abs(d(m, 0) - ref) < 1e-15);
    }
  }
  SUBCASE("oracle: matrix exponential") {
    for (double w : {0.2, 0.5773502691896258, 1.3}) {
      const auto d = displaced_overlap_matrix(w, 60);
      CHECK(max_abs(d - oracle::displacement_expm(w, 60)) < 1e-12);
    }
    const auto big = displaced_overlap_matrix(1.0, 300);
    CHECK(max_abs(big - oracle::displacement_expm(1.0, 300, 120)) < 1e-11);
  }
  SUBCASE("D(w) D(-w) = I within truncation") {
    const double w = 0.5773502691896258;
    const Eigen::MatrixXd prod =
        displaced_overlap_matrix(w, 120) * displaced_overlap_matrix(-w, 120);
    CHECK(max_abs(prod.topLeftCorner(60, 60) - Eigen::MatrixXd::Identity(60, 60)) < 1e-12);
  }
  SUBCASE("orthogonality on the inner block") {
    // Truncation leakage grows like (w sqrt(size))^10 / 10!.
    for (auto [w, size] : {std::pair{0.1, 201}, std::pair{0.05, 400}, std::pair{0.2, 50}}) {
      const auto d = displaced_overlap_matrix(w, size);
      const int k = size - 10;
      const Eigen::MatrixXd dtd = d.transpose() * d;
      CHECK(max_abs(dtd.topLeftCorner(k, k) - Eigen::MatrixXd::Identity(k, k)) < 1e-8);
    }
  }
  SUBCASE("orthogonality on the columns a reference-point state uses") {
    const double w = 0.5773502691896258;
    const auto d = displaced_overlap_matrix(w, 201);
    const Eigen::MatrixXd dtd = d.leftCols(40).transpose() * d.leftCols(40);
    CHECK(max_abs(dtd - Eigen::MatrixXd::Identity(40, 40)) < 1e-8);
  }
  CHECK_THROWS_AS(displaced_overlap_matrix(0.3, 0), DomainError);
}

TEST_CASE("fidelity of the BOA ground state") {
  const auto ed = solve(kRef, kDefaultTruncation, false, true);
  const auto lv = spectrum::lowest_levels(kRef, Parity::Even, 1);
  REQUIRE(std::abs(lv[0].energy - ed.energies[0]) < 1e-9);
  const auto t = boa::eigenvector_coefficients(kRef, lv[0].energy, Parity::Even);
  CHECK(fidelity(t, kRef, ed.vectors.col(0)) >= 1 - 1e-8);
  CHECK(fidelity(t, kRef, ed.vectors.col(1)) < 0.5);
  CHECK(fidelity(t, kRef, ed.vectors.col(2)) < 0.5);
}

TEST_CASE("fidelity in the decoupled limit") {
  const auto p = ModelParams::make(1.0, 1e-4, 1e-4, 0.0);
  const auto ed = solve(p, 40, false, true);
  const auto lv = spectrum::lowest_levels(p, Parity::Even, 1);
  const auto t = boa::eigenvector_coefficients(p, lv[0].energy, Parity::Even);
  CHECK(fidelity(t, p, ed.vectors.col(0)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fidelity errors") {
  const auto ed = solve(kRef, 5, false, true);
  const auto lv = spectrum::lowest_levels(kRef, Parity::Even, 1);
  const auto t = boa::eigenvector_coefficients(kRef, lv[0].energy, Parity::Even);
  CHECK_THROWS_AS(fidelity(t, kRef, ed.vectors.col(0)), TruncationTooSmall);
  const auto off = boa::coefficients(kRef, 0.3);
  const auto ed200 = solve(kRef, 200, false, true);
  CHECK_THROWS_AS(fidelity(off, kRef, ed200.vectors.col(0)), NotARoot);
}
