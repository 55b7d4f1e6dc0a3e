#pragma once

// Brute-force expansion coefficients. H is written out as a matrix in the
// number basis of A = a + w (a = A - w), rotated by the spin transform P,
// and the projected equations <m|(H - E)|psi> = 0 are solved as one linear
// system for e_0..e_N, f_1..f_N with f_0 = 1. Nothing here uses the
// closed-form recurrence of the library.

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

namespace oracle {

struct Coefficients {
  std::vector<double> e;
  std::vector<double> f;
};

inline Coefficients projection_coefficients(double delta, double g1, double g2,
                                            double u, double energy, int n_max) {
  const double w = std::sqrt(g1 * g2) / std::sqrt(1.0 - u * u);
  const double r = g2 / g1;
  const int k = n_max + 3;

  Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(k, k);
  for (int n = 1; n < k; ++n) lower(n - 1, n) = std::sqrt(double(n));
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(k, k);
  const Eigen::MatrixXd a = lower - w * id;
  const Eigen::MatrixXd ad = a.transpose();
  const Eigen::MatrixXd num = ad * a;

  Eigen::Matrix2d sz, sp, sm, i2;
  sz << 1, 0, 0, -1;
  sp << 0, 1, 0, 0;  // |up><down|
  sm = sp.transpose();
  i2.setIdentity();

  using Eigen::kroneckerProduct;
  Eigen::MatrixXd h = kroneckerProduct(Eigen::MatrixXd(0.5 * delta * id + u * num), sz);
  h += kroneckerProduct(num, i2);
  h += g1 * (Eigen::MatrixXd(kroneckerProduct(ad, sm)) + Eigen::MatrixXd(kroneckerProduct(a, sp)));
  h += g2 * (Eigen::MatrixXd(kroneckerProduct(ad, sp)) + Eigen::MatrixXd(kroneckerProduct(a, sm)));
  h -= energy * Eigen::MatrixXd::Identity(2 * k, 2 * k);

  // (up, down) = Pinv (phi1, phi2)
  Eigen::Matrix2d pinv;
  pinv << 1.0 / std::sqrt(2.0 * r), -1.0 / std::sqrt(2.0 * r),
      1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const Eigen::Matrix2d pm = pinv.inverse();
  const Eigen::MatrixXd m =
      Eigen::MatrixXd(kroneckerProduct(id, pm)) * h *
      Eigen::MatrixXd(kroneckerProduct(id, pinv));

  // Unknowns are the amplitudes sqrt(n!) x_n, which stay moderate.
  auto col = [&](int n, int c) { return m.col(2 * n + c); };

  const int unknowns = 2 * n_max + 1;  // e_0..e_N, f_1..f_N
  Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(unknowns, unknowns);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(unknowns);
  auto fill_row = [&](int out_row, const Eigen::RowVectorXd& weights_rows,
                      const std::vector<int>& rows) {
    for (int n = 0; n <= n_max; ++n) {
      const Eigen::VectorXd ce = col(n, 0);
      const Eigen::VectorXd cf = col(n, 1);
      double ve = 0.0, vf = 0.0;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        ve += weights_rows(i) * ce(rows[i]);
        vf += weights_rows(i) * cf(rows[i]);
      }
      sys(out_row, n) = ve;
      if (n == 0) {
        rhs(out_row) = -vf;
      } else {
        sys(out_row, n_max + n) = vf;
      }
    }
  };

  int row = 0;
  for (int mm = 0; mm < n_max; ++mm) {
    Eigen::RowVectorXd one(1);
    one << 1.0;
    fill_row(row++, one, {2 * mm});
    fill_row(row++, one, {2 * mm + 1});
  }
  // Combination of the two rows at N that is free of the N+1 amplitudes.
  Eigen::Matrix2d b = m.block(2 * n_max, 2 * n_max + 2, 2, 2);
  Eigen::RowVectorXd l(2);
  if (b.col(0).norm() >= b.col(1).norm()) {
    l << b(1, 0), -b(0, 0);
  } else {
    l << b(1, 1), -b(0, 1);
  }
  if (std::abs((l * b).norm()) > 1e-9 * (l.norm() * b.norm())) {
    throw std::runtime_error("coupling block to N+1 is not rank one");
  }
  fill_row(row++, l, {2 * n_max, 2 * n_max + 1});

  const Eigen::VectorXd x = sys.partialPivLu().solve(rhs);
  auto bare = [](double amp, int n) {
    return amp * std::exp(-0.5 * std::lgamma(n + 1.0));
  };
  Coefficients out;
  out.f.push_back(1.0);
  for (int n = 0; n <= n_max; ++n) out.e.push_back(bare(x(n), n));
  for (int n = 1; n <= n_max; ++n) out.f.push_back(bare(x(n_max + n), n));
  return out;
}

}  // namespace oracle
