#include "arsm/boa.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "arsm/errors.hpp"
#include "arsm/poles.hpp"

namespace arsm::boa {

namespace {

// Closed-form pieces of the projected equations. Names follow the role of
// each term: theta is the e_m coefficient of the Lambda-free combination
// (divided by w + beta), c_coef the matching f_m coefficient moved to the
// right-hand side.
class Stepper {
 public:
  Stepper(const ModelParams& p, double energy)
      : p_(p), d_(derive(p)), energy_(energy) {
    const double b = d_.beta;
    u_ = p.stark_u;
    w_ = d_.w;
    half_delta_ = 0.5 * p.delta;
    k_ = (d_.lambda_plus + b * b) / b;
    lm_b_ = d_.lambda_minus / b;
    lp_b_ = d_.lambda_plus / b;
    uw_ = u_ * w_;
    uw_wb_ = uw_ / (w_ + b);
    d_coef_ = (d_.lambda_plus - b * b) / b + uw_wb_ * d_.lambda_minus / b;
    f_coef_ = lm_b_ + uw_wb_ * (d_.lambda_plus - b * b) / b;
  }

  const DerivedParams& derived() const { return d_; }
  double w() const { return w_; }

  double gamma(int m) const { return m + w_ * w_; }

  double theta(int m) const {
    return gamma(m) - k_ * w_ - energy_ -
           uw_wb_ * (half_delta_ + u_ * gamma(m) + lm_b_ * w_);
  }

  double c_coef(int m) const {
    return half_delta_ - lm_b_ * w_ + u_ * gamma(m) -
           uw_wb_ * (gamma(m) + k_ * w_ - energy_);
  }

  // Right-hand sides of the 2x2 system for (e_m, f_m), m >= 1, written for
  // the series terms t_n = x_n w^n so that the solution comes out as
  // (e_m w^m, f_m w^m) directly.
  struct Rhs {
    double lambda_free;  // from the Lambda-free combination at m
    double second;       // from the second projected equation at m - 1
  };

  Rhs rhs(int m, const std::vector<double>& e,
          const std::vector<double>& f) const {
    const int k = m - 1;
    const double w2 = w_ * w_;
    const double ek = w_ * e[k];
    const double fk = w_ * f[k];
    const double ekm = k >= 1 ? w2 * e[k - 1] : 0.0;
    const double fkm = k >= 1 ? w2 * f[k - 1] : 0.0;
    const double rest = (-half_delta_ - u_ * gamma(k) - lm_b_ * w_) * ek +
                        lm_b_ * ekm +
                        (gamma(k) + (lp_b_ + d_.beta) * w_ - energy_) * fk -
                        (lp_b_ - d_.beta) * fkm + uw_ * ekm -
                        (w_ + d_.beta) * fkm;
    return {-d_coef_ * ek + f_coef_ * fk, -rest};
  }

  // Coefficient matrix [[theta, -c], [U w m, -(w + beta) m]]; its determinant
  // reduces to 2 m w (E - E_m^pole).
  double det(int m) const {
    return 2.0 * m * w_ * (energy_ - regular_pole_energy(p_, m));
  }

  double e0() const { return c_coef(0) / (first_pole_energy(p_) - energy_); }

  void step(int m, std::vector<double>& e, std::vector<double>& f) const {
    const Rhs r = rhs(m, e, f);
    const double a11 = theta(m);
    const double a12 = -c_coef(m);
    const double a21 = uw_ * m;
    const double a22 = -(w_ + d_.beta) * m;
    const double dt = det(m);
    e.push_back((r.lambda_free * a22 - a12 * r.second) / dt);
    f.push_back((a11 * r.second - a21 * r.lambda_free) / dt);
  }

  // Consistency numerator of the singular system at E = E_m^pole.
  double consistency(int m, const std::vector<double>& e,
                     const std::vector<double>& f) const {
    const Rhs r = rhs(m, e, f);
    const double t1 = (w_ + d_.beta) * m * r.lambda_free;
    const double t2 = c_coef(m) * r.second;
    double mag = w_ * std::max(std::abs(e[m - 1]), std::abs(f[m - 1]));
    if (m >= 2) {
      mag = std::max({mag, w_ * w_ * std::abs(e[m - 2]),
                      w_ * w_ * std::abs(f[m - 2])});
    }
    const double scale = mag * (w_ + d_.beta) * m * (1.0 + std::abs(c_coef(m))) *
                         (1.0 + std::abs(energy_) + gamma(m) + k_ * w_);
    return scale > 0.0 ? (t1 - t2) / scale : 0.0;
  }

  // Raw projected equations at m, multiplied by w^m; needs the terms up to
  // m + 1.
  std::pair<double, double> residuals(int m, const std::vector<double>& e,
                                      const std::vector<double>& f) const {
    const double b = d_.beta;
    const double em = e[m], fm = f[m];
    const double emm = m >= 1 ? w_ * e[m - 1] : 0.0;
    const double fmm = m >= 1 ? w_ * f[m - 1] : 0.0;
    const double lam = (m + 1) * e[m + 1] / w_ + emm;
    const double fam = (m + 1) * f[m + 1] / w_ + fmm;
    const double g = gamma(m);
    const double first = (g - (lp_b_ + b) * w_ - energy_) * em +
                         (lp_b_ - b) * emm +
                         (-half_delta_ + lm_b_ * w_ - u_ * g) * fm -
                         lm_b_ * fmm - (w_ - b) * lam + uw_ * fam;
    const double second = (-half_delta_ - u_ * g - lm_b_ * w_) * em +
                          lm_b_ * emm +
                          (g + (lp_b_ + b) * w_ - energy_) * fm -
                          (lp_b_ - b) * fmm + uw_ * lam - (w_ + b) * fam;
    return {first, second};
  }

 private:
  ModelParams p_;
  DerivedParams d_;
  double energy_;
  double u_ = 0.0, w_ = 0.0, half_delta_ = 0.0, k_ = 0.0;
  double lm_b_ = 0.0, lp_b_ = 0.0, uw_ = 0.0, uw_wb_ = 0.0;
  double d_coef_ = 0.0, f_coef_ = 0.0;
};

void check_options(const Options& opt) {
  if (opt.max_terms < 8) {
    throw DomainError("max_terms must be at least 8");
  }
  if (!(opt.tol > 0.0) || !(opt.pole_guard > 0.0)) {
    throw DomainError("tolerances must be positive");
  }
}

[[noreturn]] void throw_pole(int m, double pole, double energy) {
  std::ostringstream os;
  os.precision(17);
  os << "energy " << energy << " within pole guard of E_" << m
     << "^pole = " << pole;
  throw PoleHit(os.str(), m, pole);
}

// Runs the recursion; `done(n, table)` is asked after every new pair and
// returns true once the caller's convergence criterion holds.
template <typename Done>
CoefficientTable run_terms(const ModelParams& p, double energy, const Options& opt,
                     Done&& done) {
  check_options(opt);
  const Stepper st(p, energy);
  CoefficientTable t;
  t.energy = energy;
  t.w = st.w();
  t.te.reserve(64);
  t.tf.reserve(64);

  const double pole0 = first_pole_energy(p);
  if (std::abs(energy - pole0) < opt.pole_guard) {
    if (!opt.stop_at_pole) throw_pole(0, pole0, energy);
    t.terminated_on = Termination::PoleProximity;
    t.pole_index = 0;
    t.n_used = -1;
    return t;
  }
  t.tf.push_back(1.0);
  t.te.push_back(st.e0());
  t.n_used = 0;
  if (done(0, t)) {
    t.terminated_on = Termination::Converged;
    return t;
  }
  for (int m = 1; m <= opt.max_terms; ++m) {
    const double pole = regular_pole_energy(p, m);
    if (std::abs(energy - pole) < opt.pole_guard) {
      if (!opt.stop_at_pole) throw_pole(m, pole, energy);
      t.terminated_on = Termination::PoleProximity;
      t.pole_index = m;
      return t;
    }
    st.step(m, t.te, t.tf);
    t.n_used = m;
    if (done(m, t)) {
      t.terminated_on = Termination::Converged;
      return t;
    }
  }
  t.terminated_on = Termination::MaxTerms;
  return t;
}

void fill_bare(CoefficientTable& t) {
  t.e.resize(t.te.size());
  t.f.resize(t.tf.size());
  double inv = 1.0;
  for (std::size_t n = 0; n < t.te.size(); ++n) {
    t.e[n] = t.te[n] * inv;
    t.f[n] = t.tf[n] * inv;
    inv /= t.w;
  }
}

template <typename Done>
CoefficientTable run(const ModelParams& p, double energy, const Options& opt,
                     Done&& done) {
  CoefficientTable t = run_terms(p, energy, opt, std::forward<Done>(done));
  fill_bare(t);
  return t;
}

// Tracks "four consecutive negligible terms" for one or more series.
class ConvergenceTracker {
 public:
  explicit ConvergenceTracker(double tol) : tol_(tol) {}

  bool update(double term, double partial_sum) {
    if (!std::isfinite(term)) {
      quiet_ = 0;
      return false;
    }
    if (std::abs(term) < tol_ * (1.0 + std::abs(partial_sum))) {
      ++quiet_;
    } else {
      quiet_ = 0;
    }
    return quiet_ >= 4;
  }

 private:
  double tol_;
  int quiet_ = 0;
};

GValue make_value(const ModelParams& p, const CoefficientTable& t,
                  Parity parity, const Options& opt) {
  GValue g;
  g.parity = parity;
  g.value = series_value(t, parity);
  g.truncation_estimate =
      std::abs(t.te.back() - sign(parity) * t.tf.back());
  g.near_pole = distance_to_nearest_pole(p, t.energy, opt.max_terms) <
                std::max(opt.near_pole_band, opt.pole_guard);
  g.n_used = t.n_used;
  return g;
}

[[noreturn]] void throw_not_converged(double energy, int max_terms) {
  std::ostringstream os;
  os.precision(17);
  os << "G-series at E = " << energy << " not converged within " << max_terms
     << " terms";
  throw NotConverged(os.str());
}

}  // namespace

CoefficientTable coefficients(const ModelParams& p, double energy,
                              const Options& opt) {
  double sum_e = 0.0, sum_f = 0.0;
  ConvergenceTracker track(opt.tol);
  return run(p, energy, opt, [&](int n, const CoefficientTable& t) {
    const double te = t.te[n];
    const double tf = t.tf[n];
    sum_e += te;
    sum_f += tf;
    const double scale = std::max(std::abs(sum_e), std::abs(sum_f));
    return track.update(std::max(std::abs(te), std::abs(tf)), scale);
  });
}

GValue g_function(const ModelParams& p, double energy, Parity parity,
                  const Options& opt) {
  double sum = 0.0;
  const int s = sign(parity);
  ConvergenceTracker track(opt.tol);
  const auto t = run(p, energy, opt, [&](int n, const CoefficientTable& tt) {
    const double term = tt.te[n] - s * tt.tf[n];
    sum += term;
    return track.update(term, sum);
  });
  if (t.terminated_on != Termination::Converged) {
    throw_not_converged(energy, opt.max_terms);
  }
  return make_value(p, t, parity, opt);
}

GPair g_functions(const ModelParams& p, double energy, const Options& opt) {
  const auto t = coefficients(p, energy, opt);
  if (t.terminated_on != Termination::Converged) {
    throw_not_converged(energy, opt.max_terms);
  }
  return {make_value(p, t, Parity::Even, opt), make_value(p, t, Parity::Odd, opt)};
}

CoefficientTable eigenvector_coefficients(const ModelParams& p, double energy,
                                          Parity parity, const Options& opt,
                                          double root_tol) {
  const auto g = g_function(p, energy, parity, opt);
  if (!(std::abs(g.value) < root_tol)) {
    std::ostringstream os;
    os.precision(17);
    os << "|G_" << to_string(parity) << "(" << energy << ")| = "
       << std::abs(g.value) << " is not below " << root_tol;
    throw NotARoot(os.str());
  }
  return coefficients(p, energy, opt);
}

double series_value(const CoefficientTable& t, Parity parity) {
  const int s = sign(parity);
  double sum = 0.0;
  for (int n = 0; n <= t.n_used; ++n) sum += t.te[n] - s * t.tf[n];
  return sum;
}

double projection_residual(const ModelParams& p, const CoefficientTable& t) {
  const Stepper st(p, t.energy);
  double worst = 0.0, wm = 1.0;
  for (int m = 0; m + 1 <= t.n_used; ++m, wm *= t.w) {
    const auto [a, b] = st.residuals(m, t.te, t.tf);
    const double scale =
        std::max({std::abs(t.te[m]), std::abs(t.tf[m]), wm});
    worst = std::max({worst, std::abs(a) / scale, std::abs(b) / scale});
  }
  return worst;
}

double pole_consistency(const ModelParams& p, int m, const Options& opt) {
  if (m < 1) {
    throw DomainError("pole_consistency needs a regular pole index m >= 1");
  }
  const double energy = regular_pole_energy(p, m);
  const Stepper st(p, energy);
  Options o = opt;
  o.max_terms = std::max(m - 1, 8);
  const auto t = run(p, energy, o, [&](int n, const CoefficientTable&) {
    return n == m - 1;
  });
  if (t.n_used != m - 1) {
    throw NotConverged("recursion stopped before the pole index");
  }
  return st.consistency(m, t.te, t.tf);
}

}  // namespace arsm::boa
