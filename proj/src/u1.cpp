#include "arsm/u1.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "arsm/errors.hpp"

namespace arsm::u1 {

namespace {

constexpr double kKappaOneTol = 1e-12;

struct LowerResidual {
  double two_a2;  // 2 alpha^2
  double b;       // 1 - Delta + kappa - 2 alpha^2
  double kappa;
  double soft;    // 2 alpha^2 (1 - kappa^2)
  double odd;     // 2n + 1

  double operator()(double x) const {
    return odd * std::sqrt(x * (x + soft)) - two_a2 * b +
           x * (two_a2 - b + kappa + x);
  }
};

struct UpperResidual {
  double delta;
  double two_k2a2;  // 2 kappa^2 alpha^2
  double two_ka2;   // 2 kappa alpha^2
  double soft;
  double odd;

  double operator()(double y) const {
    return (y + 1.0 - delta - two_k2a2) * (y - two_k2a2) - two_ka2 -
           odd * std::sqrt(y * (y + soft));
  }
};

// Bisection with f(lo) < 0 < f(hi) down to relative machine precision.
template <typename F>
double bisect_increasing(const F& f, double lo, double hi) {
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

void check_level_index(long n) {
  if (n < 0) throw DomainError("level index n must be non-negative");
}

double upper_offset(const U1Params& q, int n) {
  const double a2 = q.alpha * q.alpha;
  const UpperResidual f{q.delta, 2.0 * q.kappa * q.kappa * a2,
                        2.0 * q.kappa * a2,
                        2.0 * a2 * (1.0 - q.kappa * q.kappa), 2.0 * n + 1.0};
  double top = 4.0 * n + 10.0 + 4.0 * std::abs(q.delta) + 8.0 * a2;
  for (int i = 0; i < 60 && !(f(top) > 0.0); ++i) top *= 2.0;
  if (!(f(top) > 0.0)) throw BranchEmpty("upper branch residual never turns positive");

  // Largest sign change, scanning down from the top.
  const int steps = 4000;
  const double h = top / steps;
  double hi = top;
  for (int i = steps - 1; i >= 1; --i) {
    const double lo = i * h;
    if (f(lo) <= 0.0) return bisect_increasing(f, lo, hi);
    hi = lo;
  }
  // Roots closer to the edge than one grid step.
  for (double lo = 0.5 * h; lo > 1e-15 * h; lo *= 0.5) {
    if (f(lo) <= 0.0) return bisect_increasing(f, lo, hi);
    hi = lo;
  }
  if (f(0.0) <= 0.0) return f(0.0) == 0.0 ? 0.0 : bisect_increasing(f, 0.0, hi);
  std::ostringstream os;
  os << "no upper-branch level " << n << " above the strip";
  throw BranchEmpty(os.str());
}

}  // namespace

U1Params U1Params::make(double delta, double alpha, double kappa,
                        StarkSign sign) {
  U1Params p{delta, alpha, kappa, sign};
  p.validate();
  return p;
}

void U1Params::validate() const {
  if (!std::isfinite(delta) || !std::isfinite(alpha) || !std::isfinite(kappa)) {
    throw DomainError("unit-Stark parameters must be finite");
  }
  if (alpha < 0.0) throw DomainError("alpha must be non-negative");
  if (std::abs(kappa) > 1.0 + kKappaOneTol) {
    throw DomainError("kappa must lie in [-1, 1]");
  }
}

U1Params U1Params::as_plus() const {
  validate();
  if (u_sign == StarkSign::Plus) return *this;
  return {-delta, alpha, -kappa, StarkSign::Plus};
}

U1Params from_model(const ModelParams& p) {
  p.validate();
  if (std::abs(std::abs(p.stark_u) - 1.0) > kUnitStarkTolerance) {
    throw DomainError("unit-Stark path needs |U| = 1", "use the BOA solver");
  }
  U1Params q;
  q.delta = p.delta;
  q.u_sign = p.stark_u > 0.0 ? StarkSign::Plus : StarkSign::Minus;
  if (p.g1 + p.g2 > 0.0) {
    const auto ak = to_alpha_kappa(p);
    q.alpha = ak.alpha;
    q.kappa = ak.kappa;
  }
  return q;
}

ModelParams to_model(const U1Params& p) {
  p.validate();
  const auto c = from_alpha_kappa(p.alpha, p.kappa);
  return ModelParams::make(p.delta, std::max(c.g1, 0.0), std::max(c.g2, 0.0),
                           static_cast<double>(static_cast<int>(p.u_sign)));
}

double critical_alpha(const U1Params& p) {
  const U1Params q = p.as_plus();
  const double rad = 0.5 * (1.0 - q.delta + q.kappa);
  if (rad < 0.0) {
    throw NoTransition("critical coupling radicand is negative");
  }
  return std::sqrt(rad);
}

double critical_energy(const U1Params& p) {
  const U1Params q = p.as_plus();
  return -0.5 * q.delta - 2.0 * q.alpha * q.alpha;
}

double upper_branch_edge(const U1Params& p) {
  const U1Params q = p.as_plus();
  return -0.5 * q.delta - 2.0 * q.kappa * q.kappa * q.alpha * q.alpha;
}

double lower_depth(const U1Params& p, int n) {
  check_level_index(n);
  const U1Params q = p.as_plus();
  if (q.alpha == 0.0) return 0.0;
  const double a2 = q.alpha * q.alpha;
  const double b = 1.0 - q.delta + q.kappa - 2.0 * a2;
  if (!(b > 0.0)) {
    std::ostringstream os;
    os.precision(17);
    os << "no real lower-branch level at alpha = " << q.alpha
       << " (alpha >= alpha_c)";
    throw NoRealSolution(os.str());
  }
  const LowerResidual f{2.0 * a2, b, q.kappa,
                        2.0 * a2 * (1.0 - q.kappa * q.kappa), 2.0 * n + 1.0};
  double hi = 50.0 * (1.0 + std::abs(q.delta) + a2);
  for (int i = 0; i < 60 && !(f(hi) > 0.0); ++i) hi *= 2.0;
  if (!(f(hi) > 0.0)) throw BranchEmpty("lower branch residual has no sign change");
  return bisect_increasing(f, 0.0, hi);
}

double self_consistent_level(const U1Params& p, int n, Branch branch) {
  check_level_index(n);
  if (branch == Branch::Lower) return critical_energy(p) - lower_depth(p, n);
  const U1Params q = p.as_plus();
  return upper_branch_edge(p) + upper_offset(q, n);
}

double effective_frequency(const U1Params& p, double energy) {
  const U1Params q = p.as_plus();
  const double k2 = q.kappa * q.kappa;
  if (q.alpha == 0.0 || k2 == 1.0) return 1.0;
  const double a2 = q.alpha * q.alpha;
  const double eps = energy + 0.5 * q.delta;
  const double num = eps + 2.0 * a2;
  const double den = eps + 2.0 * k2 * a2;
  const double ratio = num / den;
  if (den == 0.0 || !(ratio >= 0.0)) {
    std::ostringstream os;
    os.precision(17);
    os << "effective frequency is not real at E = " << energy;
    throw ComplexFrequency(os.str());
  }
  return std::sqrt(ratio);
}

double rwa_level(const U1Params& p, long n, Branch branch) {
  check_level_index(n);
  const U1Params q = p.as_plus();
  if (std::abs(q.kappa - 1.0) > kKappaOneTol) {
    throw DomainError("closed form needs kappa = 1 in the U = +1 frame");
  }
  const double d = q.delta;
  const double nn = static_cast<double>(n);
  const double a = 0.25 * d * d + nn * d + 4.0 * q.alpha * q.alpha * (nn + 1.0);
  const double s = std::sqrt(nn * nn + a);
  if (branch == Branch::Upper) return nn + s;
  // n - s without cancellation.
  return nn + s > 0.0 ? -a / (nn + s) : nn - s;
}

GroundIndex rwa_ground_index(const U1Params& p, long n_max) {
  if (n_max < 1) throw DomainError("n_max must be at least 1");
  const U1Params q = p.as_plus();
  GroundIndex gi;
  double ac = std::numeric_limits<double>::quiet_NaN();
  try {
    ac = critical_alpha(q);
  } catch (const NoTransition&) {
  }
  if (std::isfinite(ac) && std::abs(q.alpha - ac) <= 1e-12 * std::max(1.0, ac)) {
    gi.kind = GroundIndex::Kind::Degenerate;
    gi.energy = rwa_level(q, 0, Branch::Lower);
    return gi;
  }
  double best = rwa_level(q, 0, Branch::Lower);
  double prev = best;
  double last_step = 0.0;
  for (long n = 1; n <= n_max; ++n) {
    const double e = rwa_level(q, n, Branch::Lower);
    last_step = e - prev;
    if (e < best) {
      best = e;
      gi.n = n;
    }
    prev = e;
  }
  gi.energy = best;
  const double limit = critical_energy(q);
  if (gi.n == n_max && last_step < 0.0 && limit < best) {
    gi.kind = GroundIndex::Kind::Unbounded;
    gi.energy = limit;
  }
  return gi;
}

GapFit gap_fit(const U1Params& p, double dist_min, double dist_max,
               int n_samples) {
  if (!(dist_min > 0.0)) {
    throw NoRealSolution("gap-fit window reaches alpha >= alpha_c");
  }
  if (!(dist_min < dist_max)) {
    throw DomainError("gap-fit window needs dist_min < dist_max");
  }
  if (n_samples < 8) throw DomainError("gap fit needs at least 8 samples");
  const double ac = critical_alpha(p);
  if (!(dist_max < ac)) {
    throw DomainError("gap-fit window reaches alpha <= 0");
  }

  GapFit fit;
  fit.alpha_min = ac - dist_max;
  fit.alpha_max = ac - dist_min;
  std::vector<double> lx, ly;
  const double ratio = std::log(dist_max / dist_min);
  for (int k = 0; k < n_samples; ++k) {
    const double d = dist_min * std::exp(ratio * k / (n_samples - 1));
    U1Params q = p;
    q.alpha = ac - d;
    if (!(q.alpha < ac)) {
      throw NoRealSolution("gap-fit sample reached alpha_c");
    }
    const double gap = lower_depth(q, 0) - lower_depth(q, 1);
    fit.samples.push_back({q.alpha, gap});
    lx.push_back(std::log(ac - q.alpha));
    ly.push_back(std::log(gap));
  }

  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.reliable = fit.r_squared >= 0.9999 && dist_max <= 1e-2;
  return fit;
}

BranchSpectrum branch_spectrum(const U1Params& p, Branch branch, int n_levels) {
  BranchSpectrum bs;
  bs.branch = branch;
  bs.upper_bound = critical_energy(p);
  try {
    bs.critical_alpha = critical_alpha(p);
  } catch (const NoTransition&) {
    bs.critical_alpha = std::numeric_limits<double>::quiet_NaN();
  }
  for (int n = 0; n < n_levels; ++n) {
    try {
      bs.levels.push_back({n, self_consistent_level(p, n, branch)});
    } catch (const NoRealSolution&) {
      break;
    }
  }
  return bs;
}

}  // namespace arsm::u1
