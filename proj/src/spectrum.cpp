#include "arsm/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "arsm/ed.hpp"
#include "arsm/errors.hpp"
#include "arsm/poles.hpp"

namespace arsm::spectrum {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Sample {
  double e;
  double g;
};

class GEvaluator {
 public:
  GEvaluator(const ModelParams& p, Parity parity, const FindOptions& opt,
             SpectrumResult& out)
      : p_(p), parity_(parity), opt_(opt), out_(out) {}

  // NaN when the series fails or the energy falls inside the guard.
  double operator()(double e, double guard) const {
    boa::Options o = opt_.boa;
    o.pole_guard = guard;
    o.stop_at_pole = false;
    ++out_.g_evaluations;
    try {
      return boa::g_function(p_, e, parity_, o).value;
    } catch (const NotConverged&) {
      return kNaN;
    } catch (const PoleHit&) {
      return kNaN;
    }
  }

 private:
  const ModelParams& p_;
  Parity parity_;
  const FindOptions& opt_;
  SpectrumResult& out_;
};

bool opposite_signs(double a, double b) {
  return (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0);
}

// Bisection to machine precision on a sign-changing bracket.
Level bisect(const GEvaluator& g, double lo, double glo, double hi,
             double guard, Parity parity) {
  Level lv;
  lv.parity = parity;
  lv.bracket_lo = lo;
  lv.bracket_hi = hi;
  int it = 0;
  double gmid = glo;
  double mid = lo;
  while (it < 200) {
    mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    gmid = g(mid, guard);
    ++it;
    if (std::isnan(gmid)) break;
    if (gmid == 0.0) break;
    if (opposite_signs(glo, gmid)) {
      hi = mid;
    } else {
      lo = mid;
      glo = gmid;
    }
  }
  lv.energy = mid;
  lv.iterations = it;
  lv.residual = std::abs(gmid);
  return lv;
}

// Golden-section minimum of |G| on [a, b].
Level tangency_search(const GEvaluator& g, double a, double b, double guard,
                      Parity parity) {
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = std::abs(g(c, guard));
  double fd = std::abs(g(d, guard));
  Level lv;
  lv.parity = parity;
  lv.bracket_lo = a;
  lv.bracket_hi = b;
  lv.tangency = true;
  int it = 0;
  while (b - a > 1e-14 * (1.0 + std::abs(a)) && it < 120) {
    ++it;
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = std::abs(g(c, guard));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = std::abs(g(d, guard));
    }
    if (std::isnan(fc) || std::isnan(fd)) break;
  }
  lv.energy = fc < fd ? c : d;
  lv.residual = std::min(fc, fd);
  lv.iterations = it;
  return lv;
}

std::vector<double> poles_in(const ModelParams& p, double lo, double hi,
                             int m_max) {
  std::vector<double> out;
  const double e0 = first_pole_energy(p);
  if (e0 > lo && e0 < hi) out.push_back(e0);
  for (int m = 1; m <= m_max; ++m) {
    const double em = regular_pole_energy(p, m);
    if (em >= hi) break;
    if (em > lo) out.push_back(em);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Roots squeezed between a pole and its default guard band. `side` is +1
// for the band above the pole and -1 below.
void hug_pole(const GEvaluator& g, double pole, int side,
              const FindOptions& opt, Parity parity, std::vector<Level>& out) {
  double prev_d = opt.boa.pole_guard;
  double prev_g = g(pole + side * prev_d, 0.5 * prev_d);
  for (double d = 0.1 * prev_d; d >= opt.min_guard * (1.0 - 1e-9); d *= 0.1) {
    const double gd = g(pole + side * d, 0.5 * d);
    if (!std::isnan(gd) && !std::isnan(prev_g) && opposite_signs(gd, prev_g)) {
      const double lo = pole + side * (side > 0 ? d : prev_d);
      const double hi = pole + side * (side > 0 ? prev_d : d);
      const double glo = side > 0 ? gd : prev_g;
      Level lv = bisect(g, lo, glo, hi, 0.5 * d, parity);
      lv.near_pole = true;
      out.push_back(lv);
    }
    prev_d = d;
    prev_g = gd;
  }
}

void merge_close(std::vector<Level>& lv, double tol) {
  std::sort(lv.begin(), lv.end(),
            [](const Level& a, const Level& b) { return a.energy < b.energy; });
  std::vector<Level> out;
  for (const auto& l : lv) {
    if (!out.empty() && out.back().parity == l.parity &&
        std::abs(out.back().energy - l.energy) < tol) {
      if (l.residual < out.back().residual) out.back() = l;
      continue;
    }
    out.push_back(l);
  }
  lv.swap(out);
}

}  // namespace

PoleLadder poles(const ModelParams& p, int m_max) {
  PoleLadder lad;
  lad.first_pole = first_pole_energy(p);
  lad.regular_poles.reserve(std::max(m_max, 0));
  for (int m = 1; m <= m_max; ++m) {
    lad.regular_poles.push_back(regular_pole_energy(p, m));
  }
  return lad;
}

SpectrumResult find_levels(const ModelParams& p, double e_lo, double e_hi,
                           Parity parity, int scan_points,
                           const FindOptions& opt) {
  if (!std::isfinite(e_lo) || !std::isfinite(e_hi) || !(e_lo < e_hi)) {
    throw DomainError("energy range must be finite and non-empty");
  }
  if (scan_points < 64) throw DomainError("scan_points must be at least 64");
  derive(p);

  SpectrumResult res;
  const GEvaluator g(p, parity, opt, res);
  const double guard = opt.boa.pole_guard;
  const double step = (e_hi - e_lo) / (scan_points - 1);
  const auto pl = poles_in(p, e_lo, e_hi, opt.boa.max_terms);

  std::vector<double> edges{e_lo};
  edges.insert(edges.end(), pl.begin(), pl.end());
  edges.push_back(e_hi);

  std::vector<Level> found;
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    const bool lo_pole = s > 0;
    const bool hi_pole = s + 2 < edges.size();
    const double a = lo_pole ? edges[s] + guard : edges[s];
    const double b = hi_pole ? edges[s + 1] - guard : edges[s + 1];
    if (!(a < b)) continue;

    // The segment ends sit one guard width from a pole; rounding may put
    // them a hair inside it, so they are evaluated with half the guard.
    std::vector<Sample> pts;
    pts.push_back({a, g(a, lo_pole ? 0.5 * guard : guard)});
    const auto first = static_cast<long>(std::floor((a - e_lo) / step)) + 1;
    for (long i = first;; ++i) {
      const double e = e_lo + i * step;
      if (e >= b) break;
      if (e > a) pts.push_back({e, g(e, guard)});
    }
    pts.push_back({b, g(b, hi_pole ? 0.5 * guard : guard)});

    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const auto& u = pts[i];
      const auto& v = pts[i + 1];
      if (std::isnan(u.g)) ++res.failed_points;
      if (u.g == 0.0) {
        Level lv;
        lv.energy = u.e;
        lv.parity = parity;
        lv.bracket_lo = lv.bracket_hi = u.e;
        found.push_back(lv);
        continue;
      }
      if (!std::isnan(u.g) && !std::isnan(v.g) && opposite_signs(u.g, v.g)) {
        found.push_back(bisect(g, u.e, u.g, v.e, guard, parity));
      }
    }
    if (std::isnan(pts.back().g)) ++res.failed_points;

    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
      const double l = pts[i - 1].g, c = pts[i].g, r = pts[i + 1].g;
      if (std::isnan(l) || std::isnan(c) || std::isnan(r)) continue;
      if (opposite_signs(l, c) || opposite_signs(c, r)) continue;
      if (!(std::abs(c) < std::abs(l) && std::abs(c) < std::abs(r))) continue;
      Level lv = tangency_search(g, pts[i - 1].e, pts[i + 1].e, guard, parity);
      if (lv.residual < opt.tangency_tol) found.push_back(lv);
    }

    if (lo_pole) hug_pole(g, edges[s], +1, opt, parity, found);
    if (hi_pole) hug_pole(g, edges[s + 1], -1, opt, parity, found);
  }
  merge_close(found, opt.level_merge_tol);
  res.levels = std::move(found);
  return res;
}

SpectrumResult find_spectrum(const ModelParams& p, double e_lo, double e_hi,
                             int scan_points, const FindOptions& opt) {
  SpectrumResult even = find_levels(p, e_lo, e_hi, Parity::Even, scan_points, opt);
  SpectrumResult odd = find_levels(p, e_lo, e_hi, Parity::Odd, scan_points, opt);
  SpectrumResult all;
  all.g_evaluations = even.g_evaluations + odd.g_evaluations;
  all.failed_points = even.failed_points + odd.failed_points;
  all.levels = std::move(even.levels);
  all.levels.insert(all.levels.end(), odd.levels.begin(), odd.levels.end());
  std::sort(all.levels.begin(), all.levels.end(),
            [](const Level& a, const Level& b) { return a.energy < b.energy; });
  for (std::size_t i = 0; i < all.levels.size(); ++i) {
    for (std::size_t j = i + 1; j < all.levels.size(); ++j) {
      if (all.levels[j].energy - all.levels[i].energy >= kDegeneracyTol) break;
      if (all.levels[j].parity != all.levels[i].parity) {
        all.levels[i].degenerate = all.levels[j].degenerate = true;
      }
    }
  }
  return all;
}

double spectrum_floor(const ModelParams& p) {
  p.validate();
  const double soft = 1.0 - std::abs(p.stark_u);
  const double c = p.g1 + p.g2;
  return -0.5 * std::abs(p.delta) - c * c / soft - 1.0;
}

std::vector<Level> lowest_levels(const ModelParams& p, Parity parity,
                                 int count, int points_per_unit,
                                 const FindOptions& opt) {
  if (count < 1) return {};
  const double lo = spectrum_floor(p);
  double span = std::max(4.0, 1.5 * count);
  for (int attempt = 0; attempt < 8; ++attempt) {
    const double hi = lo + span;
    const int pts =
        std::max(64, static_cast<int>(std::ceil(points_per_unit * span)));
    auto res = find_levels(p, lo, hi, parity, pts, opt);
    if (static_cast<int>(res.levels.size()) >= count) {
      res.levels.resize(count);
      return res.levels;
    }
    span *= 2.0;
  }
  throw NotConverged("could not bracket the requested number of levels");
}

double critical_radicand(const CouplingFamily& fam) {
  const double u = fam.stark_u;
  const double r2 = fam.ratio * fam.ratio;
  return fam.delta * (1.0 - u * u) / (u * (1.0 + r2) + 1.0 - r2);
}

std::optional<CrossingPoint> first_order_critical(const CouplingFamily& fam) {
  if (!(std::abs(fam.stark_u) < 1.0)) {
    throw DomainError("the ground-state crossing formula needs |U| < 1",
                      "use the unit-Stark solver");
  }
  const double rad = critical_radicand(fam);
  if (!std::isfinite(rad) || !(rad > 0.0)) return std::nullopt;
  CrossingPoint cp;
  cp.g1_critical = std::sqrt(rad);
  cp.energy = first_pole_energy(fam.at(cp.g1_critical));
  cp.pole_index = 0;
  cp.kind = CrossingKind::FirstOrderQPT;
  return cp;
}

std::vector<CrossingPoint> juddian_crossings(const CouplingFamily& fam,
                                             int pole_index, double g1_lo,
                                             double g1_hi, int scan_points,
                                             const boa::Options& opt) {
  if (pole_index < 1) throw DomainError("pole_index must be at least 1");
  if (!(g1_lo < g1_hi) || !(g1_lo >= 0.0)) {
    throw DomainError("g1 range must be non-empty and non-negative");
  }
  if (scan_points < 2) throw DomainError("scan_points must be at least 2");

  auto value = [&](double g1) {
    try {
      return boa::pole_consistency(fam.at(g1), pole_index, opt);
    } catch (const Error&) {
      return kNaN;
    }
  };

  std::vector<CrossingPoint> out;
  const double step = (g1_hi - g1_lo) / (scan_points - 1);
  double prev_x = g1_lo, prev_v = value(g1_lo);
  for (int i = 1; i < scan_points; ++i) {
    const double x = i + 1 == scan_points ? g1_hi : g1_lo + i * step;
    const double v = value(x);
    if (!std::isnan(v) && !std::isnan(prev_v) && opposite_signs(prev_v, v)) {
      double lo = prev_x, hi = x, vlo = prev_v, vmid = v, mid = x;
      for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        vmid = value(mid);
        if (std::isnan(vmid) || vmid == 0.0) break;
        if (opposite_signs(vlo, vmid)) {
          hi = mid;
        } else {
          lo = mid;
          vlo = vmid;
        }
      }
      // Sign flips through a divergence leave a large residual behind.
      if (!std::isnan(vmid) && std::abs(vmid) < 1e-8) {
        CrossingPoint cp;
        cp.g1_critical = mid;
        cp.energy = regular_pole_energy(fam.at(mid), pole_index);
        cp.pole_index = pole_index;
        cp.kind = CrossingKind::Juddian;
        out.push_back(cp);
      }
    }
    prev_x = x;
    prev_v = v;
  }
  return out;
}

std::optional<CrossingPoint> crossing_via_ed(const CouplingFamily& fam,
                                             double g1_lo, double g1_hi,
                                             const EdCrossingOptions& opt) {
  if (!(g1_lo < g1_hi) || !(g1_lo >= 0.0)) {
    throw DomainError("g1 range must be non-empty and non-negative");
  }
  if (opt.scan_points < 2) throw DomainError("scan_points must be at least 2");

  auto diff = [&](double g1, double* ground) {
    const auto b = ed::solve_parity_blocks(fam.at(g1), opt.n_truncation);
    if (ground) *ground = std::min(b.even.front(), b.odd.front());
    return b.even.front() - b.odd.front();
  };

  // Grid points whose parity gap is below the eigensolver's resolution
  // carry no sign information.
  const double step = (g1_hi - g1_lo) / (opt.scan_points - 1);
  double prev_x = g1_lo, prev_d = diff(g1_lo, nullptr);
  for (int i = 1; i < opt.scan_points; ++i) {
    const double x = i + 1 == opt.scan_points ? g1_hi : g1_lo + i * step;
    const double d = diff(x, nullptr);
    if (std::abs(d) < opt.resolution) continue;
    if (std::abs(prev_d) >= opt.resolution && opposite_signs(prev_d, d)) {
      double lo = prev_x, hi = x, dlo = prev_d;
      while (hi - lo > opt.g1_tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double dm = diff(mid, nullptr);
        if (dm == 0.0) {
          lo = hi = mid;
          break;
        }
        if (opposite_signs(dlo, dm)) {
          hi = mid;
        } else {
          lo = mid;
          dlo = dm;
        }
      }
      CrossingPoint cp;
      cp.g1_critical = 0.5 * (lo + hi);
      cp.gap = std::abs(diff(cp.g1_critical, &cp.energy));
      cp.pole_index = 0;
      cp.kind = CrossingKind::FirstOrderQPT;
      return cp;
    }
    prev_x = x;
    prev_d = d;
  }
  return std::nullopt;
}

}  // namespace arsm::spectrum
