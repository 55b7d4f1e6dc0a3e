#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "arsm/ed.hpp"
#include "arsm/errors.hpp"
#include "arsm/poles.hpp"
#include "arsm/spectrum.hpp"

using namespace arsm;
using namespace arsm::spectrum;

namespace {

const ModelParams kRef = ModelParams::make(0.7, 0.8, 0.4, 0.2);

// E_0^pole in the printed form with (1 - s)/U; valid for U != 0.
double first_pole_printed(double delta, double g1, double g2, double u) {
  const double s = std::sqrt(1.0 - u * u);
  const double lp = 0.5 * (g1 * g1 + g2 * g2);
  const double lm = 0.5 * (g1 * g1 - g2 * g2);
  return -u * delta / (2.0 * (1.0 + s)) - (lm * (1.0 - s) / u + lp) / s;
}

std::vector<double> energies_of(const SpectrumResult& r, Parity par) {
  std::vector<double> out;
  for (const auto& l : r.levels) {
    if (l.parity == par) out.push_back(l.energy);
  }
  return out;
}

}  // namespace

TEST_CASE("pole ladder at the reference point") {
  const auto lad = poles(kRef, 6);
  CHECK(lad.regular_poles.front() == doctest::Approx(0.49).epsilon(1e-14));
  // 30-digit evaluation of the first-pole formula.
  CHECK(lad.first_pole == doctest::Approx(-0.468350341907227396726757).epsilon(1e-14));
  for (std::size_t m = 1; m < lad.regular_poles.size(); ++m) {
    CHECK(std::abs(lad.regular_poles[m] - lad.regular_poles[m - 1] - 0.96) < 1e-14);
  }
  for (double e : lad.regular_poles) CHECK(std::abs(e - lad.first_pole) > 1e-3);
  CHECK_THROWS_AS(poles(ModelParams::make(0.7, 0.8, 0.4, 1.0), 3), DomainError);
}

TEST_CASE("first pole limits") {
  SUBCASE("U = 0 gives -lambda_+") {
    const auto p = ModelParams::make(0.7, 0.8, 0.4, 0.0);
    CHECK(first_pole_energy(p) == doctest::Approx(-0.4).epsilon(1e-15));
    const double tiny = first_pole_energy(ModelParams::make(0.7, 0.8, 0.4, 1e-13));
    CHECK(std::abs(tiny - first_pole_energy(p)) < 1e-12);
    // Slope at U = 0 is -(Delta/4 + lambda_-/2).
    const double small = first_pole_energy(ModelParams::make(0.7, 0.8, 0.4, 1e-7));
    CHECK(std::abs(small - (-0.4 - 1e-7 * (0.175 + 0.12))) < 1e-13);
  }
  SUBCASE("agrees with the (1 - s)/U form") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> d(0.1, 2.0), g(0.05, 1.5), u(0.01, 0.95);
    for (int i = 0; i < 200; ++i) {
      const double g1 = g(rng), g2 = g(rng), delta = d(rng);
      const double uu = (i % 2 ? 1 : -1) * u(rng);
      const auto p = ModelParams::make(delta, g1, g2, uu);
      CHECK(std::abs(first_pole_energy(p) - first_pole_printed(delta, g1, g2, uu)) < 1e-12);
    }
  }
  SUBCASE("r = 1 is the isotropic Rabi-Stark first pole") {
    for (double u : {-0.7, -0.2, 0.3, 0.9}) {
      const double g = 0.6, delta = 0.8, s = std::sqrt(1.0 - u * u);
      const double rsm = -delta * (1.0 - s) / (2.0 * u) - g * g / s;
      CHECK(first_pole_energy(ModelParams::make(delta, g, g, u)) ==
            doctest::Approx(rsm).epsilon(1e-13));
    }
  }
}

TEST_CASE("property: poles are equally spaced by 1 - U^2") {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> g(0.05, 1.5), u(-0.95, 0.95);
  for (int i = 0; i < 100; ++i) {
    const double uu = u(rng);
    const auto lad = poles(ModelParams::make(0.5, g(rng), g(rng), uu), 20);
    for (std::size_t m = 1; m < lad.regular_poles.size(); ++m) {
      CHECK(std::abs(lad.regular_poles[m] - lad.regular_poles[m - 1] - (1 - uu * uu)) <
            1e-13);
    }
  }
}

TEST_CASE("G zeros match ED at the reference points") {
  for (double r : {0.5, 2.0}) {
    const auto p = ModelParams::make(0.7, 0.8, 0.8 * r, 0.2);
    const auto res = find_spectrum(p, -1.0, 3.0, 1600);
    const auto blocks = ed::solve_parity_blocks(p, 200);
    for (Parity par : {Parity::Even, Parity::Odd}) {
      const auto boa = energies_of(res, par);
      const auto& ref = par == Parity::Even ? blocks.even : blocks.odd;
      std::vector<double> in_range;
      for (double e : ref) {
        if (e > -1.0 && e < 3.0) in_range.push_back(e);
      }
      REQUIRE(boa.size() == in_range.size());
      for (std::size_t i = 0; i < boa.size(); ++i) {
        CHECK(std::abs(boa[i] - in_range[i]) < 1e-6);
      }
    }
    CHECK(std::is_sorted(res.levels.begin(), res.levels.end(),
                         [](const Level& a, const Level& b) { return a.energy < b.energy; }));
    for (const auto& l : res.levels) CHECK(l.residual < 1e-10);
  }
}

TEST_CASE("decoupled limit") {
  const auto p = ModelParams::make(1.0, 1e-8, 1e-8, 0.0);
  const auto res = find_spectrum(p, -1.0, 3.0, 2000);
  REQUIRE_FALSE(res.levels.empty());
  for (const auto& l : res.levels) {
    const double nearest = std::round(l.energy - 0.5) + 0.5;
    CHECK(std::abs(l.energy - nearest) < 1e-6);
  }
  for (double expect : {-0.5, 0.5, 1.5, 2.5}) {
    const bool hit = std::any_of(res.levels.begin(), res.levels.end(),
                                 [&](const Level& l) { return std::abs(l.energy - expect) < 1e-6; });
    CHECK(hit);
  }
}

TEST_CASE("level count between consecutive poles matches ED") {
  const auto lad = poles(kRef, 5);
  const auto ref = ed::solve(kRef, 200, false);
  std::vector<double> edges{lad.first_pole};
  edges.insert(edges.end(), lad.regular_poles.begin(), lad.regular_poles.end());
  std::sort(edges.begin(), edges.end());
  const auto res = find_spectrum(kRef, spectrum_floor(kRef), edges.back(), 3000);
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    auto count = [&](auto first, auto last, auto energy) {
      return std::count_if(first, last, [&](const auto& x) {
        return energy(x) > edges[k] && energy(x) < edges[k + 1];
      });
    };
    const auto n_boa = count(res.levels.begin(), res.levels.end(),
                             [](const Level& l) { return l.energy; });
    const auto n_ed = count(ref.energies.begin(), ref.energies.end(),
                            [](double e) { return e; });
    CHECK(n_boa == n_ed);
  }
}

TEST_CASE("lowest levels and spectrum floor") {
  const auto ref = ed::solve_parity_blocks(kRef, 200);
  CHECK(spectrum_floor(kRef) < std::min(ref.even.front(), ref.odd.front()));
  const auto ev = lowest_levels(kRef, Parity::Even, 5);
  REQUIRE(ev.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(std::abs(ev[i].energy - ref.even[i]) < 1e-9);
  CHECK(lowest_levels(kRef, Parity::Even, 0).empty());
}

TEST_CASE("first-order critical coupling for the three crossing families") {
  struct Case {
    double u, r, g1c, e;
  };
  for (const Case c : {Case{0.2, 0.5, 0.82, -0.49}, Case{-0.2, 0.5, 1.159, -0.77},
                       Case{0.8, 2.0, 0.502, -0.91}}) {
    const CouplingFamily fam{0.7, c.u, c.r};
    const auto cp = first_order_critical(fam);
    REQUIRE(cp.has_value());
    CHECK(std::abs(cp->g1_critical - c.g1c) < 5e-3);
    CHECK(std::abs(cp->energy - c.e) < 5e-3);
    CHECK(cp->energy == first_pole_energy(fam.at(cp->g1_critical)));
    CHECK(cp->kind == CrossingKind::FirstOrderQPT);
    CHECK(cp->pole_index == 0);
  }
  CHECK(std::abs(first_order_critical({0.7, 0.2, 0.5})->g1_critical - 0.8198) < 5e-5);
  CHECK_FALSE(first_order_critical({0.7, 0.2, 2.0}).has_value());
  CHECK_THROWS_AS(first_order_critical({0.7, 1.0, 0.5}), DomainError);
}

TEST_CASE("property: positive radicand iff r < sqrt((1+U)/(1-U))") {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> d(0.05, 3.0), u(-0.95, 0.95), r(0.05, 4.0);
  for (int i = 0; i < 2000; ++i) {
    const CouplingFamily fam{d(rng), u(rng), r(rng)};
    const double bound = std::sqrt((1 + fam.stark_u) / (1 - fam.stark_u));
    if (std::abs(fam.ratio - bound) < 1e-9) continue;
    CHECK(first_order_critical(fam).has_value() == (fam.ratio < bound));
  }
}

TEST_CASE("critical coupling scaling and the U = 0 limit") {
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> d(0.05, 3.0), u(-0.9, 0.9), r(0.05, 0.95);
  for (int i = 0; i < 100; ++i) {
    const CouplingFamily fam{d(rng), u(rng), r(rng)};
    const auto a = first_order_critical(fam);
    if (!a) continue;
    const auto b = first_order_critical({4 * fam.delta, fam.stark_u, fam.ratio});
    REQUIRE(b.has_value());
    CHECK(b->g1_critical == doctest::Approx(2 * a->g1_critical).epsilon(1e-14));

    const CouplingFamily flat{fam.delta, 0.0, fam.ratio};
    CHECK(first_order_critical(flat)->g1_critical ==
          doctest::Approx(std::sqrt(fam.delta / (1 - fam.ratio * fam.ratio))).epsilon(1e-14));
  }
}

TEST_CASE("ED crossing search") {
  SUBCASE("U = 0.2, r = 0.5") {
    const auto cp = crossing_via_ed({0.7, 0.2, 0.5}, 0.3, 1.5);
    REQUIRE(cp.has_value());
    CHECK(std::abs(cp->g1_critical - 0.8198) < 1e-3);
    CHECK(cp->gap < 1e-8);
  }
  SUBCASE("U = 0.2, r = 2 has no crossing") {
    CHECK_FALSE(crossing_via_ed({0.7, 0.2, 2.0}, 0.1, 2.5).has_value());
  }
  SUBCASE("range below g1c") {
    CHECK_FALSE(crossing_via_ed({0.7, 0.2, 0.5}, 0.1, 0.7).has_value());
  }
}

TEST_CASE("property: critical-coupling formula agrees with ED") {
  std::mt19937_64 rng(35);
  std::uniform_real_distribution<double> d(0.2, 1.2), u(-0.5, 0.6), r(0.1, 0.9);
  EdCrossingOptions opt;
  opt.n_truncation = 150;
  opt.scan_points = 25;
  int done = 0;
  while (done < 20) {
    const CouplingFamily fam{d(rng), u(rng), r(rng)};
    const auto f = first_order_critical(fam);
    if (!f || f->g1_critical < 0.2 || f->g1_critical > 1.3) continue;
    const auto e = crossing_via_ed(fam, 0.5 * f->g1_critical, 1.5 * f->g1_critical, opt);
    REQUIRE(e.has_value());
    CHECK(std::abs(e->g1_critical - f->g1_critical) < 1e-3);
    ++done;
  }
}

TEST_CASE("Juddian point of the isotropic Rabi model") {
  const CouplingFamily qrm{1.0, 0.0, 1.0};
  const auto cps = juddian_crossings(qrm, 1, 0.1, 1.0);
  REQUIRE(cps.size() == 1);
  const auto& cp = cps.front();
  CHECK(cp.kind == CrossingKind::Juddian);
  CHECK(cp.pole_index == 1);
  CHECK(cp.energy == regular_pole_energy(qrm.at(cp.g1_critical), 1));
  // Two levels of opposite parity sit on the pole line there.
  const auto b = ed::solve_parity_blocks(qrm.at(cp.g1_critical), 200);
  auto closest = [&](const std::vector<double>& v) {
    double best = HUGE_VAL;
    for (double e : v) best = std::min(best, std::abs(e - cp.energy));
    return best;
  };
  CHECK(closest(b.even) < 1e-8);
  CHECK(closest(b.odd) < 1e-8);
  CHECK(juddian_crossings(qrm, 1, 0.01, 0.05).empty());
  CHECK_THROWS_AS(juddian_crossings(qrm, 0, 0.1, 1.0), DomainError);
}

TEST_CASE("bad inputs") {
  CHECK_THROWS_AS(find_levels(kRef, 1.0, 0.0, Parity::Even, 100), DomainError);
  CHECK_THROWS_AS(find_levels(kRef, 0.0, 1.0, Parity::Even, 10), DomainError);
  CHECK(find_levels(kRef, -20.0, -19.0, Parity::Even, 100).levels.empty());
}
