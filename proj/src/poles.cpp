#include "arsm/poles.hpp"

#include <algorithm>
#include <cmath>

#include "arsm/errors.hpp"

namespace arsm {

namespace {

void require_boa_domain(const ModelParams& p) {
  p.validate();
  if (std::abs(p.stark_u) >= 1.0) {
    throw DomainError("pole ladder is defined only for |U| < 1",
                      "use the unit-Stark solver");
  }
}

}  // namespace

double first_pole_energy(const ModelParams& p) {
  require_boa_domain(p);
  const double u = p.stark_u;
  const double s = std::sqrt(1.0 - u * u);
  const double lp = 0.5 * (p.g1 * p.g1 + p.g2 * p.g2);
  const double lm = 0.5 * (p.g1 * p.g1 - p.g2 * p.g2);
  return -u * p.delta / (2.0 + 2.0 * s) - (lm * u / (1.0 + s) + lp) / s;
}

double regular_pole_energy(const ModelParams& p, int m) {
  require_boa_domain(p);
  const double u = p.stark_u;
  const double lp = 0.5 * (p.g1 * p.g1 + p.g2 * p.g2);
  return (1.0 - u * u) * m - lp - 0.5 * u * p.delta;
}

int nearest_regular_pole(const ModelParams& p, double energy) {
  const double spacing = 1.0 - p.stark_u * p.stark_u;
  const double offset = energy - regular_pole_energy(p, 0);
  const double m = std::round(offset / spacing);
  return static_cast<int>(std::max(1.0, m));
}

double distance_to_nearest_pole(const ModelParams& p, double energy,
                                int m_max) {
  double best = std::abs(energy - first_pole_energy(p));
  if (m_max >= 1) {
    const int m = std::min(nearest_regular_pole(p, energy), m_max);
    best = std::min(best, std::abs(energy - regular_pole_energy(p, m)));
  }
  return best;
}

}  // namespace arsm
