#pragma once

#include "arsm/model.hpp"

namespace arsm {

/// Energy at which the e_0 denominator vanishes,
///   E_0 = -U Delta / (2 + 2s) - (lambda_- U / (1 + s) + lambda_+) / s,
/// s = sqrt(1 - U^2). The form (1 - s)/U is rewritten as U/(1 + s) so the
/// expression is regular at U = 0.
double first_pole_energy(const ModelParams& p);

/// E_m = (1 - U^2) m - lambda_+ - U Delta / 2, m >= 1.
double regular_pole_energy(const ModelParams& p, int m);

/// Index m >= 1 of the regular pole nearest to `energy` (never 0).
int nearest_regular_pole(const ModelParams& p, double energy);

/// Distance from `energy` to the closest pole among E_0 and E_1..E_{m_max}.
double distance_to_nearest_pole(const ModelParams& p, double energy,
                                int m_max);

}  // namespace arsm
