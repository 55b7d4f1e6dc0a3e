#include "arsm/model.hpp"

#include <cmath>
#include <sstream>

#include "arsm/errors.hpp"

namespace arsm {

std::string_view to_string(Parity p) noexcept {
  return p == Parity::Even ? "even" : "odd";
}

ModelParams ModelParams::make(double delta, double g1, double g2,
                              double stark_u) {
  ModelParams p{delta, g1, g2, stark_u};
  p.validate();
  return p;
}

void ModelParams::validate() const {
  if (!std::isfinite(delta) || !std::isfinite(g1) || !std::isfinite(g2) ||
      !std::isfinite(stark_u)) {
    throw DomainError("model parameters must be finite");
  }
  if (g1 < 0.0 || g2 < 0.0) {
    throw DomainError("couplings g1 and g2 must be non-negative");
  }
  if (std::abs(stark_u) > 1.0 + kUnitStarkTolerance) {
    throw DomainError("|U| > 1 is not supported");
  }
}

SolverPath route(const ModelParams& p) {
  p.validate();
  return std::abs(p.stark_u) < 1.0 ? SolverPath::Boa : SolverPath::UnitStark;
}

DerivedParams derive(const ModelParams& p) {
  p.validate();
  if (std::abs(p.stark_u) >= 1.0) {
    std::ostringstream hint;
    hint << "use the unit-Stark solver";
    if (p.g1 + p.g2 > 0.0) {
      const auto ak = to_alpha_kappa(p);
      hint << " with alpha=" << ak.alpha << ", kappa=" << ak.kappa;
    }
    throw DomainError("displaced-oscillator expansion requires |U| < 1",
                      hint.str());
  }
  if (p.g1 * p.g2 == 0.0) {
    throw DegenerateCoupling(
        "g1*g2 = 0: beta vanishes and the recurrences are singular");
  }
  DerivedParams d;
  d.r = p.g2 / p.g1;
  d.lambda_plus = 0.5 * (p.g1 * p.g1 + p.g2 * p.g2);
  d.lambda_minus = 0.5 * (p.g1 * p.g1 - p.g2 * p.g2);
  d.beta = std::sqrt(p.g1 * p.g2);
  d.root_one_minus_u2 = std::sqrt(1.0 - p.stark_u * p.stark_u);
  d.w = d.beta / d.root_one_minus_u2;
  d.alpha = 0.5 * (p.g1 + p.g2);
  d.kappa = (p.g1 - p.g2) / (p.g1 + p.g2);
  return d;
}

AlphaKappa to_alpha_kappa(const ModelParams& p) {
  const double sum = p.g1 + p.g2;
  if (!(sum > 0.0)) {
    throw DegenerateCoupling("g1 = g2 = 0: kappa is undefined");
  }
  return {0.5 * sum, (p.g1 - p.g2) / sum};
}

Couplings from_alpha_kappa(double alpha, double kappa) {
  return {alpha * (1.0 + kappa), alpha * (1.0 - kappa)};
}

}  // namespace arsm
