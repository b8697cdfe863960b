#pragma once

#include "prevalence/errors.hpp"

namespace prevalence {

// A Beta prior as an ordered pair of positive pseudo-count masses.
// Index convention, fixed project-wide and matched to the confusion counts:
//   alpha: [0] truthful mass, [1] deceptive mass
//   beta (sensitivity): [0] classifier-output-0 mass (FN), [1] output-1 mass (TP)
//   gamma (specificity): [0] output-1 mass (FP), [1] output-0 mass (TN)
struct BetaPair {
  double c0 = 1.0;
  double c1 = 1.0;

  BetaPair() = default;
  BetaPair(double a, double b) : c0(a), c1(b) {
    if (!(c0 > 0.0) || !(c1 > 0.0)) {
      throw ValidationError("BetaPair: components must be positive");
    }
  }

  double operator[](int i) const { return i == 0 ? c0 : c1; }
  double sum() const { return c0 + c1; }
  // Posterior-predictive mass on outcome 1, i.e. the prior mean of the rate.
  double mean1() const { return c1 / (c0 + c1); }
};

}  // namespace prevalence
