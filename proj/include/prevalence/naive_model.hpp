#pragma once

#include <cstdint>
#include <vector>

namespace prevalence {

// Closed-form corrected estimate: the observed positive-prediction rate is
// shifted by the false-positive rate and rescaled by the gap between the
// true- and false-positive rates. The result is deliberately NOT clamped to
// [0,1]; out-of-range values are diagnostic and only flagged.
struct NaiveEstimate {
  double pi_naive = 0;
  double pi_f = 0;
  double eta = 0;
  double theta = 0;
  bool out_of_range = false;
  double denominator = 0;  // eta - (1 - theta); report a warning when |.| < 1e-6
};

// Fraction of positive predictions; errors on an empty list.
double positive_rate(const std::vector<std::uint8_t>& predictions);

// Throws ValidationError when eta + theta == 1 (uninformative classifier).
NaiveEstimate naive_estimate(double pi_f, double eta, double theta);

}  // namespace prevalence
