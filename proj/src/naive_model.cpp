#include "prevalence/naive_model.hpp"

#include "prevalence/errors.hpp"

namespace prevalence {

double positive_rate(const std::vector<std::uint8_t>& predictions) {
  if (predictions.empty()) throw ValidationError("positive_rate: empty prediction list");
  long positives = 0;
  for (std::uint8_t p : predictions) positives += p ? 1 : 0;
  return static_cast<double>(positives) / static_cast<double>(predictions.size());
}

NaiveEstimate naive_estimate(double pi_f, double eta, double theta) {
  NaiveEstimate e;
  e.pi_f = pi_f;
  e.eta = eta;
  e.theta = theta;
  e.denominator = eta - (1.0 - theta);
  if (e.denominator == 0.0) {
    throw ValidationError("naive_estimate: uninformative classifier (eta + theta = 1)");
  }
  e.pi_naive = (pi_f - (1.0 - theta)) / e.denominator;
  e.out_of_range = e.pi_naive < 0.0 || e.pi_naive > 1.0;
  return e;
}

}  // namespace prevalence
