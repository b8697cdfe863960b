#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prevalence/corpus.hpp"
#include "prevalence/priors.hpp"
#include "prevalence/text_model.hpp"

namespace prevalence {

struct ConfusionCounts {
  long tp = 0;
  long fn = 0;
  long tn_dev = 0;
  long fp_dev = 0;
};

struct CalibrationResult {
  double eta = 0;    // tp / (tp + fn)
  double theta = 0;  // tn_dev / (tn_dev + fp_dev)
  ConfusionCounts counts;
  BetaPair beta{1, 1};   // <fn+1, tp+1>
  BetaPair gamma{1, 1};  // <fp_dev+1, tn_dev+1>
  std::vector<std::string> assumptions;
};

struct SensitivityEstimate {
  double eta = 0;
  long tp = 0;
  long fn = 0;
  GroupedCvPredictions cv;  // retained for fold-isolation audits
};

struct SpecificityEstimate {
  double theta = 0;
  long tn = 0;
  long fp = 0;
};

// Leave-one-hotel-out cross-validation on the labeled training corpus;
// sensitivity is computed over the gold-deceptive reviews only.
SensitivityEstimate estimate_sensitivity(const Corpus& train, double cost_C,
                                         std::uint64_t seed = 1);

// Every development review is assumed truthful; specificity is the fraction
// the model leaves unflagged. The assumption is recorded by calibrate().
SpecificityEstimate estimate_specificity(const LinearModel& model, const Corpus& dev);

// beta = <fn+1, tp+1>, gamma = <fp_dev+1, tn_dev+1>.
std::pair<BetaPair, BetaPair> hyperparams(const ConfusionCounts& counts);

// Full procedure: hotel-grouped CV for sensitivity, then a model trained on
// the entire training corpus scores the development set for specificity.
CalibrationResult calibrate(const Corpus& train, const Corpus& dev, double cost_C,
                            std::uint64_t seed = 1);

void save_calibration(const CalibrationResult& cal, const std::string& path);
CalibrationResult load_calibration(const std::string& path);

}  // namespace prevalence
