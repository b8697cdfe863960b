#include "prevalence/calibration.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "prevalence/errors.hpp"

namespace prevalence {

SensitivityEstimate estimate_sensitivity(const Corpus& train_corpus, double cost_C,
                                         std::uint64_t seed) {
  const auto groups = group_by_hotel(train_corpus);
  if (groups.size() < 2) {
    throw ValidationError("estimate_sensitivity: need reviews from at least 2 hotels");
  }

  SensitivityEstimate est;
  est.cv = cross_val_predict_by_group(train_corpus, groups, cost_C, seed);
  for (const Review& r : train_corpus) {
    if (!r.label || *r.label != 1) continue;  // sensitivity uses gold-deceptive reviews only
    if (est.cv.label_by_id.at(r.id) == 1) {
      ++est.tp;
    } else {
      ++est.fn;
    }
  }
  if (est.tp + est.fn == 0) {
    throw ValidationError("estimate_sensitivity: no gold-deceptive reviews in training corpus");
  }
  est.eta = static_cast<double>(est.tp) / static_cast<double>(est.tp + est.fn);
  return est;
}

SpecificityEstimate estimate_specificity(const LinearModel& model, const Corpus& dev) {
  if (dev.empty()) throw ValidationError("estimate_specificity: development set is empty");
  SpecificityEstimate est;
  for (const Review& r : dev) {
    if (model.predict_text(r.text) == 0) {
      ++est.tn;
    } else {
      ++est.fp;
    }
  }
  est.theta = static_cast<double>(est.tn) / static_cast<double>(est.tn + est.fp);
  return est;
}

std::pair<BetaPair, BetaPair> hyperparams(const ConfusionCounts& c) {
  return {BetaPair(static_cast<double>(c.fn) + 1.0, static_cast<double>(c.tp) + 1.0),
          BetaPair(static_cast<double>(c.fp_dev) + 1.0, static_cast<double>(c.tn_dev) + 1.0)};
}

CalibrationResult calibrate(const Corpus& train_corpus, const Corpus& dev, double cost_C,
                            std::uint64_t seed) {
  const SensitivityEstimate sens = estimate_sensitivity(train_corpus, cost_C, seed);
  const LinearModel full_model = train(train_corpus, cost_C, seed);
  const SpecificityEstimate spec = estimate_specificity(full_model, dev);

  CalibrationResult cal;
  cal.counts = ConfusionCounts{sens.tp, sens.fn, spec.tn, spec.fp};
  cal.eta = sens.eta;
  cal.theta = spec.theta;
  std::tie(cal.beta, cal.gamma) = hyperparams(cal.counts);
  cal.assumptions = {
      "development reviews are assumed truthful; specificity may be underestimated",
      "specificity model is trained on the full training corpus with the selected C"};
  return cal;
}

void save_calibration(const CalibrationResult& cal, const std::string& path) {
  nlohmann::ordered_json doc;
  doc["eta"] = cal.eta;
  doc["theta"] = cal.theta;
  doc["tp"] = cal.counts.tp;
  doc["fn"] = cal.counts.fn;
  doc["tn_dev"] = cal.counts.tn_dev;
  doc["fp_dev"] = cal.counts.fp_dev;
  doc["beta"] = {cal.beta.c0, cal.beta.c1};
  doc["gamma"] = {cal.gamma.c0, cal.gamma.c1};
  doc["assumptions"] = cal.assumptions;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << doc.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

CalibrationResult load_calibration(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("calibration file " + path + ": malformed JSON: " + e.what());
  }
  CalibrationResult cal;
  cal.eta = doc.at("eta").get<double>();
  cal.theta = doc.at("theta").get<double>();
  cal.counts.tp = doc.at("tp").get<long>();
  cal.counts.fn = doc.at("fn").get<long>();
  cal.counts.tn_dev = doc.at("tn_dev").get<long>();
  cal.counts.fp_dev = doc.at("fp_dev").get<long>();
  cal.beta = BetaPair(doc.at("beta")[0].get<double>(), doc.at("beta")[1].get<double>());
  cal.gamma = BetaPair(doc.at("gamma")[0].get<double>(), doc.at("gamma")[1].get<double>());
  if (auto it = doc.find("assumptions"); it != doc.end()) {
    cal.assumptions = it->get<std::vector<std::string>>();
  }
  return cal;
}

}  // namespace prevalence
