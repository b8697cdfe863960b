#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prevalence/corpus.hpp"

namespace prevalence {

// Lowercased tokens: maximal runs of [a-z0-9] plus non-ASCII bytes.
// No stemming, no stopword removal.
std::vector<std::string> tokenize(std::string_view text);

// Dense ngram -> index map over unigrams and bigrams.
class Vocabulary {
 public:
  int add_or_get(const std::string& ngram);
  std::optional<int> lookup(const std::string& ngram) const;
  int size() const { return static_cast<int>(by_index_.size()); }
  // ngrams ordered by index; index i holds the i-th ngram.
  const std::vector<std::string>& ngrams() const { return by_index_; }

 private:
  std::map<std::string, int> index_;
  std::vector<std::string> by_index_;
};

// Indices strictly increasing, values finite. Binary presence features.
struct FeatureVector {
  std::vector<std::pair<int, double>> items;
};

// Unigrams then bigrams of the review, in first-appearance order.
Vocabulary build_vocabulary(const Corpus& corpus);

// Binary presence over the given vocabulary; out-of-vocabulary ngrams dropped.
FeatureVector extract_features(std::string_view text, const Vocabulary& vocab);

struct LinearModel {
  Vocabulary vocabulary;
  std::vector<double> weights;  // length |V|
  double bias = 0;
  double cost_C = 1.0;
  // training metadata
  long train_size = 0;
  int train_passes = 0;
  bool converged = false;
  std::uint64_t train_seed = 0;

  double decision_value(const FeatureVector& x) const;
  // 1 iff the decision value is strictly positive; exact ties predict 0.
  int predict(const FeatureVector& x) const;
  int predict_text(std::string_view text) const;
};

// L2-regularized hinge loss, min_w 1/2 ||w||^2 + C sum_i max(0, 1 - y_i w.x_i),
// solved by dual coordinate descent with the bias as an augmented constant
// feature (so the bias is regularized too). Stops at relative duality gap
// <= 1e-6. Deterministic given (seed, data order).
LinearModel train(const Corpus& corpus, double cost_C, std::uint64_t seed = 1);

double balanced_accuracy(const std::vector<int>& gold, const std::vector<int>& predicted);

// Mean balanced accuracy over label-stratified folds for each grid value;
// the maximizing C wins, ties broken toward the smallest. A single-value grid
// short-circuits without cross-validation (scores left empty).
struct GridScore {
  double cost_C = 0;
  double mean_balanced_accuracy = 0;
};

struct CSelection {
  double best_C = 0;
  std::vector<GridScore> scores;
};

CSelection select_C_report(const Corpus& corpus, const std::vector<double>& grid, int folds,
                           std::uint64_t seed);
double select_C(const Corpus& corpus, const std::vector<double>& grid, int folds,
                std::uint64_t seed);

// Leave-one-group-out predictions: reviews of group j are predicted by a
// model trained on every other group. Group fold records retain the exact
// train/test id sets so callers can audit that no fold saw its own reviews.
struct GroupFold {
  std::string group_id;
  std::vector<std::string> train_ids;
  std::vector<std::string> predicted_ids;
};

struct GroupedCvPredictions {
  std::map<std::string, int> label_by_id;
  std::vector<GroupFold> folds;
};

GroupedCvPredictions cross_val_predict_by_group(const Corpus& corpus,
                                                const std::map<std::string, Corpus>& groups,
                                                double cost_C, std::uint64_t seed = 1);

// Versioned JSON model file; weights round-trip bit-exactly.
void save_model(const LinearModel& model, const std::string& path);
LinearModel load_model(const std::string& path);

}  // namespace prevalence
