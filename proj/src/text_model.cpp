#include "prevalence/text_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "prevalence/errors.hpp"
#include "prevalence/rng.hpp"

namespace prevalence {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char c : text) {
    if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
    const bool token_char = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c >= 0x80;
    if (token_char) {
      cur.push_back(static_cast<char>(c));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

int Vocabulary::add_or_get(const std::string& ngram) {
  auto [it, inserted] = index_.emplace(ngram, size());
  if (inserted) by_index_.push_back(ngram);
  return it->second;
}

std::optional<int> Vocabulary::lookup(const std::string& ngram) const {
  auto it = index_.find(ngram);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {

// Unigrams of the token list followed by its bigrams ("a b").
template <typename Fn>
void for_each_ngram(const std::vector<std::string>& tokens, Fn&& fn) {
  for (const std::string& t : tokens) fn(t);
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) fn(tokens[i] + " " + tokens[i + 1]);
}

}  // namespace

Vocabulary build_vocabulary(const Corpus& corpus) {
  Vocabulary vocab;
  for (const Review& r : corpus) {
    const auto tokens = tokenize(r.text);
    for_each_ngram(tokens, [&](const std::string& g) { vocab.add_or_get(g); });
  }
  return vocab;
}

FeatureVector extract_features(std::string_view text, const Vocabulary& vocab) {
  const auto tokens = tokenize(text);
  std::set<int> active;
  for_each_ngram(tokens, [&](const std::string& g) {
    if (auto idx = vocab.lookup(g)) active.insert(*idx);
  });
  FeatureVector fv;
  fv.items.reserve(active.size());
  for (int idx : active) fv.items.emplace_back(idx, 1.0);
  return fv;
}

double LinearModel::decision_value(const FeatureVector& x) const {
  double d = bias;
  for (const auto& [idx, v] : x.items) d += weights[static_cast<std::size_t>(idx)] * v;
  return d;
}

int LinearModel::predict(const FeatureVector& x) const { return decision_value(x) > 0.0 ? 1 : 0; }

int LinearModel::predict_text(std::string_view text) const {
  return predict(extract_features(text, vocabulary));
}

namespace {

struct DualSolution {
  std::vector<double> w;  // length dim + 1; last entry is the bias feature
  int passes = 0;
  bool converged = false;
};

// Dual coordinate descent for the L1-loss SVM dual:
//   min_a 1/2 a^T Q a - e^T a,  0 <= a_i <= C,  Q_ij = y_i y_j x_i.x_j
// with x augmented by a constant bias feature of value 1.
DualSolution solve_dual(const std::vector<FeatureVector>& xs, const std::vector<int>& ys, int dim,
                        double cost_C, std::uint64_t seed) {
  const std::size_t n = xs.size();
  const int bias_idx = dim;
  DualSolution sol;
  sol.w.assign(static_cast<std::size_t>(dim) + 1, 0.0);
  std::vector<double> alpha(n, 0.0);
  std::vector<double> q_diag(n);
  for (std::size_t i = 0; i < n; ++i) {
    double q = 1.0;  // bias feature
    for (const auto& [idx, v] : xs[i].items) q += v * v;
    q_diag[i] = q;
  }

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  Rng rng(seed);

  const double tol = 1e-6;
  const int max_passes = 4000;
  for (int pass = 1; pass <= max_passes; ++pass) {
    rng.shuffle(order);
    for (std::uint32_t i : order) {
      const double yi = ys[i] == 1 ? 1.0 : -1.0;
      double dot = sol.w[static_cast<std::size_t>(bias_idx)];
      for (const auto& [idx, v] : xs[i].items) dot += sol.w[static_cast<std::size_t>(idx)] * v;
      const double grad = yi * dot - 1.0;

      double pg = grad;
      if (alpha[i] <= 0.0 && grad > 0.0) pg = 0.0;
      if (alpha[i] >= cost_C && grad < 0.0) pg = 0.0;
      if (pg == 0.0) continue;

      const double next = std::clamp(alpha[i] - grad / q_diag[i], 0.0, cost_C);
      const double delta = next - alpha[i];
      if (delta == 0.0) continue;
      alpha[i] = next;
      const double step = delta * yi;
      sol.w[static_cast<std::size_t>(bias_idx)] += step;
      for (const auto& [idx, v] : xs[i].items) sol.w[static_cast<std::size_t>(idx)] += step * v;
    }

    // Relative duality gap: P(w) - D(alpha) over max(1, P).
    double w_norm2 = 0.0;
    for (double w : sol.w) w_norm2 += w * w;
    double hinge = 0.0;
    double alpha_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double yi = ys[i] == 1 ? 1.0 : -1.0;
      double dot = sol.w[static_cast<std::size_t>(bias_idx)];
      for (const auto& [idx, v] : xs[i].items) dot += sol.w[static_cast<std::size_t>(idx)] * v;
      hinge += std::max(0.0, 1.0 - yi * dot);
      alpha_sum += alpha[i];
    }
    const double primal = 0.5 * w_norm2 + cost_C * hinge;
    const double dual = alpha_sum - 0.5 * w_norm2;
    sol.passes = pass;
    if (primal - dual <= tol * std::max(1.0, std::abs(primal))) {
      sol.converged = true;
      break;
    }
  }
  return sol;
}

}  // namespace

LinearModel train(const Corpus& corpus, double cost_C, std::uint64_t seed) {
  if (!(cost_C > 0.0)) throw ValidationError("train: cost C must be positive");
  long n_pos = 0, n_neg = 0;
  for (const Review& r : corpus) {
    if (!r.label) throw ValidationError("train: review " + r.id + " is unlabeled");
    (*r.label == 1 ? n_pos : n_neg)++;
  }
  if (n_pos == 0 || n_neg == 0) {
    throw ValidationError("train: corpus must contain both truthful and deceptive reviews");
  }

  LinearModel model;
  model.vocabulary = build_vocabulary(corpus);
  model.cost_C = cost_C;
  model.train_size = static_cast<long>(corpus.size());
  model.train_seed = seed;

  std::vector<FeatureVector> xs;
  std::vector<int> ys;
  xs.reserve(corpus.size());
  ys.reserve(corpus.size());
  for (const Review& r : corpus) {
    xs.push_back(extract_features(r.text, model.vocabulary));
    ys.push_back(*r.label);
  }

  DualSolution sol = solve_dual(xs, ys, model.vocabulary.size(), cost_C, seed);
  model.bias = sol.w.back();
  sol.w.pop_back();
  model.weights = std::move(sol.w);
  model.train_passes = sol.passes;
  model.converged = sol.converged;
  return model;
}

double balanced_accuracy(const std::vector<int>& gold, const std::vector<int>& predicted) {
  if (gold.size() != predicted.size() || gold.empty()) {
    throw ValidationError("balanced_accuracy: size mismatch or empty");
  }
  long tp = 0, fn = 0, tn = 0, fp = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] == 1) {
      (predicted[i] == 1 ? tp : fn)++;
    } else {
      (predicted[i] == 0 ? tn : fp)++;
    }
  }
  if (tp + fn == 0 || tn + fp == 0) {
    throw ValidationError("balanced_accuracy: a class is absent from gold labels");
  }
  const double sens = static_cast<double>(tp) / static_cast<double>(tp + fn);
  const double spec = static_cast<double>(tn) / static_cast<double>(tn + fp);
  return 0.5 * (sens + spec);
}

double select_C(const Corpus& corpus, const std::vector<double>& grid, int folds,
                std::uint64_t seed) {
  if (grid.empty()) throw ValidationError("select_C: empty grid");
  std::vector<double> sorted_grid(grid);
  std::sort(sorted_grid.begin(), sorted_grid.end());
  if (sorted_grid.size() == 1) return sorted_grid[0];
  if (folds < 2) throw ValidationError("select_C: folds must be >= 2");

  // Label-stratified folds: shuffle each class, deal round-robin.
  std::vector<std::size_t> pos_idx, neg_idx;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!corpus[i].label) throw ValidationError("select_C: review " + corpus[i].id + " is unlabeled");
    (*corpus[i].label == 1 ? pos_idx : neg_idx).push_back(i);
  }
  if (pos_idx.size() < static_cast<std::size_t>(folds) ||
      neg_idx.size() < static_cast<std::size_t>(folds)) {
    throw ValidationError("select_C: each class needs at least one review per fold");
  }
  Rng rng(seed);
  rng.shuffle(pos_idx);
  rng.shuffle(neg_idx);
  std::vector<int> fold_of(corpus.size());
  for (std::size_t i = 0; i < pos_idx.size(); ++i) fold_of[pos_idx[i]] = static_cast<int>(i % folds);
  for (std::size_t i = 0; i < neg_idx.size(); ++i) fold_of[neg_idx[i]] = static_cast<int>(i % folds);

  double best_c = sorted_grid[0];
  double best_score = -1.0;
  for (double c : sorted_grid) {
    double score_sum = 0.0;
    for (int f = 0; f < folds; ++f) {
      Corpus train_part, val_part;
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        (fold_of[i] == f ? val_part : train_part).add(corpus[i]);
      }
      const LinearModel model = train(train_part, c, derive_seed(seed, static_cast<std::uint64_t>(f)));
      std::vector<int> gold, pred;
      gold.reserve(val_part.size());
      pred.reserve(val_part.size());
      for (const Review& r : val_part) {
        gold.push_back(*r.label);
        pred.push_back(model.predict_text(r.text));
      }
      score_sum += balanced_accuracy(gold, pred);
    }
    const double score = score_sum / folds;
    if (score > best_score) {
      best_score = score;
      best_c = c;
    }
  }
  return best_c;
}

GroupedCvPredictions cross_val_predict_by_group(const Corpus& corpus,
                                                const std::map<std::string, Corpus>& groups,
                                                double cost_C, std::uint64_t seed) {
  if (groups.size() < 2) {
    throw ValidationError("cross_val_predict_by_group: need at least 2 groups");
  }
  std::size_t total = 0;
  for (const auto& [gid, g] : groups) {
    total += g.size();
    for (const Review& r : g) {
      if (!corpus.contains(r.id)) {
        throw ValidationError("cross_val_predict_by_group: group review " + r.id +
                              " not in corpus");
      }
    }
  }
  if (total != corpus.size()) {
    throw ValidationError("cross_val_predict_by_group: groups do not partition the corpus");
  }

  GroupedCvPredictions out;
  for (const auto& [gid, group] : groups) {
    // Training set preserves original corpus order minus the held-out group.
    Corpus train_part(corpus.provenance());
    GroupFold fold;
    fold.group_id = gid;
    for (const Review& r : corpus) {
      if (!group.contains(r.id)) {
        train_part.add(r);
        fold.train_ids.push_back(r.id);
      }
    }
    const LinearModel model = train(train_part, cost_C, seed);
    for (const Review& r : group) {
      out.label_by_id[r.id] = model.predict_text(r.text);
      fold.predicted_ids.push_back(r.id);
    }
    out.folds.push_back(std::move(fold));
  }
  return out;
}

void save_model(const LinearModel& model, const std::string& path) {
  nlohmann::ordered_json doc;
  doc["version"] = 1;
  nlohmann::ordered_json vocab = nlohmann::ordered_json::object();
  const auto& ngrams = model.vocabulary.ngrams();
  for (std::size_t i = 0; i < ngrams.size(); ++i) {
    vocab[ngrams[i]] = static_cast<int>(i);
  }
  doc["vocabulary"] = std::move(vocab);
  doc["weights"] = model.weights;
  doc["bias"] = model.bias;
  doc["cost_C"] = model.cost_C;
  doc["training_metadata"] = {{"train_size", model.train_size},
                              {"passes", model.train_passes},
                              {"converged", model.converged},
                              {"seed", model.train_seed}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << doc.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

LinearModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("model file " + path + ": malformed JSON: " + e.what());
  }
  if (!doc.is_object() || doc.value("version", 0) != 1) {
    throw ValidationError("model file " + path + ": unsupported version");
  }

  LinearModel model;
  const auto& vocab = doc.at("vocabulary");
  std::vector<std::string> by_index(vocab.size());
  for (auto it = vocab.begin(); it != vocab.end(); ++it) {
    const int idx = it.value().get<int>();
    if (idx < 0 || static_cast<std::size_t>(idx) >= by_index.size() || !by_index[idx].empty()) {
      throw ValidationError("model file " + path + ": vocabulary indices are not dense");
    }
    by_index[static_cast<std::size_t>(idx)] = it.key();
  }
  for (const std::string& g : by_index) model.vocabulary.add_or_get(g);

  model.weights = doc.at("weights").get<std::vector<double>>();
  if (model.weights.size() != by_index.size()) {
    throw ValidationError("model file " + path + ": weight/vocabulary size mismatch");
  }
  model.bias = doc.at("bias").get<double>();
  model.cost_C = doc.at("cost_C").get<double>();
  if (auto it = doc.find("training_metadata"); it != doc.end()) {
    model.train_size = it->value("train_size", 0L);
    model.train_passes = it->value("passes", 0);
    model.converged = it->value("converged", false);
    model.train_seed = it->value("seed", std::uint64_t{0});
  }
  return model;
}

}  // namespace prevalence
