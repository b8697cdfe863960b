#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "prevalence/corpus.hpp"
#include "prevalence/priors.hpp"

namespace prevalence {

// Ground-truth generative process: y_i ~ Bernoulli(pi_star); the classifier
// output is Bernoulli(eta_star) for deceptive reviews and
// Bernoulli(1 - theta_star) for truthful ones.
struct GenerativeParams {
  double pi_star = 0.08;
  double eta_star = 0.90;
  double theta_star = 0.89;
  long n = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct LabelsOutputs {
  std::vector<std::uint8_t> labels;
  std::vector<std::uint8_t> outputs;
};

LabelsOutputs generate_labels_outputs(const GenerativeParams& p);

// Exact collapsed posterior by summation over all 2^N label assignments.
// Feasible for N <= 20; the weight of each assignment is a product of three
// Beta-function ratios in log space.
struct ExactPosterior {
  double pi_mean = 0;
  std::vector<double> per_review_p1;
  double log_evidence = 0;
};

ExactPosterior exact_posterior(const std::vector<std::uint8_t>& outputs, const BetaPair& alpha,
                               const BetaPair& beta, const BetaPair& gamma);

// Desk-scale labeled text corpus with controllable class separability.
// Tokens are drawn from a shared uniform distribution with probability
// `vocab_overlap` and otherwise from a class-exclusive half of the
// vocabulary: overlap 0 gives disjoint vocabularies, overlap 1 identical
// distributions. Reviews are spread over 20 hotels and distinct reviewers.
struct TextCorpusOptions {
  int vocab_size = 1600;
  int min_tokens = 25;
  int max_tokens = 45;
  int hotels = 20;
  std::string community = "synthetic";
};

Corpus generate_text_corpus(long n_truthful, long n_deceptive, double vocab_overlap,
                            std::uint64_t seed, const TextCorpusOptions& opts = {});

// Community where deception concentrates in a reviewer's earliest posts:
// a review's deception rate depends on its ordinal within the reviewer's
// posting history (1st post, 2nd post, 3rd and later). Single-post reviewers
// arrive every quarter; "loyal" reviewers post once per quarter for
// `loyal_posts` consecutive quarters.
struct TwoTierParams {
  std::string community = "two-tier";
  int quarters = 8;
  int start_year = 2010;
  int singles_per_quarter = 400;
  int loyal_per_quarter = 200;
  int loyal_posts = 4;
  double rate_first = 0.15;
  double rate_second = 0.08;
  double rate_later = 0.02;
  double vocab_overlap = 0.25;
  std::uint64_t seed = 0;
  TextCorpusOptions text;
};

Corpus generate_two_tier_community(const TwoTierParams& p);

}  // namespace prevalence
