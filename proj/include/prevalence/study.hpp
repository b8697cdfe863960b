#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "prevalence/bayes_model.hpp"
#include "prevalence/calibration.hpp"
#include "prevalence/corpus.hpp"
#include "prevalence/naive_model.hpp"
#include "prevalence/text_model.hpp"

namespace prevalence {

enum class Granularity { Monthly, Quarterly, Yearly };

Granularity parse_granularity(const std::string& s);
std::string granularity_name(Granularity g);

enum class PostingCost { High, Low };
enum class ExposureBenefit { Low, Medium, High };

struct CommunityProfile {
  std::string name;
  PostingCost posting_cost = PostingCost::Low;
  ExposureBenefit exposure_benefit = ExposureBenefit::Low;
};

// Built-in profiles for the six studied communities.
std::vector<CommunityProfile> default_profiles();
std::vector<CommunityProfile> load_profiles(const std::string& path);

// Calendar-aligned buckets keyed by bucket start (UTC). A bucket is emitted
// iff its own calendar window contains at least one review; with `cumulative`
// each emitted bucket additionally holds every earlier review.
std::vector<std::pair<std::int64_t, Corpus>> bucket_by_time(const Corpus& c, Granularity g,
                                                            bool cumulative);

struct BucketEstimate {
  std::int64_t bucket_start = 0;
  long n_reviews = 0;
  double pi_f = 0;
  bool naive_defined = false;  // false when the calibration is uninformative
  double pi_naive = 0;
  bool naive_out_of_range = false;
  double pi_bayes = 0;
  double ci_lo = 0;
  double ci_hi = 0;
};

struct PrevalenceSeries {
  std::string community;
  int policy_k = 1;
  Granularity granularity = Granularity::Quarterly;
  bool cumulative = true;
  std::vector<BucketEstimate> buckets;
  // (bucket start, n) of buckets below the estimation threshold.
  std::vector<std::pair<std::int64_t, long>> skipped;
};

struct SeriesOptions {
  Granularity granularity = Granularity::Quarterly;
  bool cumulative = true;
  long min_bucket = 30;
  GibbsConfig gibbs;
};

// Filter by reviewer posting threshold, bucket, then per bucket: classify,
// correct via the closed form, and run the Bayesian model.
PrevalenceSeries run_series(const Corpus& community_corpus, const LinearModel& model,
                            const CalibrationResult& cal, const SeriesOptions& opts, int k);

void write_series_csv(std::ostream& out, const PrevalenceSeries& series);

// Static line plot of pi_bayes over time with the shaded credible band.
std::string render_series_svg(const PrevalenceSeries& series);

struct CommunitySummary {
  std::string name;
  PostingCost posting_cost = PostingCost::Low;
  int policy_k = 1;
  double final_prevalence = 0;
  double trend_per_year = 0;  // least-squares slope of pi_bayes vs time
  long n_buckets = 0;
};

struct HypothesisReport {
  std::vector<CommunitySummary> communities;  // at the lowest policy k
  double low_cost_mean_final = 0;
  double high_cost_mean_final = 0;
  bool h1_low_cost_exceeds_high = false;
  // Per community with several policies: final prevalence by increasing k.
  struct PolicyTrail {
    std::string community;
    std::vector<std::pair<int, double>> final_by_k;
    bool strictly_decreasing = false;
  };
  std::vector<PolicyTrail> policy_trails;
  bool h2_prevalence_drops_with_k = false;
};

// Descriptive flags only; no significance testing.
HypothesisReport compare_hypotheses(const std::vector<PrevalenceSeries>& series_set,
                                    const std::vector<CommunityProfile>& profiles);

void write_hypothesis_report(std::ostream& out, const HypothesisReport& report);

}  // namespace prevalence
