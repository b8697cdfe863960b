#include "prevalence/study.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "prevalence/errors.hpp"
#include "prevalence/format.hpp"
#include "prevalence/timeutil.hpp"

namespace prevalence {

Granularity parse_granularity(const std::string& s) {
  if (s == "monthly") return Granularity::Monthly;
  if (s == "quarterly") return Granularity::Quarterly;
  if (s == "yearly") return Granularity::Yearly;
  throw ValidationError("unknown granularity: " + s + " (monthly|quarterly|yearly)");
}

std::string granularity_name(Granularity g) {
  switch (g) {
    case Granularity::Monthly: return "monthly";
    case Granularity::Quarterly: return "quarterly";
    case Granularity::Yearly: return "yearly";
  }
  return "?";
}

std::vector<CommunityProfile> default_profiles() {
  using PC = PostingCost;
  using EB = ExposureBenefit;
  return {
      {"Orbitz", PC::High, EB::Low},      {"Priceline", PC::High, EB::Medium},
      {"Expedia", PC::High, EB::Medium},  {"Hotels.com", PC::High, EB::Medium},
      {"Yelp", PC::Low, EB::Low},         {"TripAdvisor", PC::Low, EB::High},
  };
}

namespace {

PostingCost parse_posting_cost(const std::string& s) {
  if (s == "High") return PostingCost::High;
  if (s == "Low") return PostingCost::Low;
  throw ValidationError("posting_cost must be High or Low, got " + s);
}

ExposureBenefit parse_exposure(const std::string& s) {
  if (s == "Low") return ExposureBenefit::Low;
  if (s == "Medium") return ExposureBenefit::Medium;
  if (s == "High") return ExposureBenefit::High;
  throw ValidationError("exposure_benefit must be Low, Medium or High, got " + s);
}

const char* posting_cost_name(PostingCost c) { return c == PostingCost::High ? "High" : "Low"; }

}  // namespace

std::vector<CommunityProfile> load_profiles(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("profiles file " + path + ": malformed JSON: " + e.what());
  }
  if (!doc.is_array()) throw ValidationError("profiles file " + path + ": expected an array");
  std::vector<CommunityProfile> out;
  for (const auto& item : doc) {
    CommunityProfile p;
    p.name = item.at("name").get<std::string>();
    p.posting_cost = parse_posting_cost(item.at("posting_cost").get<std::string>());
    p.exposure_benefit = parse_exposure(item.at("exposure_benefit").get<std::string>());
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

std::int64_t bucket_start_of(std::int64_t ts, Granularity g) {
  const CivilDate cd = civil_of_epoch(ts);
  switch (g) {
    case Granularity::Monthly: return civil_to_epoch(cd.year, cd.month, 1);
    case Granularity::Quarterly:
      return civil_to_epoch(cd.year, ((cd.month - 1) / 3) * 3 + 1, 1);
    case Granularity::Yearly: return civil_to_epoch(cd.year, 1, 1);
  }
  throw ValidationError("bucket_start_of: bad granularity");
}

}  // namespace

std::vector<std::pair<std::int64_t, Corpus>> bucket_by_time(const Corpus& c, Granularity g,
                                                            bool cumulative) {
  std::set<std::int64_t> occupied;
  for (const Review& r : c) occupied.insert(bucket_start_of(r.timestamp, g));

  std::vector<std::pair<std::int64_t, Corpus>> out;
  for (std::int64_t start : occupied) {
    Corpus bucket(c.provenance());
    for (const Review& r : c) {
      const std::int64_t rb = bucket_start_of(r.timestamp, g);
      if (cumulative ? rb <= start : rb == start) bucket.add(r);
    }
    out.emplace_back(start, std::move(bucket));
  }
  return out;
}

PrevalenceSeries run_series(const Corpus& community_corpus, const LinearModel& model,
                            const CalibrationResult& cal, const SeriesOptions& opts, int k) {
  PrevalenceSeries series;
  series.community = community_corpus.empty() ? "" : community_corpus[0].community;
  series.policy_k = k;
  series.granularity = opts.granularity;
  series.cumulative = opts.cumulative;

  const Corpus filtered = filter_by_reviewer_min_posts(community_corpus, k);
  const auto buckets = bucket_by_time(filtered, opts.granularity, opts.cumulative);

  std::size_t bucket_index = 0;
  for (const auto& [start, bucket] : buckets) {
    const std::size_t this_index = bucket_index++;
    if (static_cast<long>(bucket.size()) < opts.min_bucket) {
      series.skipped.emplace_back(start, static_cast<long>(bucket.size()));
      continue;
    }
    std::vector<std::uint8_t> outputs;
    outputs.reserve(bucket.size());
    for (const Review& r : bucket) {
      outputs.push_back(static_cast<std::uint8_t>(model.predict_text(r.text)));
    }

    BucketEstimate est;
    est.bucket_start = start;
    est.n_reviews = static_cast<long>(bucket.size());
    est.pi_f = positive_rate(outputs);
    try {
      const NaiveEstimate ne = naive_estimate(est.pi_f, cal.eta, cal.theta);
      est.naive_defined = true;
      est.pi_naive = ne.pi_naive;
      est.naive_out_of_range = ne.out_of_range;
    } catch (const ValidationError&) {
      est.naive_defined = false;
    }

    GibbsConfig cfg = opts.gibbs;
    cfg.seed = derive_seed(opts.gibbs.seed, this_index);
    const PosteriorSummary post = estimate_prevalence(outputs, cfg.alpha, cal.beta, cal.gamma, cfg);
    est.pi_bayes = post.pi_mean;
    est.ci_lo = post.pi_lo;
    est.ci_hi = post.pi_hi;
    series.buckets.push_back(est);
  }
  return series;
}

void write_series_csv(std::ostream& out, const PrevalenceSeries& series) {
  out << "community,policy_k,bucket_start,n_reviews,pi_f,pi_naive,naive_out_of_range,pi_bayes,"
         "ci_lo,ci_hi\n";
  for (const BucketEstimate& b : series.buckets) {
    out << series.community << ',' << series.policy_k << ',' << format_iso8601_utc(b.bucket_start)
        << ',' << b.n_reviews << ',' << fmt_double(b.pi_f) << ','
        << (b.naive_defined ? fmt_double(b.pi_naive) : "nan") << ','
        << (b.naive_defined && b.naive_out_of_range ? 1 : 0) << ',' << fmt_double(b.pi_bayes)
        << ',' << fmt_double(b.ci_lo) << ',' << fmt_double(b.ci_hi) << "\n";
  }
}

namespace {

std::string svg_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string month_label(std::int64_t ts) {
  const CivilDate cd = civil_of_epoch(ts);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u", cd.year, cd.month);
  return buf;
}

}  // namespace

std::string render_series_svg(const PrevalenceSeries& series) {
  const double width = 720, height = 440;
  const double ml = 64, mr = 24, mt = 40, mb = 48;
  const double pw = width - ml - mr, ph = height - mt - mb;

  const auto& buckets = series.buckets;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << ml << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">"
      << series.community << " deception prevalence (k=" << series.policy_k << ", "
      << granularity_name(series.granularity) << (series.cumulative ? ", cumulative" : "")
      << ")</text>\n";

  if (!buckets.empty()) {
    double y_max = 0;
    for (const auto& b : buckets) y_max = std::max(y_max, b.ci_hi);
    y_max = std::max(y_max * 1.15, 0.01);
    const std::int64_t t0 = buckets.front().bucket_start;
    const std::int64_t t1 = buckets.back().bucket_start;
    const double span = t1 > t0 ? static_cast<double>(t1 - t0) : 1.0;

    auto x_of = [&](std::int64_t t) {
      if (buckets.size() == 1) return ml + pw / 2;
      return ml + pw * (static_cast<double>(t - t0) / span);
    };
    auto y_of = [&](double v) { return mt + ph * (1.0 - v / y_max); };

    // credible band
    svg << "<polygon fill=\"#aec6e8\" fill-opacity=\"0.55\" stroke=\"none\" points=\"";
    for (const auto& b : buckets) {
      svg << svg_coord(x_of(b.bucket_start)) << ',' << svg_coord(y_of(b.ci_hi)) << ' ';
    }
    for (auto it = buckets.rbegin(); it != buckets.rend(); ++it) {
      svg << svg_coord(x_of(it->bucket_start)) << ',' << svg_coord(y_of(it->ci_lo)) << ' ';
    }
    svg << "\"/>\n";

    // mean line
    svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
    for (const auto& b : buckets) {
      svg << svg_coord(x_of(b.bucket_start)) << ',' << svg_coord(y_of(b.pi_bayes)) << ' ';
    }
    svg << "\"/>\n";

    // y axis with 5 ticks
    svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph
        << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
      const double v = y_max * t / 4.0;
      const double y = y_of(v);
      char label[32];
      std::snprintf(label, sizeof(label), "%.3f", v);
      svg << "<line x1=\"" << ml - 4 << "\" y1=\"" << svg_coord(y) << "\" x2=\"" << ml
          << "\" y2=\"" << svg_coord(y) << "\" stroke=\"black\"/>\n";
      svg << "<text x=\"" << ml - 8 << "\" y=\"" << svg_coord(y + 4)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << label
          << "</text>\n";
    }

    // x axis with up to 8 bucket labels
    svg << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\""
        << mt + ph << "\" stroke=\"black\"/>\n";
    const std::size_t step = std::max<std::size_t>(1, (buckets.size() + 7) / 8);
    for (std::size_t i = 0; i < buckets.size(); i += step) {
      const double x = x_of(buckets[i].bucket_start);
      svg << "<line x1=\"" << svg_coord(x) << "\" y1=\"" << mt + ph << "\" x2=\"" << svg_coord(x)
          << "\" y2=\"" << mt + ph + 4 << "\" stroke=\"black\"/>\n";
      svg << "<text x=\"" << svg_coord(x) << "\" y=\"" << mt + ph + 18
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
          << month_label(buckets[i].bucket_start) << "</text>\n";
    }
  } else {
    svg << "<text x=\"" << ml << "\" y=\"" << mt + ph / 2
        << "\" font-family=\"sans-serif\" font-size=\"13\">no buckets met the estimation "
           "threshold</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

namespace {

double ols_slope_per_year(const std::vector<BucketEstimate>& buckets) {
  const std::size_t n = buckets.size();
  if (n < 2) return 0.0;
  const double t0 = static_cast<double>(buckets.front().bucket_start);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& b : buckets) {
    const double x = (static_cast<double>(b.bucket_start) - t0) / (365.25 * 86400.0);
    sx += x;
    sy += b.pi_bayes;
    sxx += x * x;
    sxy += x * b.pi_bayes;
  }
  const double denom = n * sxx - sx * sx;
  return denom == 0.0 ? 0.0 : (n * sxy - sx * sy) / denom;
}

}  // namespace

HypothesisReport compare_hypotheses(const std::vector<PrevalenceSeries>& series_set,
                                    const std::vector<CommunityProfile>& profiles) {
  if (series_set.empty()) throw ValidationError("compare_hypotheses: no series given");

  std::map<std::string, const CommunityProfile*> profile_of;
  for (const auto& p : profiles) profile_of[p.name] = &p;

  // Lowest-k series per community drives the H1 comparison.
  std::map<std::string, const PrevalenceSeries*> lowest_k;
  std::map<std::string, std::map<int, const PrevalenceSeries*>> by_community_k;
  for (const auto& s : series_set) {
    if (s.buckets.empty()) continue;
    auto [it, inserted] = lowest_k.try_emplace(s.community, &s);
    if (!inserted && s.policy_k < it->second->policy_k) it->second = &s;
    by_community_k[s.community][s.policy_k] = &s;
  }

  HypothesisReport rep;
  double low_sum = 0, high_sum = 0;
  long low_n = 0, high_n = 0;
  for (const auto& [name, series] : lowest_k) {
    auto pit = profile_of.find(name);
    if (pit == profile_of.end()) {
      throw ValidationError("compare_hypotheses: no profile for community " + name);
    }
    CommunitySummary cs;
    cs.name = name;
    cs.posting_cost = pit->second->posting_cost;
    cs.policy_k = series->policy_k;
    cs.final_prevalence = series->buckets.back().pi_bayes;
    cs.trend_per_year = ols_slope_per_year(series->buckets);
    cs.n_buckets = static_cast<long>(series->buckets.size());
    if (cs.posting_cost == PostingCost::Low) {
      low_sum += cs.final_prevalence;
      ++low_n;
    } else {
      high_sum += cs.final_prevalence;
      ++high_n;
    }
    rep.communities.push_back(std::move(cs));
  }
  if (low_n > 0) rep.low_cost_mean_final = low_sum / low_n;
  if (high_n > 0) rep.high_cost_mean_final = high_sum / high_n;
  rep.h1_low_cost_exceeds_high =
      low_n > 0 && high_n > 0 && rep.low_cost_mean_final > rep.high_cost_mean_final;

  bool any_trail = false;
  bool all_decreasing = true;
  for (const auto& [name, by_k] : by_community_k) {
    if (by_k.size() < 2) continue;
    HypothesisReport::PolicyTrail trail;
    trail.community = name;
    trail.strictly_decreasing = true;
    double prev = 0;
    bool first = true;
    for (const auto& [k, series] : by_k) {
      const double final_p = series->buckets.back().pi_bayes;
      trail.final_by_k.emplace_back(k, final_p);
      if (!first && !(final_p < prev)) trail.strictly_decreasing = false;
      prev = final_p;
      first = false;
    }
    any_trail = true;
    all_decreasing = all_decreasing && trail.strictly_decreasing;
    rep.policy_trails.push_back(std::move(trail));
  }
  rep.h2_prevalence_drops_with_k = any_trail && all_decreasing;
  return rep;
}

void write_hypothesis_report(std::ostream& out, const HypothesisReport& rep) {
  nlohmann::ordered_json doc;
  nlohmann::ordered_json comms = nlohmann::ordered_json::array();
  for (const auto& c : rep.communities) {
    comms.push_back({{"name", c.name},
                     {"posting_cost", posting_cost_name(c.posting_cost)},
                     {"policy_k", c.policy_k},
                     {"final_prevalence", c.final_prevalence},
                     {"trend_per_year", c.trend_per_year},
                     {"n_buckets", c.n_buckets}});
  }
  doc["communities"] = std::move(comms);
  doc["h1"] = {{"low_cost_mean_final", rep.low_cost_mean_final},
               {"high_cost_mean_final", rep.high_cost_mean_final},
               {"low_cost_exceeds_high", rep.h1_low_cost_exceeds_high}};
  nlohmann::ordered_json trails = nlohmann::ordered_json::array();
  for (const auto& t : rep.policy_trails) {
    nlohmann::ordered_json by_k = nlohmann::ordered_json::array();
    for (const auto& [k, v] : t.final_by_k) by_k.push_back({{"k", k}, {"final_prevalence", v}});
    trails.push_back({{"community", t.community},
                      {"final_by_k", std::move(by_k)},
                      {"strictly_decreasing", t.strictly_decreasing}});
  }
  doc["h2"] = {{"trails", std::move(trails)},
               {"prevalence_drops_with_k", rep.h2_prevalence_drops_with_k}};
  out << doc.dump(2) << "\n";
}

}  // namespace prevalence
