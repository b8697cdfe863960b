#include "prevalence/synthetic.hpp"

#include <cmath>
#include <cstdio>

#include "prevalence/errors.hpp"
#include "prevalence/rng.hpp"
#include "prevalence/timeutil.hpp"

namespace prevalence {

void GenerativeParams::validate() const {
  auto rate_ok = [](double r) { return r >= 0.0 && r <= 1.0; };
  if (!rate_ok(pi_star) || !rate_ok(eta_star) || !rate_ok(theta_star)) {
    throw ValidationError("GenerativeParams: rates must lie in [0,1]");
  }
  if (n <= 0) throw ValidationError("GenerativeParams: n must be positive");
}

LabelsOutputs generate_labels_outputs(const GenerativeParams& p) {
  p.validate();
  Rng rng(p.seed);
  LabelsOutputs lo;
  lo.labels.resize(static_cast<std::size_t>(p.n));
  lo.outputs.resize(static_cast<std::size_t>(p.n));
  for (long i = 0; i < p.n; ++i) {
    const bool deceptive = rng.bernoulli(p.pi_star);
    lo.labels[i] = deceptive ? 1 : 0;
    const double p_positive = deceptive ? p.eta_star : 1.0 - p.theta_star;
    lo.outputs[i] = rng.bernoulli(p_positive) ? 1 : 0;
  }
  return lo;
}

namespace {

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

}  // namespace

ExactPosterior exact_posterior(const std::vector<std::uint8_t>& outputs, const BetaPair& alpha,
                               const BetaPair& beta, const BetaPair& gamma) {
  const int n = static_cast<int>(outputs.size());
  if (n == 0) throw ValidationError("exact_posterior: outputs must be non-empty");
  if (n > 20) {
    throw ValidationError("exact_posterior: N must be <= 20 (2^N enumeration), got " +
                          std::to_string(n));
  }

  std::uint32_t f_mask = 0;
  for (int i = 0; i < n; ++i) {
    if (outputs[i]) f_mask |= (1u << i);
  }
  const int m1 = __builtin_popcount(f_mask);  // sites with f = 1
  const int m0 = n - m1;

  // The assignment weight depends on the labels only through
  // (X1, X0) = (# y=1 among f=1 sites, # y=1 among f=0 sites); tabulate the
  // log-weight once per pair and sum over all 2^N assignments.
  const double log_prior_norm = log_beta(alpha.c1, alpha.c0) + log_beta(beta.c1, beta.c0) +
                                log_beta(gamma.c1, gamma.c0);
  std::vector<std::vector<double>> logw(static_cast<std::size_t>(m1 + 1),
                                        std::vector<double>(static_cast<std::size_t>(m0 + 1)));
  double max_logw = -1e300;
  for (int x1 = 0; x1 <= m1; ++x1) {
    for (int x0 = 0; x0 <= m0; ++x0) {
      const int n1 = x1 + x0;
      const int y1 = m1 - x1;  // truthful-labeled sites the classifier flagged
      const int y0 = m0 - x0;
      const double lw = log_beta(alpha.c1 + n1, alpha.c0 + (n - n1)) +
                        log_beta(beta.c1 + x1, beta.c0 + x0) +
                        log_beta(gamma.c1 + y0, gamma.c0 + y1) - log_prior_norm;
      logw[x1][x0] = lw;
      max_logw = std::max(max_logw, lw);
    }
  }

  ExactPosterior out;
  out.per_review_p1.assign(static_cast<std::size_t>(n), 0.0);
  double z = 0.0;
  double pi_acc = 0.0;
  const std::uint32_t limit = 1u << n;
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    const int x1 = __builtin_popcount(mask & f_mask);
    const int x0 = __builtin_popcount(mask & ~f_mask & (limit - 1));
    const double w = std::exp(logw[x1][x0] - max_logw);
    z += w;
    pi_acc += w * (alpha.c1 + (x1 + x0)) / (alpha.sum() + n);
    std::uint32_t bits = mask;
    while (bits) {
      const int i = __builtin_ctz(bits);
      out.per_review_p1[static_cast<std::size_t>(i)] += w;
      bits &= bits - 1;
    }
  }
  out.pi_mean = pi_acc / z;
  for (double& p : out.per_review_p1) p /= z;
  out.log_evidence = max_logw + std::log(z);
  return out;
}

namespace {

std::string make_review_text(int label, double overlap, const TextCorpusOptions& opts, Rng& rng) {
  const int half = opts.vocab_size / 2;
  const int n_tokens =
      opts.min_tokens + static_cast<int>(rng.below(
                            static_cast<std::uint64_t>(opts.max_tokens - opts.min_tokens + 1)));
  std::string text;
  text.reserve(static_cast<std::size_t>(n_tokens) * 7);
  char word[16];
  for (int t = 0; t < n_tokens; ++t) {
    int w;
    if (rng.bernoulli(overlap)) {
      w = static_cast<int>(rng.below(static_cast<std::uint64_t>(opts.vocab_size)));
    } else {
      w = static_cast<int>(rng.below(static_cast<std::uint64_t>(half)));
      if (label == 1) w += half;
    }
    std::snprintf(word, sizeof(word), "w%04d", w);
    if (t) text += ' ';
    text += word;
  }
  return text;
}

std::string hotel_name(int i) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "hotel-%02d", i);
  return buf;
}

}  // namespace

Corpus generate_text_corpus(long n_truthful, long n_deceptive, double vocab_overlap,
                            std::uint64_t seed, const TextCorpusOptions& opts) {
  if (n_truthful < 1 || n_deceptive < 1) {
    throw ValidationError("generate_text_corpus: class counts must be >= 1");
  }
  if (vocab_overlap < 0.0 || vocab_overlap > 1.0) {
    throw ValidationError("generate_text_corpus: vocab_overlap must be in [0,1]");
  }
  Rng rng(seed);
  Corpus c("synthetic");

  // Interleave classes so every hotel sees both labels.
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(n_truthful + n_deceptive));
  long t = 0, d = 0;
  while (t < n_truthful || d < n_deceptive) {
    if (t < n_truthful) {
      labels.push_back(0);
      ++t;
    }
    if (d < n_deceptive) {
      labels.push_back(1);
      ++d;
    }
  }

  const std::int64_t start = civil_to_epoch(2010, 1, 1);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    Review r;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "syn-%06zu", i);
    r.id = buf;
    r.community = opts.community;
    r.hotel_id = hotel_name(static_cast<int>(i % static_cast<std::size_t>(opts.hotels)) + 1);
    std::snprintf(buf, sizeof(buf), "reviewer-%06zu", i);
    r.reviewer_id = buf;
    r.timestamp = start + static_cast<std::int64_t>(i) * 21600;  // 6h apart
    r.rating = 5;
    r.label = labels[i];
    r.text = make_review_text(labels[i], vocab_overlap, opts, rng);
    c.add(std::move(r));
  }
  return c;
}

Corpus generate_two_tier_community(const TwoTierParams& p) {
  if (p.quarters < 1 || p.singles_per_quarter < 0 || p.loyal_per_quarter < 0 ||
      p.loyal_posts < 1) {
    throw ValidationError("generate_two_tier_community: bad shape parameters");
  }
  for (double r : {p.rate_first, p.rate_second, p.rate_later}) {
    if (r < 0.0 || r > 1.0) {
      throw ValidationError("generate_two_tier_community: rates must lie in [0,1]");
    }
  }

  Rng rng(p.seed);
  TextCorpusOptions text_opts = p.text;
  text_opts.community = p.community;

  struct Post {
    std::string reviewer;
    int quarter;
    int ordinal;  // 1-based position in the reviewer's history
  };
  std::vector<Post> posts;
  for (int q = 0; q < p.quarters; ++q) {
    for (int i = 0; i < p.singles_per_quarter; ++i) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "single-%03d-%04d", q, i);
      posts.push_back(Post{buf, q, 1});
    }
    for (int i = 0; i < p.loyal_per_quarter; ++i) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "loyal-%03d-%04d", q, i);
      for (int o = 0; o < p.loyal_posts && q + o < p.quarters; ++o) {
        posts.push_back(Post{buf, q + o, o + 1});
      }
    }
  }

  Corpus c("synthetic two-tier");
  int seq = 0;
  for (const Post& post : posts) {
    const double rate = post.ordinal == 1   ? p.rate_first
                        : post.ordinal == 2 ? p.rate_second
                                            : p.rate_later;
    const int label = rng.bernoulli(rate) ? 1 : 0;

    const int month0 = post.quarter * 3;
    const int year = p.start_year + month0 / 12;
    const unsigned month = static_cast<unsigned>(month0 % 12) + 1;
    // Spread posts across the quarter; seconds offset keeps ids unique in time.
    const std::int64_t day = static_cast<std::int64_t>(rng.below(85));
    const std::int64_t ts = civil_to_epoch(year, month, 1) + day * 86400 + seq % 86400;

    Review r;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "tt-%06d", seq);
    r.id = buf;
    r.community = p.community;
    r.hotel_id = hotel_name(seq % 40 + 1);
    r.reviewer_id = post.reviewer;
    r.timestamp = ts;
    r.rating = 5;
    r.label = label;
    r.text = make_review_text(label, p.vocab_overlap, text_opts, rng);
    c.add(std::move(r));
    ++seq;
  }
  return c;
}

}  // namespace prevalence
