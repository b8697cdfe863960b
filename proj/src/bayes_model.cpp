#include "prevalence/bayes_model.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <ostream>

namespace prevalence {

void GibbsConfig::validate() const {
  if (iterations <= 0) throw ValidationError("GibbsConfig: iterations must be positive");
  if (burn_in < 0 || burn_in >= iterations) {
    throw ValidationError("GibbsConfig: burn_in must be in [0, iterations)");
  }
  if (lag < 1) throw ValidationError("GibbsConfig: lag must be >= 1");
  if (chains < 1) throw ValidationError("GibbsConfig: chains must be >= 1");
  if (retained_per_chain() < 30) {
    throw ValidationError("GibbsConfig: fewer than 30 retained samples per chain");
  }
}

GibbsState GibbsState::from_labels(std::vector<std::uint8_t> labels,
                                   const std::vector<std::uint8_t>& outputs) {
  GibbsState s;
  s.labels = std::move(labels);
  for (std::size_t i = 0; i < s.labels.size(); ++i) {
    if (s.labels[i]) {
      ++s.x[outputs[i]];
    } else {
      ++s.yc[outputs[i]];
    }
  }
  return s;
}

GibbsState init_state(const std::vector<std::uint8_t>& outputs, Rng& rng) {
  if (outputs.empty()) throw ValidationError("init_state: outputs must be non-empty");
  std::vector<std::uint8_t> labels(outputs.size());
  for (auto& y : labels) y = rng.bernoulli(0.5) ? 1 : 0;
  return GibbsState::from_labels(std::move(labels), outputs);
}

double conditional_weight_y1(const BetaPair& alpha, const BetaPair& beta, long n1_minus,
                             long x_f_minus, int f_i) {
  return (alpha.c1 + n1_minus) * (beta[f_i] + x_f_minus) / (beta.sum() + n1_minus);
}

double conditional_weight_y0(const BetaPair& alpha, const BetaPair& gamma, long n0_minus,
                             long y_f_minus, int f_i) {
  return (alpha.c0 + n0_minus) * (gamma[1 - f_i] + y_f_minus) / (gamma.sum() + n0_minus);
}

void gibbs_sweep(GibbsState& state, const std::vector<std::uint8_t>& outputs,
                 const BetaPair& alpha, const BetaPair& beta, const BetaPair& gamma, Rng& rng) {
  const std::size_t n = outputs.size();
  for (std::size_t i = 0; i < n; ++i) {
    const int f = outputs[i];
    // remove site i from the counts
    if (state.labels[i]) {
      --state.x[f];
    } else {
      --state.yc[f];
    }
    const long n1m = state.n1();
    const long n0m = state.n0();
    const double w1 = conditional_weight_y1(alpha, beta, n1m, state.x[f], f);
    const double w0 = conditional_weight_y0(alpha, gamma, n0m, state.yc[f], f);
    const std::uint8_t y = rng.next_double() * (w1 + w0) < w1 ? 1 : 0;
    state.labels[i] = y;
    if (y) {
      ++state.x[f];
    } else {
      ++state.yc[f];
    }
  }
}

namespace {

void check_counts(const GibbsState& state, const std::vector<std::uint8_t>& outputs) {
  const GibbsState fresh = GibbsState::from_labels(state.labels, outputs);
  const long n = static_cast<long>(outputs.size());
  if (fresh.x != state.x || fresh.yc != state.yc ||
      state.n1() + state.n0() != n) {
    throw ValidationError("gibbs invariant violated: incremental counts disagree with recount");
  }
}

}  // namespace

ChainSamples run_chain(const std::vector<std::uint8_t>& outputs, const BetaPair& alpha,
                       const BetaPair& beta, const BetaPair& gamma, const GibbsConfig& cfg,
                       std::uint64_t chain_seed) {
  Rng rng(chain_seed);
  GibbsState state = init_state(outputs, rng);

  ChainSamples retained;
  retained.reserve(static_cast<std::size_t>(cfg.retained_per_chain()));
  for (long sweep = 1; sweep <= cfg.iterations; ++sweep) {
    gibbs_sweep(state, outputs, alpha, beta, gamma, rng);
    if (cfg.check_invariants) check_counts(state, outputs);
    if (sweep > cfg.burn_in && (sweep - cfg.burn_in) % cfg.lag == 0) {
      retained.push_back(SampleStat{sweep, state.n1(), state.x[0], state.x[1], state.yc[0],
                                    state.yc[1]});
    }
  }
  return retained;
}

std::vector<ChainSamples> run_chains(const std::vector<std::uint8_t>& outputs,
                                     const BetaPair& alpha, const BetaPair& beta,
                                     const BetaPair& gamma, const GibbsConfig& cfg) {
  cfg.validate();
  if (outputs.empty()) throw ValidationError("run_chains: outputs must be non-empty");

  std::vector<ChainSamples> chains(static_cast<std::size_t>(cfg.chains));
  if (cfg.chains == 1) {
    chains[0] = run_chain(outputs, alpha, beta, gamma, cfg, derive_seed(cfg.seed, 0));
    return chains;
  }
  std::vector<std::future<ChainSamples>> futures;
  futures.reserve(chains.size());
  for (int c = 0; c < cfg.chains; ++c) {
    futures.push_back(std::async(std::launch::async, [&, c] {
      return run_chain(outputs, alpha, beta, gamma, cfg,
                       derive_seed(cfg.seed, static_cast<std::uint64_t>(c)));
    }));
  }
  for (int c = 0; c < cfg.chains; ++c) chains[static_cast<std::size_t>(c)] = futures[c].get();
  return chains;
}

double empirical_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ValidationError("empirical_quantile: no values");
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= values.size()) return values.back();
  const double frac = h - static_cast<double>(lo);
  return values[lo] + (values[lo + 1] - values[lo]) * frac;
}

namespace {

struct RateSeries {
  std::vector<double> values;
  double mean() const {
    double s = 0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
  }
};

}  // namespace

PosteriorSummary summarize(const std::vector<ChainSamples>& chains, const BetaPair& alpha,
                           const BetaPair& beta, const BetaPair& gamma, long n_test) {
  std::size_t total = 0;
  for (const auto& c : chains) total += c.size();
  if (total < 30) {
    throw ValidationError("summarize: need at least 30 retained samples, got " +
                          std::to_string(total));
  }

  RateSeries pi, eta, theta;
  pi.values.reserve(total);
  eta.values.reserve(total);
  theta.values.reserve(total);
  PosteriorSummary out;

  for (const auto& chain : chains) {
    double chain_pi_sum = 0;
    for (const SampleStat& s : chain) {
      const long n0 = s.y0 + s.y1;
      const double pi_s = (alpha.c1 + s.n1) / (alpha.sum() + n_test);
      pi.values.push_back(pi_s);
      eta.values.push_back((beta.c1 + s.x1) / (beta.sum() + s.n1));
      theta.values.push_back((gamma.c1 + s.y0) / (gamma.sum() + n0));
      chain_pi_sum += pi_s;
    }
    if (!chain.empty()) {
      out.chain_pi_means.push_back(chain_pi_sum / static_cast<double>(chain.size()));
    }
  }

  out.pi_mean = pi.mean();
  out.eta_mean = eta.mean();
  out.theta_mean = theta.mean();
  out.pi_lo = empirical_quantile(pi.values, 0.025);
  out.pi_hi = empirical_quantile(pi.values, 0.975);
  out.eta_lo = empirical_quantile(eta.values, 0.025);
  out.eta_hi = empirical_quantile(eta.values, 0.975);
  out.theta_lo = empirical_quantile(theta.values, 0.025);
  out.theta_hi = empirical_quantile(theta.values, 0.975);
  out.n_samples = total;

  for (std::size_t a = 0; a < out.chain_pi_means.size(); ++a) {
    for (std::size_t b = a + 1; b < out.chain_pi_means.size(); ++b) {
      out.max_chain_spread =
          std::max(out.max_chain_spread, std::abs(out.chain_pi_means[a] - out.chain_pi_means[b]));
    }
  }
  return out;
}

PosteriorSummary estimate_prevalence(const std::vector<std::uint8_t>& outputs,
                                     const BetaPair& alpha, const BetaPair& beta,
                                     const BetaPair& gamma, const GibbsConfig& cfg) {
  const auto chains = run_chains(outputs, alpha, beta, gamma, cfg);
  return summarize(chains, alpha, beta, gamma, static_cast<long>(outputs.size()));
}

void write_posterior_csv(std::ostream& out, const std::vector<ChainSamples>& chains,
                         const BetaPair& alpha, long n_test) {
  out << "chain,sweep,N1,X0,X1,Y0,Y1,pi_sample\n";
  char buf[64];
  for (std::size_t c = 0; c < chains.size(); ++c) {
    for (const SampleStat& s : chains[c]) {
      const double pi_s = (alpha.c1 + s.n1) / (alpha.sum() + n_test);
      std::snprintf(buf, sizeof(buf), "%.17g", pi_s);
      out << c << ',' << s.sweep << ',' << s.n1 << ',' << s.x0 << ',' << s.x1 << ',' << s.y0
          << ',' << s.y1 << ',' << buf << "\n";
    }
  }
}

}  // namespace prevalence
