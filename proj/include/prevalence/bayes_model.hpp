#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "prevalence/priors.hpp"
#include "prevalence/rng.hpp"

namespace prevalence {

// Collapsed Gibbs sampler over per-review latent deception labels y_i, with
// the deception rate and the classifier's sensitivity/specificity integrated
// out under Beta priors. Only the binary classifier outputs f(x_i) are
// observed. One iteration is a full sweep updating every y_i in index order.

struct GibbsConfig {
  long iterations = 70000;
  long burn_in = 20000;
  long lag = 50;
  std::uint64_t seed = 0;
  int chains = 3;
  BetaPair alpha{1.0, 1.0};
  // When set, recount all statistics from scratch after every sweep and
  // require agreement with the incrementally maintained counts.
  bool check_invariants = false;

  long retained_per_chain() const { return (iterations - burn_in) / lag; }
  void validate() const;
};

struct GibbsState {
  std::vector<std::uint8_t> labels;  // current y
  std::array<long, 2> x{{0, 0}};     // x[k] = #{i : y_i = 1, f_i = k}
  std::array<long, 2> yc{{0, 0}};    // yc[k] = #{i : y_i = 0, f_i = k}

  long n1() const { return x[0] + x[1]; }
  long n0() const { return yc[0] + yc[1]; }

  // Recomputes counts from labels/outputs; used by the invariant check.
  static GibbsState from_labels(std::vector<std::uint8_t> labels,
                                const std::vector<std::uint8_t>& outputs);
};

// Each y_i initialized Bernoulli(1/2), counts consistent with the outputs.
GibbsState init_state(const std::vector<std::uint8_t>& outputs, Rng& rng);

// Unnormalized conditional weights for one site given leave-one-out counts.
// w1 = (alpha1 + N1') * (beta[f_i] + X_{f_i}') / (sum beta + N1')
// w0 = (alpha0 + N0') * (gamma[1-f_i] + Y_{f_i}') / (sum gamma + N0')
double conditional_weight_y1(const BetaPair& alpha, const BetaPair& beta, long n1_minus,
                             long x_f_minus, int f_i);
double conditional_weight_y0(const BetaPair& alpha, const BetaPair& gamma, long n0_minus,
                             long y_f_minus, int f_i);

// One full sweep over all sites in index order.
void gibbs_sweep(GibbsState& state, const std::vector<std::uint8_t>& outputs,
                 const BetaPair& alpha, const BetaPair& beta, const BetaPair& gamma, Rng& rng);

struct SampleStat {
  long sweep = 0;
  long n1 = 0;
  long x0 = 0, x1 = 0;
  long y0 = 0, y1 = 0;
};

using ChainSamples = std::vector<SampleStat>;

// One chain: cfg.iterations sweeps, retaining counts every cfg.lag sweeps
// after cfg.burn_in. Deterministic for a fixed chain_seed.
ChainSamples run_chain(const std::vector<std::uint8_t>& outputs, const BetaPair& alpha,
                       const BetaPair& beta, const BetaPair& gamma, const GibbsConfig& cfg,
                       std::uint64_t chain_seed);

// cfg.chains independent chains with seeds derived from cfg.seed; chains run
// concurrently but results are merged in chain order.
std::vector<ChainSamples> run_chains(const std::vector<std::uint8_t>& outputs,
                                     const BetaPair& alpha, const BetaPair& beta,
                                     const BetaPair& gamma, const GibbsConfig& cfg);

struct PosteriorSummary {
  double pi_mean = 0, pi_lo = 0, pi_hi = 0;
  double eta_mean = 0, eta_lo = 0, eta_hi = 0;
  double theta_mean = 0, theta_lo = 0, theta_hi = 0;
  std::size_t n_samples = 0;
  std::vector<double> chain_pi_means;
  double max_chain_spread = 0;  // max pairwise |difference| of per-chain pi means
};

// Per-sample reconstruction of the collapsed rates, then the mean and
// equal-tailed 2.5%/97.5% quantiles over all retained samples:
//   pi     = (alpha1 + N1) / (sum alpha + N)
//   eta    = (beta1 + X1) / (sum beta + N1)
//   theta  = (gamma1 + Y0) / (sum gamma + N0)
PosteriorSummary summarize(const std::vector<ChainSamples>& chains, const BetaPair& alpha,
                           const BetaPair& beta, const BetaPair& gamma, long n_test);

// Convenience: run_chains + summarize.
PosteriorSummary estimate_prevalence(const std::vector<std::uint8_t>& outputs,
                                     const BetaPair& alpha, const BetaPair& beta,
                                     const BetaPair& gamma, const GibbsConfig& cfg);

// Audit dump: chain, sweep, N1, X0, X1, Y0, Y1, pi_sample.
void write_posterior_csv(std::ostream& out, const std::vector<ChainSamples>& chains,
                         const BetaPair& alpha, long n_test);

// Equal-tailed empirical quantile with linear interpolation between order
// statistics; values need not be sorted.
double empirical_quantile(std::vector<double> values, double q);

}  // namespace prevalence
