#pragma once

namespace rcnet {

// Single-threshold reinforced counter. Requests bump the counter at rate
// lambda, an exponential timer decrements it at rate mu, and the content is
// cached while the counter sits above K. Viewed as an M/M/1 queue, the
// cached periods are the excursions above level K.
struct CounterParams {
  double lambda = 0.0;     // request rate (per unit time)
  double mu = 0.0;         // timer tick rate (per unit time)
  double threshold = 0.0;  // K >= 0; real-valued, see randomized_threshold
};

// Derived steady-state metrics of one counter.
struct SteadyState {
  double pi_up;        // long-run fraction of time the content is cached
  double rho;          // lambda / mu
  double gamma;        // rate of cache insertions (= evictions)
  double mean_busy;    // E[B], mean residence time per visit to the cache
  double mean_return;  // E[R], mean time to re-enter after an eviction
};

// Inverse provisioning input: hold pi_up at a target for given lambda and K.
struct TargetSpec {
  double pi_up_target = 0.0;  // in (0,1)
  double lambda = 0.0;
  double threshold = 0.0;  // K
};

struct Provision {
  double mu;
  double rho;
  double gamma;
  double mean_return;
};

// Integer decomposition of a real threshold: run k_high with probability
// weight_high per renewal cycle, k_low otherwise.
struct ThresholdMix {
  long k_low;
  long k_high;
  double weight_high;
};

// pi_up = rho^(K+1). Requires rho < 1.
double occupancy_probability(const CounterParams& params);

// E[B] = 1/(mu - lambda), the M/M/1 busy period above the threshold.
double mean_busy(const CounterParams& params);

// E[R] = (1 - pi_up) / (pi_up (mu - lambda)); equals the mean first-passage
// time of the counter from K to K+1.
double mean_return(const CounterParams& params);

// gamma = lambda rho^K (1 - rho) = 1/(E[B] + E[R]).
double replacement_rate(const CounterParams& params);

// All of the above in one pass.
SteadyState steady_state(const CounterParams& params);

// Given a target pi_up, the unique (mu, rho) achieving it at this K, plus
// the resulting insertion rate and mean return time.
Provision provision_from_target(const TargetSpec& spec);

// Markov bound P(R > r) <= min(1, E[R]/r).
double markov_tail_bound(double mean_return, double r);

// Split a real K into its two neighbouring integer policies.
ThresholdMix randomized_threshold(double k_real);

}  // namespace rcnet
