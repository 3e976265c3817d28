#pragma once

#include <Eigen/SparseCore>
#include <vector>

namespace rcnet {

// Reinforced counter with hysteresis: the content enters the cache when the
// counter passes K and leaves only when it falls back to K_h <= K. K_h = K
// recovers the single-threshold counter.
struct HysteresisParams {
  double lambda = 0.0;
  double mu = 0.0;
  int insert_threshold = 0;  // K
  int evict_threshold = 0;   // K_h
};

struct ChainState {
  int counter;
  bool cached;
};

// Explicit CTMC over (counter value, cached flag), truncated at counter
// value n_max. Counter values in (K_h, K] appear twice, once per flag.
struct HysteresisChain {
  std::vector<ChainState> states;
  Eigen::SparseMatrix<double, Eigen::RowMajor> generator;
  int n_max = 0;
  HysteresisParams params;

  int index_of(int counter, bool cached) const;
};

// Truncation level with stationary mass beyond it below ~1e-12.
int default_truncation(const HysteresisParams& params);

HysteresisChain build_chain(const HysteresisParams& params, int n_max);

// Stationary probability of the cached flag, from the global-balance system.
double stationary_occupancy(const HysteresisChain& chain);
double stationary_occupancy(const HysteresisParams& params);

// First-passage oracles. Mean busy time uses the ladder identity
// (K - K_h + 1)/(mu - lambda); mean return time solves the finite absorbing
// system on counter values 0..K and stays finite even for rho >= 1.
double first_passage_mean_busy(const HysteresisParams& params);
double first_passage_mean_return(const HysteresisParams& params);

// The published recursions, verbatim. Element i-1 of the result is the value
// for threshold gap K - K_h = i - 1 (so element 0 is the no-hysteresis
// case). The xi recursion is reported as printed; it disagrees with the
// first-passage oracle for gaps >= 1 (see xi_divergence_rows).
std::vector<double> paper_recursion_nu(const HysteresisParams& params,
                                       int up_to);
std::vector<double> paper_recursion_xi(const HysteresisParams& params,
                                       int up_to);

struct PassageTimes {
  std::vector<double> nu;
  std::vector<double> xi;
};
PassageTimes passage_recursions(const HysteresisParams& params, int up_to);

// One row of the printed-recursion vs oracle comparison for E[R].
struct XiDivergenceRow {
  double lambda, mu;
  int insert_threshold, evict_threshold;
  double xi_printed;
  double xi_oracle;
  double abs_diff;
};
std::vector<XiDivergenceRow> xi_divergence_rows(const HysteresisParams& params);

enum class Sojourn { Busy, Return };

// CDF of the residence time B or return time R on a grid of times, via
// uniformization of the absorbing sub-chain; per-point truncation error
// below 1e-8.
std::vector<double> sojourn_cdf(const HysteresisParams& params, Sojourn which,
                                const std::vector<double>& grid);

struct SojournMoments {
  double mean;
  double second_moment;
};
SojournMoments sojourn_moments(const HysteresisParams& params, Sojourn which);

double coefficient_of_variation(const HysteresisParams& params, Sojourn which);

// gamma = 1/(E[B] + E[R]) from the oracle values.
double replacement_rate(const HysteresisParams& params);

// mu holding the stationary occupancy at the target for given lambda, K,
// K_h; occupancy is strictly decreasing in mu.
double retune_mu_for_target(double pi_up_target, double lambda,
                            int insert_threshold, int evict_threshold);

}  // namespace rcnet
