#pragma once

#include <cstdint>
#include <vector>

#include "rcnet/counter.hpp"
#include "rcnet/hysteresis.hpp"
#include "rcnet/network.hpp"

namespace rcnet {

struct SimConfig {
  std::uint64_t seed = 1;
  double horizon = 0.0;  // simulated time; 0 means run by event count
  std::uint64_t max_events = 1000000;
  double warmup_fraction = 0.2;
  int replications = 1;
  int batches = 30;
};

struct MetricEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

struct SimReport {
  MetricEstimate pi_up, gamma, mean_busy, mean_return;
  std::vector<double> busy_samples;    // post-warmup residence times
  std::vector<double> return_samples;  // post-warmup return times
  std::uint64_t events = 0;
  double sim_time = 0.0;
  // Network mode:
  std::vector<MetricEstimate> alpha_cache;
  bool empirically_unstable = false;
};

// Event-driven run of one reinforced counter: arrivals bump it, ticks drop
// it (lost at zero), the cached flag follows the two thresholds. Estimates
// carry batch-means standard errors.
SimReport simulate_counter(const HysteresisParams& params,
                           const SimConfig& cfg);

// Single-threshold wrapper. A fractional threshold is handled by per-cycle
// randomization between its two integer neighbours.
SimReport simulate_counter(const CounterParams& params, const SimConfig& cfg);

// Per-renewal-cycle draw between floor(k_real) and ceil(k_real). The draw
// probability is length-adjusted so the long-run time fraction spent under
// the high policy equals the mixture weight, making pi_up and gamma the
// weight-convex combinations of the two integer policies.
SimReport simulate_fractional_threshold(double k_real, double lambda,
                                        double mu, const SimConfig& cfg);

enum class AvailabilityMode { Frozen, Live };

struct NetworkSimOptions {
  AvailabilityMode mode = AvailabilityMode::Frozen;
  std::vector<CounterAssignment> counters;  // live mode
  double queue_threshold = 1000.0;          // per-cache backlog flag level
};

// Requests arrive Poisson per (cache, file), walk over the routing links on
// miss and absorb on hit. Frozen mode draws availability i.i.d. per visit
// from the profile; live mode runs a reinforced counter per (cache, file).
// Finite service rates queue misses FIFO; a backlog beyond the threshold
// flags the run as empirically unstable. Requires cfg.horizon > 0.
SimReport simulate_network(const CacheNetwork& net,
                           const AvailabilityProfile& profile,
                           const SimConfig& cfg,
                           const NetworkSimOptions& options = {});

}  // namespace rcnet
