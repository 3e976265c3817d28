#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "rcnet/optimizer.hpp"

namespace rcnet {

// Cache network: caches route missed requests over directed links by a
// uniform random walk; a hit absorbs the request. Service rates may be
// +infinity (explicitly unbounded).
struct CacheNetwork {
  int caches = 0;
  int files = 0;
  Eigen::MatrixXi adjacency;     // caches x caches, 0/1, zero diagonal
  Eigen::VectorXd storage;       // s_i, in file-size units
  Eigen::VectorXd service_rate;  // eta_i, requests per unit time
  Eigen::VectorXd file_size;     // t_f
  Eigen::MatrixXd demand;        // caches x files, exogenous request rates
};

// Per-cache, per-content probability of finding the content; binary entries
// describe a static placement.
struct AvailabilityProfile {
  Eigen::MatrixXd pi;
  bool is_static() const;
};

struct FlowSolution {
  Eigen::MatrixXd alpha;        // caches x files, total input rates
  Eigen::VectorXd alpha_cache;  // per-cache totals
  bool stable = false;
  Eigen::VectorXd slack;           // eta_i - alpha_i
  double expected_requests = 0.0;  // E[N] = sum alpha_i / eta_i
  double mean_response_time = 0.0;  // E[T] = E[N] / total exogenous rate
};

// p_hi = 1/out_degree(h) on links, 0 elsewhere. Caches without outgoing
// links get an all-zero row; whether that is an error depends on
// availability and is checked by solve_flow.
Eigen::MatrixXd routing_matrix(const CacheNetwork& net);

// Per-content flow balance alpha = lambda + P^T diag(1-pi) alpha, solved on
// the flow-carrying cache set. Throws UnplacedContentError when a content's
// demand cannot reach storage and SinkWithoutStorageError when miss traffic
// reaches a cache with no outgoing link.
FlowSolution solve_flow(const CacheNetwork& net,
                        const AvailabilityProfile& profile);

struct StabilityReport {
  bool stable;
  Eigen::VectorXd slack;
};

// Strict per-cache check eta_i > alpha_i.
StabilityReport stability(const CacheNetwork& net, const FlowSolution& sol);

struct ResponseTime {
  double expected_requests;
  double mean_response_time;
};

// E[N_i] = alpha_i/eta_i as printed; with mm1_queue_length, the secondary
// metric rho_i/(1-rho_i) instead (never the default).
ResponseTime response_time(const CacheNetwork& net, const FlowSolution& sol,
                           bool mm1_queue_length = false);

struct OccupancyReport {
  Eigen::VectorXd expected;              // sum_f pi_if t_f
  Eigen::VectorXd overflow_probability;  // P(occupancy > s_i)
  Eigen::VectorXd std_error;             // zero when exact
  bool exact = false;
};

// Exact Poisson-binomial convolution when all file sizes are equal;
// otherwise a seeded Monte Carlo estimate over independent placements.
OccupancyReport expected_occupancy(const AvailabilityProfile& profile,
                                   const CacheNetwork& net,
                                   std::uint64_t seed = 1,
                                   int mc_draws = 1000000);

// Monte Carlo estimate regardless of file sizes (cross-check of the DP).
OccupancyReport expected_occupancy_monte_carlo(
    const AvailabilityProfile& profile, const CacheNetwork& net,
    std::uint64_t seed, int mc_draws);

struct CounterAssignment {
  int cache;
  int file;
  double arrival_rate;  // solved alpha_if
  double mu;
  double threshold;  // K
  bool pinned;       // pi target 1: static replica, no counter
};

enum class ThresholdPolicyKind { Fixed, Optimize };

struct ThresholdPolicy {
  ThresholdPolicyKind kind = ThresholdPolicyKind::Fixed;
  double fixed_threshold = 0.0;
  CostWeights weights;
};

// Counter parameters per (cache, content) meeting the availability targets
// at the solved input rates. Entries with target 1 are pinned; entries with
// target 0 or no traffic are omitted.
std::vector<CounterAssignment> provision_network(
    const CacheNetwork& net, const AvailabilityProfile& targets,
    const ThresholdPolicy& policy);

}  // namespace rcnet
