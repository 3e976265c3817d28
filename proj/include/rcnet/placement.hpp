#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "rcnet/network.hpp"

namespace rcnet {

// Flow accounting for a binary placement.
//   VerbatimFlow: alpha counts every request arriving at a cache (hits
//     included) and stability is the strict eta_i > alpha_i.
//   MiqcpFlow: alpha counts only control-plane (miss) traffic,
//     alpha_ij = (1-A_ij)(lambda_ij + sum_k alpha_kj p_ki), with the
//     non-strict service constraint alpha_i <= eta_i.
enum class FlowMode { VerbatimFlow, MiqcpFlow };

struct PlacementEvaluation {
  bool feasible = false;
  std::string violated;  // "", "coverage", "capacity" or "stability"
  double objective = 0.0;  // sum_i alpha_i under the chosen mode
  Eigen::MatrixXd alpha;   // mode-dependent flows; zero rows if infeasible
};

PlacementEvaluation evaluate_placement(const CacheNetwork& net,
                                       const Eigen::MatrixXi& placement,
                                       FlowMode mode = FlowMode::VerbatimFlow);

struct ExactSolution {
  bool feasible = false;
  Eigen::MatrixXi placement;
  double objective = 0.0;
  std::uint64_t nodes = 0;  // search nodes explored
};

// Global optimum by branch and bound over per-file cache subsets, with
// coverage/capacity pruning and a per-file objective lower bound. Ties break
// towards the lexicographically smallest placement (row-major).
ExactSolution solve_exact(const CacheNetwork& net,
                          FlowMode mode = FlowMode::MiqcpFlow);

// Feasibility only: stops at the first feasible placement.
bool exists_feasible_placement(const CacheNetwork& net, FlowMode mode);

// LP-format text of the mixed integer quadratically constrained program:
// binary A_i_j, continuous alpha_i_j, coverage/capacity/service rows and the
// bilinear flow rows. Byte-stable for fixed input.
std::string export_miqcp(const CacheNetwork& net);

struct KnapsackInstance {
  double capacity = 0.0;
  std::vector<double> weights;
  std::vector<double> values;
};

struct PartitionInstance {
  std::vector<long> values;
};

// Two-cache network whose optimal placement solves the knapsack: sizes are
// the weights, demand rates the values, cache 1 holds the bag.
CacheNetwork reduce_knapsack(const KnapsackInstance& kp);

// N+1 two-cache networks; some f_m admits a feasible placement iff the
// values admit an equal-sum partition.
std::vector<CacheNetwork> reduce_partition(const PartitionInstance& pt);

// Brute-force oracles, independent of the placement machinery.
double knapsack_brute_force(const KnapsackInstance& kp);
bool partition_brute_force(const PartitionInstance& pt);

struct PartitionVerdict {
  std::vector<long> values;
  bool partition_exists;
  bool some_instance_feasible;
  bool agree() const { return partition_exists == some_instance_feasible; }
};

struct KnapsackVerdict {
  KnapsackInstance instance;
  double oracle_value;
  double placed_value;  // value of the optimal placement's cache-1 set
  bool agree() const;
};

struct ReductionReport {
  std::vector<PartitionVerdict> partition;
  std::vector<KnapsackVerdict> knapsack;
  std::uint64_t instances_checked = 0;
  bool all_ok = true;
};

// Exhaustive over all value multisets with N <= max_n, values in
// 1..max_value (both sides of the biconditional decided independently).
ReductionReport verify_partition_reduction(int max_n, int max_value);

// Exhaustive for N <= 2 over small weight/value grids plus a seeded random
// sample up to max_n with weights/values <= max_value.
ReductionReport verify_knapsack_reduction(int max_n, int max_value,
                                          int random_instances,
                                          std::uint64_t seed);

}  // namespace rcnet
