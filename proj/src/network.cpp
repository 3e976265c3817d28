#include "rcnet/network.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "rcnet/counter.hpp"
#include "rcnet/errors.hpp"

namespace rcnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_network(const CacheNetwork& net) {
  if (net.caches <= 0 || net.files <= 0)
    throw std::domain_error("network needs at least one cache and one file");
  if (net.adjacency.rows() != net.caches || net.adjacency.cols() != net.caches)
    throw std::domain_error("adjacency matrix has wrong shape");
  if (net.storage.size() != net.caches ||
      net.service_rate.size() != net.caches)
    throw std::domain_error("per-cache vectors have wrong length");
  if (net.file_size.size() != net.files)
    throw std::domain_error("file size vector has wrong length");
  if (net.demand.rows() != net.caches || net.demand.cols() != net.files)
    throw std::domain_error("demand matrix has wrong shape");
  for (int i = 0; i < net.caches; ++i) {
    if (net.adjacency(i, i) != 0)
      throw std::domain_error("self-loops are not allowed");
    for (int j = 0; j < net.caches; ++j)
      if (net.adjacency(i, j) != 0 && net.adjacency(i, j) != 1)
        throw std::domain_error("adjacency entries must be 0/1");
    if (!(net.storage[i] >= 0.0))
      throw std::domain_error("storage must be non-negative");
    if (!(net.service_rate[i] > 0.0))
      throw std::domain_error("service rates must be positive");
  }
  for (int f = 0; f < net.files; ++f)
    if (!(net.file_size[f] > 0.0))
      throw std::domain_error("file sizes must be positive");
  if ((net.demand.array() < 0.0).any())
    throw std::domain_error("demand rates must be non-negative");
}

void check_profile(const CacheNetwork& net, const AvailabilityProfile& prof) {
  if (prof.pi.rows() != net.caches || prof.pi.cols() != net.files)
    throw std::domain_error("availability matrix has wrong shape");
  if ((prof.pi.array() < 0.0).any() || (prof.pi.array() > 1.0).any())
    throw std::domain_error("availability entries must lie in [0,1]");
}

}  // namespace

bool AvailabilityProfile::is_static() const {
  return ((pi.array() == 0.0) || (pi.array() == 1.0)).all();
}

Eigen::MatrixXd routing_matrix(const CacheNetwork& net) {
  check_network(net);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(net.caches, net.caches);
  for (int h = 0; h < net.caches; ++h) {
    const int degree = net.adjacency.row(h).sum();
    if (degree == 0) continue;  // zero row; legal while the cache never misses
    for (int i = 0; i < net.caches; ++i)
      if (net.adjacency(h, i)) p(h, i) = 1.0 / degree;
  }
  return p;
}

FlowSolution solve_flow(const CacheNetwork& net,
                        const AvailabilityProfile& prof) {
  check_profile(net, prof);
  const Eigen::MatrixXd routing = routing_matrix(net);

  FlowSolution sol;
  sol.alpha = Eigen::MatrixXd::Zero(net.caches, net.files);

  for (int f = 0; f < net.files; ++f) {
    const Eigen::VectorXd demand = net.demand.col(f);
    if (demand.sum() == 0.0) continue;
    const Eigen::VectorXd pi = prof.pi.col(f);

    // Caches the content's flow can reach: demand sources, then every
    // out-neighbour of a cache that can miss.
    std::vector<char> reach(net.caches, 0);
    std::vector<int> queue;
    for (int i = 0; i < net.caches; ++i)
      if (demand[i] > 0.0) {
        reach[i] = 1;
        queue.push_back(i);
      }
    while (!queue.empty()) {
      const int u = queue.back();
      queue.pop_back();
      if (pi[u] >= 1.0) continue;
      for (int w = 0; w < net.caches; ++w)
        if (net.adjacency(u, w) && !reach[w]) {
          reach[w] = 1;
          queue.push_back(w);
        }
    }

    // Absorption must be reachable from every flow-carrying cache,
    // otherwise some requests are never served.
    std::vector<char> can_absorb(net.caches, 0);
    bool changed = true;
    while (changed) {
      changed = false;
      for (int u = 0; u < net.caches; ++u) {
        if (can_absorb[u]) continue;
        bool good = pi[u] > 0.0;
        for (int w = 0; !good && w < net.caches; ++w)
          if (net.adjacency(u, w) && can_absorb[w]) good = true;
        if (good) {
          can_absorb[u] = 1;
          changed = true;
        }
      }
    }
    int stranded = -1;
    for (int u = 0; u < net.caches; ++u) {
      if (!reach[u] || can_absorb[u]) continue;
      if (net.adjacency.row(u).sum() == 0)
        throw SinkWithoutStorageError(
            "sink without storage: cache " + std::to_string(u + 1) +
                " receives misses for file " + std::to_string(f + 1) +
                " but has no outgoing link",
            u, f);
      stranded = u;
    }
    if (stranded >= 0)
      throw UnplacedContentError(
          "unplaced content: file " + std::to_string(f + 1) +
              " cannot reach any cache that stores it",
          f);

    std::vector<int> active;
    for (int i = 0; i < net.caches; ++i)
      if (reach[i]) active.push_back(i);
    const int m = static_cast<int>(active.size());

    // alpha_j = lambda_j + sum_k p_kj (1 - pi_k) alpha_k on the active set.
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd rhs(m);
    for (int r = 0; r < m; ++r) {
      rhs[r] = demand[active[r]];
      for (int c = 0; c < m; ++c)
        a(r, c) -= routing(active[c], active[r]) * (1.0 - pi[active[c]]);
    }
    const Eigen::VectorXd x = a.partialPivLu().solve(rhs);
    const double residual = (a * x - rhs).norm();
    if (!x.allFinite() || residual > 1e-10 * (1.0 + rhs.norm()))
      throw UnplacedContentError(
          "unplaced content: flow balance for file " + std::to_string(f + 1) +
              " is singular",
          f);
    for (int r = 0; r < m; ++r) sol.alpha(active[r], f) = x[r];
  }

  sol.alpha_cache = sol.alpha.rowwise().sum();
  const StabilityReport st = stability(net, sol);
  sol.stable = st.stable;
  sol.slack = st.slack;
  sol.expected_requests = 0.0;
  for (int i = 0; i < net.caches; ++i)
    if (std::isfinite(net.service_rate[i]))
      sol.expected_requests += sol.alpha_cache[i] / net.service_rate[i];
  const double total_demand = net.demand.sum();
  sol.mean_response_time = total_demand > 0.0
                               ? sol.expected_requests / total_demand
                               : std::numeric_limits<double>::quiet_NaN();
  return sol;
}

StabilityReport stability(const CacheNetwork& net, const FlowSolution& sol) {
  StabilityReport rep;
  rep.slack = net.service_rate - sol.alpha_cache;
  rep.stable = true;
  for (int i = 0; i < net.caches; ++i)
    if (!(net.service_rate[i] > sol.alpha_cache[i])) rep.stable = false;
  return rep;
}

ResponseTime response_time(const CacheNetwork& net, const FlowSolution& sol,
                           bool mm1_queue_length) {
  const double total_demand = net.demand.sum();
  if (!(total_demand > 0.0))
    throw std::domain_error("response time undefined without demand");
  double en = 0.0;
  for (int i = 0; i < net.caches; ++i) {
    const double eta = net.service_rate[i];
    if (!std::isfinite(eta)) continue;
    const double rho = sol.alpha_cache[i] / eta;
    if (mm1_queue_length)
      en += rho < 1.0 ? rho / (1.0 - rho) : kInf;
    else
      en += rho;
  }
  return {en, en / total_demand};
}

OccupancyReport expected_occupancy(const AvailabilityProfile& prof,
                                   const CacheNetwork& net,
                                   std::uint64_t seed, int mc_draws) {
  check_network(net);
  check_profile(net, prof);

  OccupancyReport rep;
  rep.expected = prof.pi * net.file_size;
  rep.overflow_probability = Eigen::VectorXd::Zero(net.caches);
  rep.std_error = Eigen::VectorXd::Zero(net.caches);

  const bool uniform_sizes =
      (net.file_size.array() == net.file_size[0]).all();
  if (uniform_sizes) {
    // Poisson-binomial convolution over the cached-content count.
    rep.exact = true;
    const double unit = net.file_size[0];
    for (int i = 0; i < net.caches; ++i) {
      std::vector<double> dp(net.files + 1, 0.0);
      dp[0] = 1.0;
      for (int f = 0; f < net.files; ++f) {
        const double p = prof.pi(i, f);
        for (int k = f + 1; k >= 1; --k)
          dp[k] = dp[k] * (1.0 - p) + dp[k - 1] * p;
        dp[0] *= 1.0 - p;
      }
      double overflow = 0.0;
      for (int k = 0; k <= net.files; ++k)
        if (k * unit > net.storage[i]) overflow += dp[k];
      rep.overflow_probability[i] = overflow;
    }
    return rep;
  }

  return expected_occupancy_monte_carlo(prof, net, seed, mc_draws);
}

OccupancyReport expected_occupancy_monte_carlo(const AvailabilityProfile& prof,
                                               const CacheNetwork& net,
                                               std::uint64_t seed,
                                               int mc_draws) {
  check_network(net);
  check_profile(net, prof);
  if (mc_draws <= 0) throw std::domain_error("Monte Carlo draws must be > 0");

  OccupancyReport rep;
  rep.exact = false;
  rep.expected = prof.pi * net.file_size;
  rep.overflow_probability = Eigen::VectorXd::Zero(net.caches);
  rep.std_error = Eigen::VectorXd::Zero(net.caches);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::VectorXi hits = Eigen::VectorXi::Zero(net.caches);
  for (int d = 0; d < mc_draws; ++d) {
    for (int i = 0; i < net.caches; ++i) {
      double used = 0.0;
      for (int f = 0; f < net.files; ++f)
        if (unif(rng) < prof.pi(i, f)) used += net.file_size[f];
      if (used > net.storage[i]) ++hits[i];
    }
  }
  for (int i = 0; i < net.caches; ++i) {
    const double p = static_cast<double>(hits[i]) / mc_draws;
    rep.overflow_probability[i] = p;
    rep.std_error[i] = std::sqrt(p * (1.0 - p) / mc_draws);
  }
  return rep;
}

std::vector<CounterAssignment> provision_network(
    const CacheNetwork& net, const AvailabilityProfile& targets,
    const ThresholdPolicy& policy) {
  const FlowSolution sol = solve_flow(net, targets);
  std::vector<CounterAssignment> out;
  for (int i = 0; i < net.caches; ++i) {
    for (int f = 0; f < net.files; ++f) {
      const double target = targets.pi(i, f);
      const double rate = sol.alpha(i, f);
      if (target >= 1.0) {
        out.push_back({i, f, rate, 0.0, 0.0, true});
        continue;
      }
      if (target <= 0.0 || rate <= 0.0) continue;
      double k = policy.fixed_threshold;
      if (policy.kind == ThresholdPolicyKind::Optimize)
        k = minimize_cost(policy.weights, target, rate).k_star;
      const Provision prov = provision_from_target({target, rate, k});
      out.push_back({i, f, rate, prov.mu, k, false});
    }
  }
  return out;
}

}  // namespace rcnet
