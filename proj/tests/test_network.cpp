#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "rcnet/counter.hpp"
#include "rcnet/errors.hpp"
#include "rcnet/network.hpp"
#include "rcnet/optimizer.hpp"
#include "test_util.hpp"

using namespace rcnet;

namespace {

CacheNetwork two_cache_ring() {
  CacheNetwork net;
  net.caches = 2;
  net.files = 1;
  net.adjacency = Eigen::MatrixXi::Zero(2, 2);
  net.adjacency(0, 1) = 1;
  net.adjacency(1, 0) = 1;
  net.storage = Eigen::Vector2d(4.0, 4.0);
  net.service_rate = Eigen::Vector2d(4.0, 4.0);
  net.file_size = Eigen::VectorXd::Ones(1);
  net.demand = Eigen::MatrixXd::Constant(2, 1, 1.0);
  return net;
}

AvailabilityProfile uniform_profile(const CacheNetwork& net, double pi) {
  AvailabilityProfile prof;
  prof.pi = Eigen::MatrixXd::Constant(net.caches, net.files, pi);
  return prof;
}

}  // namespace

TEST_CASE("routing matrix") {
  const Eigen::MatrixXd ring = routing_matrix(two_cache_ring());
  CHECK(ring(0, 1) == doctest::Approx(1.0));
  CHECK(ring(1, 0) == doctest::Approx(1.0));
  CHECK(ring(0, 0) == doctest::Approx(0.0));

  CacheNetwork star;
  star.caches = 4;
  star.files = 1;
  star.adjacency = Eigen::MatrixXi::Zero(4, 4);
  for (int leaf = 1; leaf < 4; ++leaf) {
    star.adjacency(0, leaf) = 1;
    star.adjacency(leaf, 0) = 1;
  }
  star.storage = Eigen::VectorXd::Constant(4, 4.0);
  star.service_rate = Eigen::VectorXd::Constant(4, 4.0);
  star.file_size = Eigen::VectorXd::Ones(1);
  star.demand = Eigen::MatrixXd::Zero(4, 1);
  const Eigen::MatrixXd p = routing_matrix(star);
  for (int leaf = 1; leaf < 4; ++leaf)
    CHECK(p(0, leaf) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("isolated cache with full storage is accepted") {
  CacheNetwork net = two_cache_ring();
  net.adjacency.setZero();
  const Eigen::MatrixXd p = routing_matrix(net);
  CHECK(p.cwiseAbs().sum() == doctest::Approx(0.0));
  const FlowSolution sol = solve_flow(net, uniform_profile(net, 1.0));
  CHECK(sol.alpha(0, 0) == doctest::Approx(1.0));
  CHECK(sol.alpha(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("self-loops are rejected") {
  CacheNetwork net = two_cache_ring();
  net.adjacency(0, 0) = 1;
  CHECK_THROWS_AS(routing_matrix(net), std::domain_error);
}

TEST_CASE("flow balance on the symmetric ring") {
  const CacheNetwork net = two_cache_ring();
  const FlowSolution sol = solve_flow(net, uniform_profile(net, 0.5));
  CHECK(sol.alpha(0, 0) == doctest::Approx(2.0));
  CHECK(sol.alpha(1, 0) == doctest::Approx(2.0));
  CHECK(sol.stable);
  CHECK(sol.expected_requests == doctest::Approx(1.0));
  CHECK(sol.mean_response_time == doctest::Approx(0.5));
}

TEST_CASE("full availability stops propagation") {
  const CacheNetwork net = two_cache_ring();
  const FlowSolution sol = solve_flow(net, uniform_profile(net, 1.0));
  CHECK(sol.alpha(0, 0) == doctest::Approx(1.0));
  CHECK(sol.alpha(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("one-sided demand absorbed at the other cache") {
  CacheNetwork net = two_cache_ring();
  net.demand(1, 0) = 0.0;
  AvailabilityProfile prof;
  prof.pi = Eigen::MatrixXd::Zero(2, 1);
  prof.pi(1, 0) = 1.0;
  const FlowSolution sol = solve_flow(net, prof);
  CHECK(sol.alpha(0, 0) == doctest::Approx(1.0));
  CHECK(sol.alpha(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("flow errors") {
  // Misses reach a cache with no outgoing link.
  CacheNetwork chain = two_cache_ring();
  chain.adjacency(1, 0) = 0;  // only 1 -> 2 remains
  CHECK_THROWS_AS(solve_flow(chain, uniform_profile(chain, 0.0)),
                  SinkWithoutStorageError);

  // No storage reachable anywhere on a cycle.
  const CacheNetwork ring = two_cache_ring();
  CHECK_THROWS_AS(solve_flow(ring, uniform_profile(ring, 0.0)),
                  UnplacedContentError);
}

TEST_CASE("conservation and monotonicity on random instances") {
  std::mt19937_64 rng(321);
  for (int trial = 0; trial < 25; ++trial) {
    const CacheNetwork net = test_util::random_network(rng, 6, 8);
    const AvailabilityProfile prof = test_util::random_profile(rng, net);
    const FlowSolution sol = solve_flow(net, prof);

    for (int f = 0; f < net.files; ++f) {
      double absorbed = 0.0, exogenous = 0.0;
      for (int i = 0; i < net.caches; ++i) {
        absorbed += sol.alpha(i, f) * prof.pi(i, f);
        exogenous += net.demand(i, f);
      }
      CHECK(std::abs(absorbed - exogenous) <= 1e-9 * (1.0 + exogenous));
    }
    CHECK((sol.alpha - net.demand).minCoeff() >= -1e-12);

    // Raising one availability entry never increases any total input rate.
    AvailabilityProfile raised = prof;
    const int i = static_cast<int>(rng() % net.caches);
    const int f = static_cast<int>(rng() % net.files);
    raised.pi(i, f) = std::min(1.0, raised.pi(i, f) + 0.4);
    const FlowSolution after = solve_flow(net, raised);
    CHECK(((after.alpha - sol.alpha).array() <= 1e-9).all());
  }
}

TEST_CASE("stability verdicts") {
  const CacheNetwork net = two_cache_ring();
  FlowSolution sol;
  sol.alpha_cache = Eigen::Vector2d(2.0, 2.0);

  CacheNetwork roomy = net;
  roomy.service_rate = Eigen::Vector2d(3.0, 3.0);
  CHECK(stability(roomy, sol).stable);

  CacheNetwork critical = net;
  critical.service_rate = Eigen::Vector2d(2.0, 2.0);
  CHECK(!stability(critical, sol).stable);  // strict inequality

  CacheNetwork uneven = net;
  uneven.service_rate = Eigen::Vector2d(2.1, 1.9);
  const StabilityReport rep = stability(uneven, sol);
  CHECK(!rep.stable);
  CHECK(rep.slack[0] == doctest::Approx(0.1));
  CHECK(rep.slack[1] == doctest::Approx(-0.1));
}

TEST_CASE("response time") {
  const CacheNetwork net = two_cache_ring();
  const FlowSolution sol = solve_flow(net, uniform_profile(net, 0.5));
  const ResponseTime rt = response_time(net, sol);
  CHECK(rt.expected_requests == doctest::Approx(1.0));
  CHECK(rt.mean_response_time == doctest::Approx(0.5));

  CacheNetwork doubled = net;
  doubled.service_rate *= 2.0;
  const ResponseTime fast = response_time(doubled, sol);
  CHECK(fast.expected_requests == doctest::Approx(0.5));
  CHECK(fast.mean_response_time == doctest::Approx(0.25));

  // Secondary M/M/1 queue-length metric only behind the flag.
  const ResponseTime mm1 = response_time(net, sol, true);
  CHECK(mm1.expected_requests == doctest::Approx(2.0));  // rho/(1-rho) = 1

  CacheNetwork idle = net;
  idle.demand.setZero();
  CHECK_THROWS_AS(response_time(idle, sol), std::domain_error);
}

TEST_CASE("expected occupancy and overflow") {
  CacheNetwork net;
  net.caches = 1;
  net.files = 10;
  net.adjacency = Eigen::MatrixXi::Zero(1, 1);
  net.storage = Eigen::VectorXd::Constant(1, 5.0);
  net.service_rate = Eigen::VectorXd::Constant(1, 1.0);
  net.file_size = Eigen::VectorXd::Ones(10);
  net.demand = Eigen::MatrixXd::Zero(1, 10);

  const OccupancyReport rep =
      expected_occupancy(uniform_profile(net, 0.5), net);
  CHECK(rep.exact);
  CHECK(rep.expected[0] == doctest::Approx(5.0));
  CHECK(rep.overflow_probability[0] == doctest::Approx(0.376953125));

  CHECK(expected_occupancy(uniform_profile(net, 0.0), net)
            .overflow_probability[0] == doctest::Approx(0.0));
  CacheNetwork roomy = net;
  roomy.storage[0] = 10.0;
  CHECK(expected_occupancy(uniform_profile(roomy, 1.0), roomy)
            .overflow_probability[0] == doctest::Approx(0.0));
  CHECK(expected_occupancy(uniform_profile(roomy, 1.0), roomy).expected[0] ==
        doctest::Approx(10.0));
}

TEST_CASE("occupancy Monte Carlo fallback") {
  CacheNetwork net;
  net.caches = 1;
  net.files = 2;
  net.adjacency = Eigen::MatrixXi::Zero(1, 1);
  net.storage = Eigen::VectorXd::Constant(1, 2.0);
  net.service_rate = Eigen::VectorXd::Constant(1, 1.0);
  net.file_size = Eigen::VectorXd(2);
  net.file_size << 1.0, 2.0;
  net.demand = Eigen::MatrixXd::Zero(1, 2);

  // Overflow iff both files are cached: probability 0.25.
  const OccupancyReport rep =
      expected_occupancy(uniform_profile(net, 0.5), net, 7, 200000);
  CHECK(!rep.exact);
  CHECK(std::abs(rep.overflow_probability[0] - 0.25) <=
        3.0 * rep.std_error[0]);
  CHECK(rep.expected[0] == doctest::Approx(1.5));
}

TEST_CASE("network provisioning") {
  const CacheNetwork net = two_cache_ring();
  const AvailabilityProfile targets = uniform_profile(net, 0.5);

  ThresholdPolicy fixed;
  fixed.kind = ThresholdPolicyKind::Fixed;
  fixed.fixed_threshold = 0.0;
  const std::vector<CounterAssignment> plan =
      provision_network(net, targets, fixed);
  REQUIRE(plan.size() == 2);
  for (const CounterAssignment& a : plan) {
    CHECK(!a.pinned);
    CHECK(a.arrival_rate == doctest::Approx(2.0));
    CHECK(a.mu == doctest::Approx(4.0));
    const double back =
        occupancy_probability({a.arrival_rate, a.mu, a.threshold});
    CHECK(std::abs(back - 0.5) < 1e-10);
  }

  // Pinned replicas carry no counter.
  AvailabilityProfile pinned = targets;
  pinned.pi(0, 0) = 1.0;
  const std::vector<CounterAssignment> plan2 =
      provision_network(net, pinned, fixed);
  REQUIRE(plan2.size() == 2);
  CHECK(plan2[0].pinned);
  CHECK(!plan2[1].pinned);

  // The optimizing policy matches the single-cache optimum at the solved
  // rate.
  ThresholdPolicy opt;
  opt.kind = ThresholdPolicyKind::Optimize;
  opt.weights = CostWeights{1.0, 1.0, 50.0};
  const std::vector<CounterAssignment> plan3 =
      provision_network(net, targets, opt);
  const double expected_k =
      minimize_cost(opt.weights, 0.5, plan3[0].arrival_rate).k_star;
  CHECK(plan3[0].threshold == doctest::Approx(expected_k).epsilon(1e-9));
}
