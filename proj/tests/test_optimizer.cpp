#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "rcnet/counter.hpp"
#include "rcnet/errors.hpp"
#include "rcnet/optimizer.hpp"

using namespace rcnet;

namespace {

// Two-stage grid scan: coarse over the full range, then a 1e-4 sweep of the
// bracketing interval. Independent of the golden-section path.
double grid_scan_minimizer(const CostWeights& w, double pi_up, double lambda) {
  double best_k = 0.0, best = cost_objective(0.0, w, pi_up, lambda);
  const double coarse = 0.05;
  for (double k = coarse; k <= w.k_max; k += coarse) {
    const double v = cost_objective(std::min(k, w.k_max), w, pi_up, lambda);
    if (v < best) {
      best = v;
      best_k = k;
    }
  }
  const double lo = std::max(0.0, best_k - coarse);
  const double hi = std::min(w.k_max, best_k + coarse);
  for (double k = lo; k <= hi; k += 1e-4) {
    const double v = cost_objective(k, w, pi_up, lambda);
    if (v < best) {
      best = v;
      best_k = k;
    }
  }
  return best_k;
}

double recovered_lambda() {
  return 0.32 / (0.9 * (std::pow(0.9, -1.0 / 11.0) - 1.0));
}

}  // namespace

TEST_CASE("objective equals the assembled cost") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const double pi = 0.05 + 0.9 * unif(rng);
    const double lambda = 0.2 + 8.0 * unif(rng);
    const double k = 30.0 * unif(rng);
    const CostWeights w{0.1 + unif(rng), 0.1 + unif(rng), 50.0};
    const Provision prov = provision_from_target({pi, lambda, k});
    const double assembled = w.alpha * prov.gamma + w.beta * prov.mean_return;
    const double direct = cost_objective(k, w, pi, lambda);
    CHECK(std::abs(direct - assembled) <= 1e-12 * std::abs(assembled));
  }
}

TEST_CASE("beta zero pushes K to the cap") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const CostWeights w{0.1 + 5.0 * unif(rng), 0.0, 1.0 + 40.0 * unif(rng)};
    const OptimumK opt =
        minimize_cost(w, 0.05 + 0.9 * unif(rng), 0.1 + 5.0 * unif(rng));
    CHECK(opt.k_star == w.k_max);
  }
}

TEST_CASE("published optimum around K = 10") {
  const double lambda = recovered_lambda();
  const OptimumK opt = minimize_cost({1.0, 1.0, 50.0}, 0.9, lambda);
  CHECK(opt.k_star > 9.5);
  CHECK(opt.k_star < 10.5);
  const Provision at = provision_from_target({0.9, lambda, opt.k_star});
  CHECK(std::abs(at.gamma - 0.32) < 0.01);
  CHECK(std::abs(at.mean_return - 0.31) < 0.01);

  // The cost curve falls and then rises through the optimum.
  const CostWeights w{1.0, 1.0, 50.0};
  CHECK(cost_objective(2.0, w, 0.9, lambda) >
        cost_objective(opt.k_star, w, 0.9, lambda));
  CHECK(cost_objective(30.0, w, 0.9, lambda) >
        cost_objective(opt.k_star, w, 0.9, lambda));
  CHECK(cost_objective(0.0, w, 0.9, lambda) >
        cost_objective(2.0, w, 0.9, lambda));
}

TEST_CASE("golden section matches the grid-scan oracle") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double pi = 0.1 + 0.8 * unif(rng);
    const double lambda = 0.3 + 6.0 * unif(rng);
    const CostWeights w{0.1 + 2.0 * unif(rng), 0.1 + 2.0 * unif(rng),
                        5.0 + 30.0 * unif(rng)};
    const OptimumK opt = minimize_cost(w, pi, lambda);
    const double oracle = grid_scan_minimizer(w, pi, lambda);
    CHECK(std::abs(opt.k_star - oracle) < 1e-3);
  }
}

TEST_CASE("cost curve is unimodal") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const double pi = 0.1 + 0.8 * unif(rng);
    const double lambda = 0.3 + 6.0 * unif(rng);
    const CostWeights w{0.1 + 2.0 * unif(rng), 0.1 + 2.0 * unif(rng), 40.0};
    std::vector<double> values;
    for (double k = 0.0; k <= w.k_max; k += 0.01)
      values.push_back(cost_objective(k, w, pi, lambda));
    int strict_minima = 0;
    for (std::size_t i = 1; i + 1 < values.size(); ++i)
      if (values[i] < values[i - 1] && values[i] < values[i + 1])
        ++strict_minima;
    CHECK(strict_minima <= 1);
  }
}

TEST_CASE("argmin invariant under weight scaling") {
  for (double c : {0.01, 0.5, 3.0, 250.0}) {
    const OptimumK base = minimize_cost({1.0, 2.0, 40.0}, 0.7, 2.0);
    const OptimumK scaled = minimize_cost({c, 2.0 * c, 40.0}, 0.7, 2.0);
    CHECK(std::abs(base.k_star - scaled.k_star) < 1e-5);
  }
}

TEST_CASE("hard return-time cap") {
  const double lambda = recovered_lambda();
  const CostWeights w{1.0, 1.0, 50.0};
  const OptimumK opt = minimize_cost(w, 0.9, lambda);
  const double er_opt =
      provision_from_target({0.9, lambda, opt.k_star}).mean_return;

  // Slack cap: unconstrained optimum.
  const CappedOptimum slack =
      minimize_with_return_cap(w, 0.9, lambda, 10.0 * er_opt);
  CHECK(!slack.cap_active);
  CHECK(slack.k == doctest::Approx(opt.k_star).epsilon(1e-9));

  // Active cap at the published return time pins K near 10.
  const CappedOptimum tight = minimize_with_return_cap(w, 0.9, lambda, 0.31);
  CHECK(tight.cap_active);
  CHECK(std::abs(provision_from_target({0.9, lambda, tight.k}).mean_return -
                 0.31) < 1e-9);
  CHECK(tight.k > 9.0);
  CHECK(tight.k < 11.0);

  // A cap below E[R](0) is infeasible.
  const double er0 = provision_from_target({0.9, lambda, 0.0}).mean_return;
  CHECK_THROWS_AS(minimize_with_return_cap(w, 0.9, lambda, 0.5 * er0),
                  InfeasibleConstraintError);
}

TEST_CASE("numerical convexity of the objective blocks") {
  std::vector<double> grid;
  for (double k = 0.0; k <= 50.0; k += 0.01) grid.push_back(k);
  for (double pi : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const ConvexityReport rep = verify_convexity(pi, grid);
    CHECK(rep.ok());
    CHECK(rep.min_second_diff_rate_factor >= -1e-9);
    CHECK(rep.min_second_diff_return_factor >= -1e-9);
    CHECK(rep.delta_at_zero >= 0.0);
    CHECK(std::abs(rep.delta_far) < 1e-3);

    // Closed-form second derivative of the rate factor stays positive.
    for (double k : {0.0, 1.0, 5.0, 20.0}) {
      const double log_pi = std::log(pi);
      const double d2 = -log_pi * (2.0 * (k + 1.0) - log_pi) /
                        (std::pow(k + 1.0, 4.0) * std::pow(pi, 1.0 / (k + 1.0)));
      CHECK(d2 > 0.0);
      const double h = 1e-4;
      const double numeric = (rate_factor(k + h, pi) - 2.0 * rate_factor(k, pi) +
                              rate_factor(k - h < 0 ? 0.0 : k - h, pi)) /
                             (h * h);
      if (k > 0.0) CHECK(numeric == doctest::Approx(d2).epsilon(1e-3));
    }
  }
}
