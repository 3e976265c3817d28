#pragma once

#include <vector>

namespace rcnet {

// Weights of the tuning objective psi(K) = alpha*gamma + beta*E[R],
// evaluated at a fixed pi_up and lambda.
struct CostWeights {
  double alpha = 1.0;  // cost per insertion event
  double beta = 1.0;   // cost per unit of return time
  double k_max = 100.0;
};

struct OptimumK {
  double k_star;
  double cost;
};

struct CappedOptimum {
  double k;
  bool cap_active;
};

// mu/lambda as a function of K at fixed pi_up: pi_up^(-1/(K+1)).
double rate_factor(double k, double pi_up);

// 1/(pi_up^(-1/(K+1)) - 1); proportional to E[R] at fixed pi_up and lambda.
double return_factor(double k, double pi_up);

// Sign term whose non-negativity implies convexity of return_factor.
double omega_curvature_sign(double k, double pi_up);

// psi(K) assembled from the closed forms.
double cost_objective(double k, const CostWeights& weights, double pi_up,
                      double lambda);

// Minimizes psi over [0, k_max]. beta = 0 returns k_max exactly; otherwise
// golden-section search (psi is a positive combination of two convex terms,
// hence unimodal) to |dK| <= 1e-6.
OptimumK minimize_cost(const CostWeights& weights, double pi_up,
                       double lambda);

// Variant with a hard cap E[R] <= r_star: the unconstrained optimum when the
// cap is slack, otherwise the unique K with E[R](K) = r_star.
CappedOptimum minimize_with_return_cap(const CostWeights& weights,
                                       double pi_up, double lambda,
                                       double r_star);

// Numerical curvature check of the two objective building blocks on a grid.
struct ConvexityReport {
  double min_second_diff_rate_factor;
  double min_second_diff_return_factor;
  double min_omega_sign_term;
  double delta_at_zero;        // omega_curvature_sign at K = 0
  double delta_far;            // omega_curvature_sign at K = 1e4
  std::vector<double> violations;  // grid points with second diff < -1e-9
  bool ok() const { return violations.empty(); }
};

ConvexityReport verify_convexity(double pi_up,
                                 const std::vector<double>& k_grid);

}  // namespace rcnet
