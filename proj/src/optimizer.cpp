#include "rcnet/optimizer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "rcnet/counter.hpp"
#include "rcnet/errors.hpp"

namespace rcnet {

namespace {

void check_inputs(const CostWeights& w, double pi_up, double lambda) {
  if (!(w.alpha >= 0.0) || !(w.beta >= 0.0) || (w.alpha == 0.0 && w.beta == 0.0))
    throw std::domain_error("cost weights must be non-negative, not both zero");
  if (!(w.k_max > 0.0)) throw std::domain_error("k_max must be positive");
  if (!(pi_up > 0.0 && pi_up < 1.0))
    throw std::domain_error("pi_up must lie in (0,1)");
  if (!(lambda > 0.0)) throw std::domain_error("lambda must be positive");
}

}  // namespace

double rate_factor(double k, double pi_up) {
  return std::pow(pi_up, -1.0 / (k + 1.0));
}

double return_factor(double k, double pi_up) {
  // expm1 keeps precision where the factor sits just above 1 (large K).
  return 1.0 / std::expm1(-std::log(pi_up) / (k + 1.0));
}

double omega_curvature_sign(double k, double pi_up) {
  const double log_pi = std::log(pi_up);
  return std::pow(pi_up, 1.0 / (k + 1.0)) * (2.0 * k - log_pi + 2.0) -
         (2.0 * k + log_pi + 2.0);
}

double cost_objective(double k, const CostWeights& w, double pi_up,
                      double lambda) {
  check_inputs(w, pi_up, lambda);
  if (!(k >= 0.0) || k > w.k_max)
    throw std::domain_error("K outside [0, k_max]");
  const double fm1 = std::expm1(-std::log(pi_up) / (k + 1.0));
  const double gamma = lambda * pi_up * fm1;
  const double mean_return = (1.0 - pi_up) / (pi_up * lambda) / fm1;
  return w.alpha * gamma + w.beta * mean_return;
}

OptimumK minimize_cost(const CostWeights& w, double pi_up, double lambda) {
  check_inputs(w, pi_up, lambda);
  if (w.beta == 0.0)
    return {w.k_max, cost_objective(w.k_max, w, pi_up, lambda)};

  const auto psi = [&](double k) {
    const double fm1 = std::expm1(-std::log(pi_up) / (k + 1.0));
    return w.alpha * lambda * pi_up * fm1 +
           w.beta * (1.0 - pi_up) / (pi_up * lambda) / fm1;
  };

  // Golden-section on [0, k_max]; unimodality follows from convexity of the
  // two summands.
  const double inv_gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0, b = w.k_max;
  double c = b - inv_gr * (b - a);
  double d = a + inv_gr * (b - a);
  double fc = psi(c), fd = psi(d);
  while (b - a > 1e-6) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_gr * (b - a);
      fc = psi(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_gr * (b - a);
      fd = psi(d);
    }
  }
  const double k_star = 0.5 * (a + b);
  return {k_star, psi(k_star)};
}

CappedOptimum minimize_with_return_cap(const CostWeights& w, double pi_up,
                                       double lambda, double r_star) {
  check_inputs(w, pi_up, lambda);
  if (!(r_star > 0.0)) throw std::domain_error("return cap must be positive");

  const auto mean_return = [&](double k) {
    return (1.0 - pi_up) / (pi_up * lambda) / (rate_factor(k, pi_up) - 1.0);
  };
  if (mean_return(0.0) > r_star)
    throw InfeasibleConstraintError(
        "infeasible constraint: E[R] at K=0 already exceeds the cap");

  const OptimumK unconstrained = minimize_cost(w, pi_up, lambda);
  if (mean_return(unconstrained.k_star) <= r_star)
    return {unconstrained.k_star, false};

  // E[R] is strictly increasing in K, so the active cap pins a unique K.
  double lo = 0.0, hi = unconstrained.k_star;
  while (hi - lo > 1e-12 * (1.0 + hi)) {
    const double mid = 0.5 * (lo + hi);
    if (mean_return(mid) <= r_star)
      lo = mid;
    else
      hi = mid;
  }
  return {0.5 * (lo + hi), true};
}

ConvexityReport verify_convexity(double pi_up,
                                 const std::vector<double>& k_grid) {
  if (!(pi_up > 0.0 && pi_up < 1.0))
    throw std::domain_error("pi_up must lie in (0,1)");
  if (k_grid.size() < 3)
    throw std::domain_error("convexity grid needs at least 3 points");

  ConvexityReport rep;
  rep.min_second_diff_rate_factor = std::numeric_limits<double>::infinity();
  rep.min_second_diff_return_factor = std::numeric_limits<double>::infinity();
  rep.min_omega_sign_term = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < k_grid.size(); ++i) {
    const double k = k_grid[i];
    const double h_lo = k - k_grid[i - 1];
    const double h_hi = k_grid[i + 1] - k;
    const double h = 0.5 * (h_lo + h_hi);
    const auto second = [&](double (*f)(double, double)) {
      return (f(k_grid[i + 1], pi_up) - 2.0 * f(k, pi_up) +
              f(k_grid[i - 1], pi_up)) /
             (h * h);
    };
    const double d2_phi = second(&rate_factor);
    const double d2_omega = second(&return_factor);
    rep.min_second_diff_rate_factor =
        std::min(rep.min_second_diff_rate_factor, d2_phi);
    rep.min_second_diff_return_factor =
        std::min(rep.min_second_diff_return_factor, d2_omega);
    rep.min_omega_sign_term =
        std::min(rep.min_omega_sign_term, omega_curvature_sign(k, pi_up));
    if (d2_phi < -1e-9 || d2_omega < -1e-9) rep.violations.push_back(k);
  }
  rep.delta_at_zero = omega_curvature_sign(0.0, pi_up);
  rep.delta_far = omega_curvature_sign(1e4, pi_up);
  return rep;
}

}  // namespace rcnet
