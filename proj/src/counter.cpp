#include "rcnet/counter.hpp"

#include <cmath>
#include <stdexcept>

#include "rcnet/errors.hpp"

namespace rcnet {

namespace {

void check_params(const CounterParams& p) {
  if (!(p.lambda > 0.0) || !(p.mu > 0.0))
    throw std::domain_error("counter rates must be positive");
  if (!(p.threshold >= 0.0))
    throw std::domain_error("counter threshold must be non-negative");
}

void check_stable(const CounterParams& p) {
  check_params(p);
  if (p.lambda >= p.mu)
    throw UnstableCounterError("unstable counter: rho = lambda/mu >= 1");
}

}  // namespace

double occupancy_probability(const CounterParams& p) {
  check_stable(p);
  return std::pow(p.lambda / p.mu, p.threshold + 1.0);
}

double mean_busy(const CounterParams& p) {
  check_stable(p);
  return 1.0 / (p.mu - p.lambda);
}

double mean_return(const CounterParams& p) {
  check_stable(p);
  const double pi_up = std::pow(p.lambda / p.mu, p.threshold + 1.0);
  return (1.0 - pi_up) / (pi_up * (p.mu - p.lambda));
}

double replacement_rate(const CounterParams& p) {
  check_stable(p);
  const double rho = p.lambda / p.mu;
  return p.lambda * std::pow(rho, p.threshold) * (1.0 - rho);
}

SteadyState steady_state(const CounterParams& p) {
  check_stable(p);
  const double rho = p.lambda / p.mu;
  const double pi_up = std::pow(rho, p.threshold + 1.0);
  SteadyState s;
  s.rho = rho;
  s.pi_up = pi_up;
  s.mean_busy = 1.0 / (p.mu - p.lambda);
  s.mean_return = (1.0 - pi_up) / (pi_up * (p.mu - p.lambda));
  s.gamma = p.lambda * std::pow(rho, p.threshold) * (1.0 - rho);
  return s;
}

Provision provision_from_target(const TargetSpec& spec) {
  if (!(spec.pi_up_target > 0.0 && spec.pi_up_target < 1.0))
    throw std::domain_error("pi_up target must lie in (0,1)");
  if (!(spec.lambda > 0.0)) throw std::domain_error("lambda must be positive");
  if (!(spec.threshold >= 0.0))
    throw std::domain_error("counter threshold must be non-negative");

  const double pi = spec.pi_up_target;
  const double rho = std::pow(pi, 1.0 / (spec.threshold + 1.0));
  Provision out;
  out.rho = rho;
  out.mu = spec.lambda / rho;
  out.gamma = spec.lambda * pi * (1.0 / rho - 1.0);
  out.mean_return = (1.0 - pi) / (pi * (out.mu - spec.lambda));
  return out;
}

double markov_tail_bound(double mean_return, double r) {
  if (!(r > 0.0)) throw std::domain_error("tail bound requires r > 0");
  if (!(mean_return >= 0.0))
    throw std::domain_error("mean return time must be non-negative");
  return std::min(1.0, mean_return / r);
}

ThresholdMix randomized_threshold(double k_real) {
  if (!(k_real >= 0.0))
    throw std::domain_error("counter threshold must be non-negative");
  const double low = std::floor(k_real);
  const double frac = k_real - low;
  if (frac == 0.0) return {static_cast<long>(low), static_cast<long>(low), 0.0};
  return {static_cast<long>(low), static_cast<long>(low) + 1, frac};
}

}  // namespace rcnet
