#include "rcnet/hysteresis.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rcnet/errors.hpp"

namespace rcnet {

namespace {

void check_params(const HysteresisParams& p) {
  if (!(p.lambda > 0.0) || !(p.mu > 0.0))
    throw std::domain_error("counter rates must be positive");
  if (p.evict_threshold < 0 || p.evict_threshold > p.insert_threshold)
    throw std::domain_error("thresholds must satisfy 0 <= K_h <= K");
}

void check_stable(const HysteresisParams& p) {
  check_params(p);
  if (p.lambda >= p.mu)
    throw UnstableCounterError("unstable counter: rho = lambda/mu >= 1");
}

// Tridiagonal sub-generator of an absorbing birth-death chain. Row i has
// diagonal diag[i] (negative), up[i] towards i+1 and down[i] towards i-1;
// the missing rate mass is the absorption rate.
struct AbsorbingChain {
  Eigen::VectorXd diag;
  Eigen::VectorXd up;    // up[m-1] unused
  Eigen::VectorXd down;  // down[0] unused
  int start = 0;
};

// Uncached band 0..K, absorbed by the arrival that lifts the counter past K.
AbsorbingChain return_chain(const HysteresisParams& p) {
  const int m = p.insert_threshold + 1;
  AbsorbingChain c;
  c.diag.resize(m);
  c.up = Eigen::VectorXd::Zero(m);
  c.down = Eigen::VectorXd::Zero(m);
  for (int n = 0; n < m; ++n) {
    const double out = p.lambda + (n >= 1 ? p.mu : 0.0);
    c.diag[n] = -out;
    if (n + 1 < m) c.up[n] = p.lambda;
    if (n >= 1) c.down[n] = p.mu;
  }
  c.start = p.evict_threshold;
  return c;
}

// Cached band K_h+1..n_max, absorbed by the tick that drops the counter to
// K_h. Truncated above; the mass that ever reaches n_max is O(rho^(n_max-K)).
AbsorbingChain busy_chain(const HysteresisParams& p, int n_max) {
  const int lo = p.evict_threshold + 1;
  const int m = n_max - p.evict_threshold;
  AbsorbingChain c;
  c.diag.resize(m);
  c.up = Eigen::VectorXd::Zero(m);
  c.down = Eigen::VectorXd::Zero(m);
  for (int j = 0; j < m; ++j) {
    const int n = lo + j;
    const double out = p.mu + (n < n_max ? p.lambda : 0.0);
    c.diag[j] = -out;
    if (n < n_max) c.up[j] = p.lambda;
    if (j >= 1) c.down[j] = p.mu;
  }
  c.start = p.insert_threshold + 1 - lo;
  return c;
}

// Solves (-S) x = rhs by the Thomas algorithm; -S has positive diagonal and
// non-positive off-diagonals. The sweep starts from the end with the larger
// diagonal: seeding the elimination on the degenerate absorbing-boundary
// pivot amplifies rounding by (mu/lambda)^m.
Eigen::VectorXd solve_neg_tridiag(const AbsorbingChain& c,
                                  const Eigen::VectorXd& rhs) {
  const int m = static_cast<int>(c.diag.size());
  Eigen::VectorXd d(m), r(m), x(m);
  if (m == 1) {
    x[0] = rhs[0] / -c.diag[0];
    return x;
  }
  if (std::abs(c.diag[0]) >= std::abs(c.diag[m - 1])) {
    d[0] = -c.diag[0];
    r[0] = rhs[0];
    for (int i = 1; i < m; ++i) {
      const double w = -c.down[i] / d[i - 1];
      d[i] = -c.diag[i] + w * c.up[i - 1];
      r[i] = rhs[i] - w * r[i - 1];
    }
    x[m - 1] = r[m - 1] / d[m - 1];
    for (int i = m - 2; i >= 0; --i)
      x[i] = (r[i] + c.up[i] * x[i + 1]) / d[i];
  } else {
    d[m - 1] = -c.diag[m - 1];
    r[m - 1] = rhs[m - 1];
    for (int i = m - 2; i >= 0; --i) {
      const double w = -c.up[i] / d[i + 1];
      d[i] = -c.diag[i] + w * c.down[i + 1];
      r[i] = rhs[i] - w * r[i + 1];
    }
    x[0] = r[0] / d[0];
    for (int i = 1; i < m; ++i) x[i] = (r[i] + c.down[i] * x[i - 1]) / d[i];
  }
  return x;
}

SojournMoments chain_moments(const AbsorbingChain& c) {
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(c.diag.size());
  const Eigen::VectorXd m1 = solve_neg_tridiag(c, ones);
  const Eigen::VectorXd m2 = solve_neg_tridiag(c, m1);
  return {m1[c.start], 2.0 * m2[c.start]};
}

// Survival function of the absorption time by uniformization, sharing the
// jump-chain survival sequence s_k across evaluation points.
class UniformizedSurvival {
 public:
  explicit UniformizedSurvival(const AbsorbingChain& c) : chain_(c) {
    rate_ = 0.0;
    for (int i = 0; i < c.diag.size(); ++i)
      rate_ = std::max(rate_, -c.diag[i]);
    u_ = Eigen::VectorXd::Ones(c.diag.size());
    s_.push_back(1.0);
  }

  double operator()(double t) const {
    if (t <= 0.0) return 1.0;
    const double a = rate_ * t;
    // Poisson window covering all but ~1e-9 of the mass.
    long k_lo = 0, k_hi;
    if (a < 30.0) {
      k_hi = static_cast<long>(a + 12.0 * std::sqrt(a + 1.0) + 20.0);
    } else {
      const double half = 8.5 * std::sqrt(a) + 10.0;
      k_lo = std::max(0L, static_cast<long>(a - half));
      k_hi = static_cast<long>(a + half) + 1;
    }
    extend(k_hi);
    double total = 0.0;
    for (long k = k_lo; k <= k_hi; ++k) {
      const double logw = -a + k * std::log(a) - std::lgamma(k + 1.0);
      total += std::exp(logw) * jump_survival(k);
    }
    return std::min(1.0, total);
  }

 private:
  double jump_survival(long k) const {
    return k < static_cast<long>(s_.size()) ? s_[k] : 0.0;
  }

  // s_k is non-increasing, so once it drops below 1e-18 the tail is zero
  // for any practical weight.
  void extend(long k_hi) const {
    while (static_cast<long>(s_.size()) <= k_hi && s_.back() > 1e-18) {
      Eigen::VectorXd next(u_.size());
      const int m = static_cast<int>(u_.size());
      for (int i = 0; i < m; ++i) {
        double acc = (1.0 + chain_.diag[i] / rate_) * u_[i];
        if (i + 1 < m) acc += chain_.up[i] / rate_ * u_[i + 1];
        if (i >= 1) acc += chain_.down[i] / rate_ * u_[i - 1];
        next[i] = acc;
      }
      u_ = next;
      s_.push_back(u_[chain_.start]);
    }
  }

  AbsorbingChain chain_;
  double rate_;
  mutable Eigen::VectorXd u_;
  mutable std::vector<double> s_;
};

AbsorbingChain make_chain(const HysteresisParams& p, Sojourn which) {
  if (which == Sojourn::Busy) {
    check_stable(p);
    return busy_chain(p, default_truncation(p));
  }
  check_params(p);
  return return_chain(p);
}

}  // namespace

int HysteresisChain::index_of(int counter, bool cached) const {
  const int k = params.insert_threshold;
  const int kh = params.evict_threshold;
  if (!cached) {
    if (counter < 0 || counter > k) return -1;
    return counter;
  }
  if (counter <= kh || counter > n_max) return -1;
  return (k + 1) + (counter - kh - 1);
}

int default_truncation(const HysteresisParams& p) {
  check_stable(p);
  const double rho = p.lambda / p.mu;
  const int tail =
      static_cast<int>(std::ceil(std::log(1e-12) / std::log(rho))) + 5;
  return p.insert_threshold + std::max(2, tail);
}

HysteresisChain build_chain(const HysteresisParams& p, int n_max) {
  check_stable(p);
  if (n_max < p.insert_threshold + 2)
    throw std::domain_error("truncation level must be at least K+2");

  const int k = p.insert_threshold;
  const int kh = p.evict_threshold;
  HysteresisChain chain;
  chain.params = p;
  chain.n_max = n_max;
  for (int n = 0; n <= k; ++n) chain.states.push_back({n, false});
  for (int n = kh + 1; n <= n_max; ++n) chain.states.push_back({n, true});

  const int total = static_cast<int>(chain.states.size());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(3 * total);
  const auto add = [&](int from, int to, double rate) {
    trip.emplace_back(from, to, rate);
    trip.emplace_back(from, from, -rate);
  };
  for (int i = 0; i < total; ++i) {
    const ChainState s = chain.states[i];
    if (!s.cached) {
      // Arrival; crossing K flips the flag.
      if (s.counter < k)
        add(i, chain.index_of(s.counter + 1, false), p.lambda);
      else
        add(i, chain.index_of(k + 1, true), p.lambda);
      // Tick; lost in state 0.
      if (s.counter >= 1)
        add(i, chain.index_of(s.counter - 1, false), p.mu);
    } else {
      if (s.counter < n_max)
        add(i, chain.index_of(s.counter + 1, true), p.lambda);
      // Dropping to K_h flips the flag.
      if (s.counter > kh + 1)
        add(i, chain.index_of(s.counter - 1, true), p.mu);
      else
        add(i, chain.index_of(kh, false), p.mu);
    }
  }
  chain.generator.resize(total, total);
  chain.generator.setFromTriplets(trip.begin(), trip.end());
  return chain;
}

double stationary_occupancy(const HysteresisChain& chain) {
  const int n = static_cast<int>(chain.states.size());
  // Global balance Q^T pi = 0 with the first equation replaced by the
  // normalization sum(pi) = 1.
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(3 * n + n);
  for (int row = 0; row < chain.generator.outerSize(); ++row) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(
             chain.generator, row);
         it; ++it) {
      if (it.col() != 0) trip.emplace_back(static_cast<int>(it.col()),
                                           row, it.value());
    }
  }
  for (int j = 0; j < n; ++j) trip.emplace_back(0, j, 1.0);

  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(trip.begin(), trip.end());
  a.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("stationary solve failed: singular generator");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs[0] = 1.0;
  Eigen::VectorXd pi = lu.solve(rhs);
  // Iterative refinement recovers componentwise accuracy; the stationary
  // masses span many orders of magnitude.
  for (int round = 0; round < 3; ++round) {
    const Eigen::VectorXd residual = rhs - a * pi;
    pi += lu.solve(residual);
  }

  double up = 0.0;
  for (int i = 0; i < n; ++i)
    if (chain.states[i].cached) up += pi[i];
  return up;
}

double stationary_occupancy(const HysteresisParams& p) {
  return stationary_occupancy(build_chain(p, default_truncation(p)));
}

double first_passage_mean_busy(const HysteresisParams& p) {
  check_stable(p);
  return (p.insert_threshold - p.evict_threshold + 1) / (p.mu - p.lambda);
}

double first_passage_mean_return(const HysteresisParams& p) {
  check_params(p);
  // The absorbing system on the uncached band decouples into per-level
  // climb times h_n = E[n -> n+1] with h_n = (1 + mu h_{n-1})/lambda; the
  // all-positive recursion keeps componentwise accuracy where the dense
  // solve would lose rho^-K digits to cancellation.
  double level = 1.0 / p.lambda;
  double total = p.evict_threshold == 0 ? level : 0.0;
  for (int n = 1; n <= p.insert_threshold; ++n) {
    level = (1.0 + p.mu * level) / p.lambda;
    if (n >= p.evict_threshold) total += level;
  }
  return total;
}

std::vector<double> paper_recursion_nu(const HysteresisParams& p, int up_to) {
  check_stable(p);
  if (up_to < 1) throw std::domain_error("recursion length must be >= 1");
  const double rho = p.lambda / p.mu;
  std::vector<double> nu(up_to);
  nu[0] = 1.0 / (p.mu - p.lambda);
  for (int i = 1; i < up_to; ++i)
    nu[i] = 1.0 / p.mu + nu[i - 1] + rho * nu[0];
  return nu;
}

std::vector<double> paper_recursion_xi(const HysteresisParams& p, int up_to) {
  check_params(p);
  if (up_to < 1) throw std::domain_error("recursion length must be >= 1");
  const double rho = p.lambda / p.mu;
  // Base case: the no-hysteresis return time, sum of the per-level climb
  // times (1/lambda) sum_{j<=K} rho^-j.
  double base = 0.0;
  for (int j = 0; j <= p.insert_threshold; ++j)
    base += std::pow(rho, -j) / p.lambda;
  std::vector<double> xi(up_to);
  xi[0] = base;
  for (int i = 1; i < up_to; ++i)
    xi[i] = 1.0 / p.lambda + xi[i - 1] + xi[0] / rho;
  return xi;
}

PassageTimes passage_recursions(const HysteresisParams& p, int up_to) {
  return {paper_recursion_nu(p, up_to), paper_recursion_xi(p, up_to)};
}

std::vector<XiDivergenceRow> xi_divergence_rows(const HysteresisParams& p) {
  check_params(p);
  const int k = p.insert_threshold;
  const std::vector<double> printed = paper_recursion_xi(p, k + 1);
  std::vector<XiDivergenceRow> rows;
  for (int gap = 0; gap <= k; ++gap) {
    HysteresisParams q = p;
    q.evict_threshold = k - gap;
    const double oracle = first_passage_mean_return(q);
    rows.push_back({p.lambda, p.mu, k, q.evict_threshold, printed[gap],
                    oracle, std::abs(printed[gap] - oracle)});
  }
  return rows;
}

std::vector<double> sojourn_cdf(const HysteresisParams& p, Sojourn which,
                                const std::vector<double>& grid) {
  const UniformizedSurvival survival(make_chain(p, which));
  std::vector<double> cdf(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0))
      throw std::domain_error("CDF grid times must be non-negative");
    cdf[i] = 1.0 - survival(grid[i]);
  }
  return cdf;
}

SojournMoments sojourn_moments(const HysteresisParams& p, Sojourn which) {
  return chain_moments(make_chain(p, which));
}

double coefficient_of_variation(const HysteresisParams& p, Sojourn which) {
  const SojournMoments m = sojourn_moments(p, which);
  const double var = std::max(0.0, m.second_moment - m.mean * m.mean);
  return std::sqrt(var) / m.mean;
}

double replacement_rate(const HysteresisParams& p) {
  return 1.0 / (first_passage_mean_busy(p) + first_passage_mean_return(p));
}

double retune_mu_for_target(double pi_up_target, double lambda,
                            int insert_threshold, int evict_threshold) {
  if (!(pi_up_target > 0.0 && pi_up_target < 1.0))
    throw std::domain_error("pi_up target must lie in (0,1)");
  if (!(lambda > 0.0)) throw std::domain_error("lambda must be positive");
  if (evict_threshold < 0 || evict_threshold > insert_threshold)
    throw std::domain_error("thresholds must satisfy 0 <= K_h <= K");

  // Renewal form of the occupancy, strictly decreasing in mu.
  const auto occupancy = [&](double mu) {
    const double rho = lambda / mu;
    const double busy =
        (insert_threshold - evict_threshold + 1) / (mu - lambda);
    double ret = 0.0;
    for (int n = evict_threshold; n <= insert_threshold; ++n)
      for (int j = 0; j <= n; ++j) ret += std::pow(rho, -j) / lambda;
    return busy / (busy + ret);
  };

  double hi = 2.0 * lambda;
  while (occupancy(hi) > pi_up_target) {
    hi *= 2.0;
    if (hi > 1e15 * lambda)
      throw std::runtime_error("no bracket found for the occupancy target");
  }
  double lo = lambda * (1.0 + 1e-12);
  for (int iter = 0; iter < 200 && hi - lo > 1e-14 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (occupancy(mid) > pi_up_target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace rcnet
