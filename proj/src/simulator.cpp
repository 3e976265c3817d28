#include "rcnet/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <random>
#include <stdexcept>

#include "rcnet/errors.hpp"

namespace rcnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_config(const SimConfig& cfg) {
  if (cfg.horizon < 0.0 || (cfg.horizon == 0.0 && cfg.max_events == 0))
    throw std::domain_error("simulation horizon must be positive");
  if (!(cfg.warmup_fraction >= 0.0 && cfg.warmup_fraction < 1.0))
    throw std::domain_error("warmup fraction must lie in [0,1)");
  if (cfg.replications < 1)
    throw std::domain_error("need at least one replication");
  if (cfg.batches < 2) throw std::domain_error("need at least two batches");
}

// One independent stream per stochastic source; adding a source never
// perturbs the others.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t rep,
                            std::uint64_t kind, std::uint64_t a = 0,
                            std::uint64_t b = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(rep),
                    static_cast<std::uint32_t>(kind),
                    static_cast<std::uint32_t>(a),
                    static_cast<std::uint32_t>(b)};
  return std::mt19937_64(seq);
}

MetricEstimate batch_estimate(const std::vector<double>& batch_means) {
  MetricEstimate e;
  const int n = static_cast<int>(batch_means.size());
  for (double v : batch_means) e.value += v;
  e.value /= n;
  double ss = 0.0;
  for (double v : batch_means) ss += (v - e.value) * (v - e.value);
  e.std_error = n > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
  return e;
}

MetricEstimate sample_estimate(const std::vector<double>& samples) {
  MetricEstimate e;
  const int n = static_cast<int>(samples.size());
  if (n == 0) return e;
  for (double v : samples) e.value += v;
  e.value /= n;
  double ss = 0.0;
  for (double v : samples) ss += (v - e.value) * (v - e.value);
  e.std_error = n > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
  return e;
}

// Cached intervals of one run, for time-weighted post-processing.
struct CounterTrace {
  std::vector<std::pair<double, double>> intervals;  // closed [insert, evict]
  bool open_at_end = false;
  double open_start = 0.0;
  double end_time = 0.0;
  std::uint64_t events = 0;
};

double cached_time_in(const CounterTrace& tr, double lo, double hi) {
  double total = 0.0;
  for (const auto& [a, b] : tr.intervals)
    total += std::max(0.0, std::min(b, hi) - std::max(a, lo));
  if (tr.open_at_end)
    total += std::max(0.0, hi - std::max(tr.open_start, lo));
  return total;
}

SimReport trace_report(const CounterTrace& tr, const SimConfig& cfg) {
  SimReport rep;
  rep.events = tr.events;
  rep.sim_time = tr.end_time;
  const double warm = cfg.warmup_fraction * tr.end_time;
  const double width = (tr.end_time - warm) / cfg.batches;

  std::vector<double> pi_batches(cfg.batches), gamma_batches(cfg.batches, 0.0);
  for (int b = 0; b < cfg.batches; ++b) {
    const double lo = warm + b * width;
    const double hi = lo + width;
    pi_batches[b] = cached_time_in(tr, lo, hi) / width;
  }
  for (const auto& [a, _] : tr.intervals) {
    if (a < warm) continue;
    const int b = std::min(cfg.batches - 1,
                           static_cast<int>((a - warm) / width));
    gamma_batches[b] += 1.0 / width;
  }
  rep.pi_up = batch_estimate(pi_batches);
  rep.gamma = batch_estimate(gamma_batches);

  for (std::size_t i = 0; i < tr.intervals.size(); ++i) {
    const auto& [a, b] = tr.intervals[i];
    if (a >= warm) rep.busy_samples.push_back(b - a);
    if (i + 1 < tr.intervals.size() && b >= warm)
      rep.return_samples.push_back(tr.intervals[i + 1].first - b);
  }
  rep.mean_busy = sample_estimate(rep.busy_samples);
  rep.mean_return = sample_estimate(rep.return_samples);
  return rep;
}

SimReport merge_replications(const std::vector<SimReport>& runs) {
  if (runs.size() == 1) return runs.front();
  SimReport rep;
  const auto combine = [&](MetricEstimate SimReport::* field) {
    std::vector<double> values;
    for (const SimReport& r : runs) values.push_back((r.*field).value);
    rep.*field = sample_estimate(values);
  };
  combine(&SimReport::pi_up);
  combine(&SimReport::gamma);
  combine(&SimReport::mean_busy);
  combine(&SimReport::mean_return);
  for (const SimReport& r : runs) {
    rep.events += r.events;
    rep.sim_time += r.sim_time;
    rep.empirically_unstable |= r.empirically_unstable;
    rep.busy_samples.insert(rep.busy_samples.end(), r.busy_samples.begin(),
                            r.busy_samples.end());
    rep.return_samples.insert(rep.return_samples.end(),
                              r.return_samples.begin(),
                              r.return_samples.end());
  }
  if (!runs.front().alpha_cache.empty()) {
    const int caches = static_cast<int>(runs.front().alpha_cache.size());
    rep.alpha_cache.resize(caches);
    for (int i = 0; i < caches; ++i) {
      std::vector<double> values;
      for (const SimReport& r : runs) values.push_back(r.alpha_cache[i].value);
      rep.alpha_cache[i] = sample_estimate(values);
    }
  }
  return rep;
}

// Per-cycle policy of the fractional-threshold run: after each eviction the
// next cycle runs one of the two integer policies end to end.
struct CyclePolicy {
  long k_low = 0, k_high = 0;
  double draw_high = 0.0;  // length-adjusted per-cycle probability
};

CounterTrace run_counter(double lambda, double mu, int insert_threshold,
                         int evict_threshold, const SimConfig& cfg,
                         std::uint64_t rep_index,
                         const CyclePolicy* policy = nullptr) {
  std::mt19937_64 arrivals = make_stream(cfg.seed, rep_index, 1);
  std::mt19937_64 ticks = make_stream(cfg.seed, rep_index, 2);
  std::mt19937_64 cycle_draws = make_stream(cfg.seed, rep_index, 3);
  std::exponential_distribution<double> exp_arrival(lambda);
  std::exponential_distribution<double> exp_tick(mu);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  long k = insert_threshold;
  long kh = evict_threshold;
  if (policy) {
    k = unif(cycle_draws) < policy->draw_high ? policy->k_high
                                              : policy->k_low;
    kh = k;
  }

  CounterTrace tr;
  double t = 0.0;
  long counter = 0;
  bool cached = false;
  double next_arrival = exp_arrival(arrivals);
  double next_tick = exp_tick(ticks);
  const bool by_time = cfg.horizon > 0.0;

  while (true) {
    const double next = std::min(next_arrival, next_tick);
    if (by_time && next > cfg.horizon) break;
    if (!by_time && tr.events >= cfg.max_events) break;
    t = next;
    ++tr.events;
    if (next_arrival <= next_tick) {
      ++counter;
      if (!cached && counter == k + 1) {
        cached = true;
        tr.open_at_end = true;
        tr.open_start = t;
      }
      next_arrival = t + exp_arrival(arrivals);
    } else {
      if (counter > 0) {
        --counter;
        if (cached && counter == kh) {
          cached = false;
          tr.intervals.emplace_back(tr.open_start, t);
          tr.open_at_end = false;
          if (policy) {
            k = unif(cycle_draws) < policy->draw_high ? policy->k_high
                                                      : policy->k_low;
            kh = k;
            counter = k;  // next cycle starts from its own eviction state
          }
        }
      }
      next_tick = t + exp_tick(ticks);
    }
  }
  tr.end_time = by_time ? cfg.horizon : t;
  return tr;
}

}  // namespace

SimReport simulate_counter(const HysteresisParams& params,
                           const SimConfig& cfg) {
  check_config(cfg);
  if (!(params.lambda > 0.0) || !(params.mu > 0.0))
    throw std::domain_error("counter rates must be positive");
  if (params.evict_threshold < 0 ||
      params.evict_threshold > params.insert_threshold)
    throw std::domain_error("thresholds must satisfy 0 <= K_h <= K");

  std::vector<SimReport> runs;
  for (int r = 0; r < cfg.replications; ++r)
    runs.push_back(trace_report(
        run_counter(params.lambda, params.mu, params.insert_threshold,
                    params.evict_threshold, cfg, r),
        cfg));
  return merge_replications(runs);
}

SimReport simulate_counter(const CounterParams& params, const SimConfig& cfg) {
  const ThresholdMix mix = randomized_threshold(params.threshold);
  if (mix.weight_high == 0.0) {
    HysteresisParams p;
    p.lambda = params.lambda;
    p.mu = params.mu;
    p.insert_threshold = static_cast<int>(mix.k_low);
    p.evict_threshold = static_cast<int>(mix.k_low);
    return simulate_counter(p, cfg);
  }
  return simulate_fractional_threshold(params.threshold, params.lambda,
                                       params.mu, cfg);
}

SimReport simulate_fractional_threshold(double k_real, double lambda,
                                        double mu, const SimConfig& cfg) {
  check_config(cfg);
  const ThresholdMix mix = randomized_threshold(k_real);
  CyclePolicy policy;
  policy.k_low = mix.k_low;
  policy.k_high = mix.k_high;
  if (mix.weight_high == 0.0) {
    policy.draw_high = 0.0;
  } else {
    // Mean cycle length 1/gamma per integer policy; the draw probability is
    // tilted so the time fraction under the high policy equals the weight.
    const double cycle_low = 1.0 / replacement_rate(CounterParams{
                                       lambda, mu,
                                       static_cast<double>(mix.k_low)});
    const double cycle_high = 1.0 / replacement_rate(CounterParams{
                                        lambda, mu,
                                        static_cast<double>(mix.k_high)});
    const double w = mix.weight_high;
    policy.draw_high =
        w * cycle_low / (w * cycle_low + (1.0 - w) * cycle_high);
  }

  std::vector<SimReport> runs;
  for (int r = 0; r < cfg.replications; ++r)
    runs.push_back(trace_report(
        run_counter(lambda, mu, static_cast<int>(mix.k_low),
                    static_cast<int>(mix.k_low), cfg, r, &policy),
        cfg));
  return merge_replications(runs);
}

namespace {

struct NetworkEvent {
  double time;
  int kind;  // 0 exo arrival, 1 tick, 2 service completion
  int cache;
  int file;
  std::uint64_t seq;
};

struct EventLater {
  bool operator()(const NetworkEvent& a, const NetworkEvent& b) const {
    return a.time > b.time || (a.time == b.time && a.seq > b.seq);
  }
};

struct LiveCounter {
  bool active = false;  // has a provisioned counter
  bool pinned = false;
  double mu = 0.0;
  long threshold = 0;
  long counter = 0;
  bool cached = false;
};

SimReport run_network(const CacheNetwork& net,
                      const AvailabilityProfile& profile, const SimConfig& cfg,
                      const NetworkSimOptions& opt, std::uint64_t rep_index) {
  const int caches = net.caches;
  const int files = net.files;
  const Eigen::MatrixXd routing = routing_matrix(net);

  std::vector<std::vector<std::mt19937_64>> arrival_rng(caches);
  std::vector<std::vector<std::mt19937_64>> tick_rng(caches);
  std::vector<std::mt19937_64> route_rng, avail_rng, service_rng;
  for (int i = 0; i < caches; ++i) {
    for (int f = 0; f < files; ++f) {
      arrival_rng[i].push_back(make_stream(cfg.seed, rep_index, 10, i, f));
      tick_rng[i].push_back(make_stream(cfg.seed, rep_index, 11, i, f));
    }
    route_rng.push_back(make_stream(cfg.seed, rep_index, 12, i));
    avail_rng.push_back(make_stream(cfg.seed, rep_index, 13, i));
    service_rng.push_back(make_stream(cfg.seed, rep_index, 14, i));
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  std::vector<std::vector<LiveCounter>> counters(
      caches, std::vector<LiveCounter>(files));
  if (opt.mode == AvailabilityMode::Live) {
    for (const CounterAssignment& a : opt.counters) {
      LiveCounter& c = counters[a.cache][a.file];
      if (a.pinned) {
        c.pinned = true;
        c.cached = true;
      } else {
        c.active = true;
        c.mu = a.mu;
        c.threshold = std::lround(a.threshold);
      }
    }
  }

  std::priority_queue<NetworkEvent, std::vector<NetworkEvent>, EventLater>
      events;
  std::uint64_t seq = 0;
  const auto push = [&](double time, int kind, int cache, int file) {
    events.push({time, kind, cache, file, seq++});
  };

  for (int i = 0; i < caches; ++i)
    for (int f = 0; f < files; ++f) {
      if (net.demand(i, f) > 0.0) {
        std::exponential_distribution<double> d(net.demand(i, f));
        push(d(arrival_rng[i][f]), 0, i, f);
      }
      if (opt.mode == AvailabilityMode::Live && counters[i][f].active) {
        std::exponential_distribution<double> d(counters[i][f].mu);
        push(d(tick_rng[i][f]), 1, i, f);
      }
    }

  const double warm = cfg.warmup_fraction * cfg.horizon;
  const double width = (cfg.horizon - warm) / cfg.batches;
  std::vector<std::vector<double>> arrivals_in_batch(
      caches, std::vector<double>(cfg.batches, 0.0));
  const auto record_arrival = [&](int i, double t) {
    if (t < warm) return;
    const int b =
        std::min(cfg.batches - 1, static_cast<int>((t - warm) / width));
    arrivals_in_batch[i][b] += 1.0;
  };

  std::vector<std::deque<int>> queue(caches);
  std::vector<char> server_busy(caches, 0);
  SimReport rep;
  std::uint64_t event_count = 0;

  const auto begin_service = [&](int i, double t) {
    if (server_busy[i] || queue[i].empty()) return;
    server_busy[i] = 1;
    std::exponential_distribution<double> d(net.service_rate[i]);
    push(t + d(service_rng[i]), 2, i, -1);
  };

  // A visit either absorbs (hit) or misses; instantaneous-service misses
  // keep walking in the same instant.
  const auto visit = [&](int start_cache, int file, double t) {
    int i = start_cache;
    for (long hop = 0; hop < 1000000; ++hop) {
      record_arrival(i, t);
      bool hit;
      if (opt.mode == AvailabilityMode::Frozen) {
        hit = unif(avail_rng[i]) < profile.pi(i, file);
      } else {
        LiveCounter& c = counters[i][file];
        if (c.pinned) {
          hit = true;
        } else if (c.active) {
          ++c.counter;
          if (!c.cached && c.counter == c.threshold + 1) c.cached = true;
          hit = c.cached;
        } else {
          hit = false;
        }
      }
      if (hit) return;
      if (std::isfinite(net.service_rate[i])) {
        queue[i].push_back(file);
        if (static_cast<double>(queue[i].size()) > opt.queue_threshold)
          rep.empirically_unstable = true;
        begin_service(i, t);
        return;
      }
      const int degree = net.adjacency.row(i).sum();
      if (degree == 0) {
        rep.empirically_unstable = true;  // stranded request
        return;
      }
      int pick = static_cast<int>(unif(route_rng[i]) * degree);
      pick = std::min(pick, degree - 1);
      for (int w = 0; w < caches; ++w)
        if (net.adjacency(i, w) && pick-- == 0) {
          i = w;
          break;
        }
    }
    rep.empirically_unstable = true;
  };

  while (!events.empty()) {
    const NetworkEvent ev = events.top();
    if (ev.time > cfg.horizon) break;
    events.pop();
    ++event_count;
    switch (ev.kind) {
      case 0: {
        std::exponential_distribution<double> d(net.demand(ev.cache, ev.file));
        push(ev.time + d(arrival_rng[ev.cache][ev.file]), 0, ev.cache,
             ev.file);
        visit(ev.cache, ev.file, ev.time);
        break;
      }
      case 1: {
        LiveCounter& c = counters[ev.cache][ev.file];
        if (c.counter > 0) {
          --c.counter;
          if (c.cached && c.counter == c.threshold) c.cached = false;
        }
        std::exponential_distribution<double> d(c.mu);
        push(ev.time + d(tick_rng[ev.cache][ev.file]), 1, ev.cache, ev.file);
        break;
      }
      case 2: {
        server_busy[ev.cache] = 0;
        const int file = queue[ev.cache].front();
        queue[ev.cache].pop_front();
        const int degree = net.adjacency.row(ev.cache).sum();
        if (degree == 0) {
          rep.empirically_unstable = true;
          break;
        }
        int pick = static_cast<int>(unif(route_rng[ev.cache]) * degree);
        pick = std::min(pick, degree - 1);
        for (int w = 0; w < caches; ++w)
          if (net.adjacency(ev.cache, w) && pick-- == 0) {
            visit(w, file, ev.time);
            break;
          }
        begin_service(ev.cache, ev.time);
        break;
      }
    }
  }

  rep.events = event_count;
  rep.sim_time = cfg.horizon;
  rep.alpha_cache.resize(caches);
  for (int i = 0; i < caches; ++i) {
    std::vector<double> rates(cfg.batches);
    for (int b = 0; b < cfg.batches; ++b)
      rates[b] = arrivals_in_batch[i][b] / width;
    rep.alpha_cache[i] = batch_estimate(rates);
  }
  return rep;
}

}  // namespace

SimReport simulate_network(const CacheNetwork& net,
                           const AvailabilityProfile& profile,
                           const SimConfig& cfg,
                           const NetworkSimOptions& options) {
  check_config(cfg);
  if (!(cfg.horizon > 0.0))
    throw std::domain_error("network simulation needs a time horizon");
  if (profile.pi.rows() != net.caches || profile.pi.cols() != net.files)
    throw std::domain_error("availability matrix has wrong shape");

  std::vector<SimReport> runs;
  for (int r = 0; r < cfg.replications; ++r)
    runs.push_back(run_network(net, profile, cfg, options, r));
  return merge_replications(runs);
}

}  // namespace rcnet
