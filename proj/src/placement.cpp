#include "rcnet/placement.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>

#include "rcnet/errors.hpp"

namespace rcnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCapacityEps = 1e-9;

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

// Flows of one file under a binary storage set.
struct ColumnFlow {
  bool feasible = false;
  Eigen::VectorXd miss;  // control-plane (miss) rate per cache
  Eigen::VectorXd full;  // every arrival per cache, hits included
};

ColumnFlow solve_column(const CacheNetwork& net, const Eigen::MatrixXd& routing,
                        int file, unsigned mask) {
  const int c = net.caches;
  ColumnFlow out;
  out.miss = Eigen::VectorXd::Zero(c);
  out.full = net.demand.col(file);

  const auto stored = [&](int i) { return (mask >> i) & 1u; };

  // Miss flow reaches the out-neighbourhood closure of uncovered demand.
  std::vector<char> reach(c, 0);
  std::vector<int> queue;
  for (int i = 0; i < c; ++i)
    if (!stored(i) && net.demand(i, file) > 0.0) {
      reach[i] = 1;
      queue.push_back(i);
    }
  while (!queue.empty()) {
    const int u = queue.back();
    queue.pop_back();
    for (int w = 0; w < c; ++w)
      if (net.adjacency(u, w) && !stored(w) && !reach[w]) {
        reach[w] = 1;
        queue.push_back(w);
      }
  }

  // Every flow-carrying cache must be able to reach storage.
  std::vector<char> good(c, 0);
  for (int i = 0; i < c; ++i) good[i] = stored(i);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int u = 0; u < c; ++u) {
      if (good[u]) continue;
      for (int w = 0; w < c; ++w)
        if (net.adjacency(u, w) && good[w]) {
          good[u] = 1;
          changed = true;
          break;
        }
    }
  }
  std::vector<int> active;
  for (int i = 0; i < c; ++i)
    if (reach[i]) {
      if (!good[i]) return out;  // stranded requests, no finite flow
      active.push_back(i);
    }

  const int m = static_cast<int>(active.size());
  if (m > 0) {
    // miss_u = lambda_u + sum_k p_ku miss_k over the active set.
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd rhs(m);
    for (int r = 0; r < m; ++r) {
      rhs[r] = net.demand(active[r], file);
      for (int k = 0; k < m; ++k) a(r, k) -= routing(active[k], active[r]);
    }
    const Eigen::VectorXd x = a.partialPivLu().solve(rhs);
    if (!x.allFinite()) return out;
    for (int r = 0; r < m; ++r) out.miss[active[r]] = x[r];
    for (int i = 0; i < c; ++i) {
      double in = 0.0;
      for (int r = 0; r < m; ++r) in += routing(active[r], i) * x[r];
      out.full[i] += in;
    }
  }
  out.feasible = true;
  return out;
}

bool totals_stable(const CacheNetwork& net, const Eigen::VectorXd& totals,
                   FlowMode mode) {
  for (int i = 0; i < net.caches; ++i) {
    const double eta = net.service_rate[i];
    if (!std::isfinite(eta)) continue;
    if (mode == FlowMode::VerbatimFlow) {
      if (!(eta > totals[i])) return false;
    } else {
      if (totals[i] > eta + kCapacityEps * (1.0 + eta)) return false;
    }
  }
  return true;
}

struct ColumnCandidate {
  unsigned mask;
  double cost;
  Eigen::VectorXd alpha;  // per-cache contribution under the chosen mode
};

// All feasible storage subsets of one file, cheapest first.
std::vector<ColumnCandidate> column_candidates(const CacheNetwork& net,
                                               const Eigen::MatrixXd& routing,
                                               int file, FlowMode mode) {
  std::vector<ColumnCandidate> cols;
  const unsigned top = 1u << net.caches;
  for (unsigned mask = 1; mask < top; ++mask) {
    const ColumnFlow flow = solve_column(net, routing, file, mask);
    if (!flow.feasible) continue;
    ColumnCandidate cand;
    cand.mask = mask;
    cand.alpha = mode == FlowMode::MiqcpFlow ? flow.miss : flow.full;
    cand.cost = cand.alpha.sum();
    cols.push_back(std::move(cand));
  }
  std::stable_sort(cols.begin(), cols.end(),
                   [](const ColumnCandidate& a, const ColumnCandidate& b) {
                     return a.cost < b.cost ||
                            (a.cost == b.cost && a.mask < b.mask);
                   });
  return cols;
}

bool lex_less(const Eigen::MatrixXi& a, const Eigen::MatrixXi& b) {
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (a(i, j) != b(i, j)) return a(i, j) < b(i, j);
  return false;
}

Eigen::MatrixXi masks_to_matrix(const std::vector<unsigned>& masks,
                                int caches) {
  Eigen::MatrixXi a(caches, static_cast<int>(masks.size()));
  for (int f = 0; f < a.cols(); ++f)
    for (int i = 0; i < caches; ++i) a(i, f) = (masks[f] >> i) & 1u;
  return a;
}

struct SearchState {
  const CacheNetwork* net;
  FlowMode mode;
  std::vector<std::vector<ColumnCandidate>> columns;
  std::vector<double> suffix_min;
  bool feasibility_only = false;

  bool found = false;
  double best_cost = kInf;
  Eigen::MatrixXi best;
  std::uint64_t nodes = 0;

  std::vector<unsigned> chosen;
  Eigen::VectorXd used;
  Eigen::VectorXd totals;

  void dfs(int file) {
    ++nodes;
    const int files = static_cast<int>(columns.size());
    if (file == files) {
      if (!totals_stable(*net, totals, mode)) return;
      double cost = totals.sum();
      if (!found || cost < best_cost - 1e-9 * (1.0 + std::abs(best_cost))) {
        found = true;
        best_cost = cost;
        best = masks_to_matrix(chosen, net->caches);
      } else if (cost <= best_cost + 1e-9 * (1.0 + std::abs(best_cost))) {
        const Eigen::MatrixXi cand = masks_to_matrix(chosen, net->caches);
        if (lex_less(cand, best)) best = cand;
      }
      return;
    }
    const double partial = totals.sum();
    for (const ColumnCandidate& col : columns[file]) {
      if (found && !feasibility_only &&
          partial + col.cost + suffix_min[file + 1] >
              best_cost + 1e-9 * (1.0 + std::abs(best_cost)))
        break;  // columns are sorted by cost
      bool fits = true;
      for (int i = 0; i < net->caches && fits; ++i)
        if ((col.mask >> i) & 1u)
          fits = used[i] + net->file_size[file] <=
                 net->storage[i] + kCapacityEps * (1.0 + net->storage[i]);
      if (!fits) continue;
      // Totals only grow with further files, so a partial overload is final.
      bool overload = false;
      for (int i = 0; i < net->caches && !overload; ++i) {
        const double eta = net->service_rate[i];
        if (!std::isfinite(eta)) continue;
        const double next = totals[i] + col.alpha[i];
        overload = mode == FlowMode::VerbatimFlow
                       ? !(eta > next)
                       : next > eta + kCapacityEps * (1.0 + eta);
      }
      if (overload) continue;
      for (int i = 0; i < net->caches; ++i) {
        if ((col.mask >> i) & 1u) used[i] += net->file_size[file];
        totals[i] += col.alpha[i];
      }
      chosen.push_back(col.mask);
      dfs(file + 1);
      chosen.pop_back();
      for (int i = 0; i < net->caches; ++i) {
        if ((col.mask >> i) & 1u) used[i] -= net->file_size[file];
        totals[i] -= col.alpha[i];
      }
      if (feasibility_only && found) return;
    }
  }
};

SearchState run_search(const CacheNetwork& net, FlowMode mode,
                       bool feasibility_only) {
  if (net.caches > 20)
    throw std::domain_error("exact placement search limited to 20 caches");
  const Eigen::MatrixXd routing = routing_matrix(net);

  SearchState st;
  st.net = &net;
  st.mode = mode;
  st.feasibility_only = feasibility_only;
  st.columns.resize(net.files);
  st.suffix_min.assign(net.files + 1, 0.0);
  for (int f = 0; f < net.files; ++f) {
    st.columns[f] = column_candidates(net, routing, f, mode);
    if (st.columns[f].empty()) return st;  // no way to serve this file
  }
  for (int f = net.files - 1; f >= 0; --f)
    st.suffix_min[f] = st.suffix_min[f + 1] + st.columns[f].front().cost;
  st.used = Eigen::VectorXd::Zero(net.caches);
  st.totals = Eigen::VectorXd::Zero(net.caches);
  st.dfs(0);
  return st;
}

}  // namespace

PlacementEvaluation evaluate_placement(const CacheNetwork& net,
                                       const Eigen::MatrixXi& placement,
                                       FlowMode mode) {
  if (placement.rows() != net.caches || placement.cols() != net.files)
    throw std::domain_error("placement matrix has wrong shape");
  for (int i = 0; i < net.caches; ++i)
    for (int f = 0; f < net.files; ++f)
      if (placement(i, f) != 0 && placement(i, f) != 1)
        throw std::domain_error("placement entries must be 0/1");

  PlacementEvaluation out;
  out.alpha = Eigen::MatrixXd::Zero(net.caches, net.files);
  out.objective = std::numeric_limits<double>::quiet_NaN();

  for (int f = 0; f < net.files; ++f)
    if (placement.col(f).sum() < 1) {
      out.violated = "coverage";
      return out;
    }
  for (int i = 0; i < net.caches; ++i) {
    double used = 0.0;
    for (int f = 0; f < net.files; ++f)
      if (placement(i, f)) used += net.file_size[f];
    if (used > net.storage[i] + kCapacityEps * (1.0 + net.storage[i])) {
      out.violated = "capacity";
      return out;
    }
  }

  const Eigen::MatrixXd routing = routing_matrix(net);
  for (int f = 0; f < net.files; ++f) {
    unsigned mask = 0;
    for (int i = 0; i < net.caches; ++i)
      if (placement(i, f)) mask |= 1u << i;
    const ColumnFlow flow = solve_column(net, routing, f, mask);
    if (!flow.feasible) {
      out.violated = "stability";
      out.alpha.setZero();
      return out;
    }
    out.alpha.col(f) = mode == FlowMode::MiqcpFlow ? flow.miss : flow.full;
  }
  out.objective = out.alpha.sum();
  if (!totals_stable(net, out.alpha.rowwise().sum(), mode)) {
    out.violated = "stability";
    return out;
  }
  out.feasible = true;
  return out;
}

ExactSolution solve_exact(const CacheNetwork& net, FlowMode mode) {
  const SearchState st = run_search(net, mode, false);
  ExactSolution sol;
  sol.nodes = st.nodes;
  sol.feasible = st.found;
  if (st.found) {
    sol.placement = st.best;
    sol.objective = st.best_cost;
  }
  return sol;
}

bool exists_feasible_placement(const CacheNetwork& net, FlowMode mode) {
  return run_search(net, mode, true).found;
}

std::string export_miqcp(const CacheNetwork& net) {
  const Eigen::MatrixXd routing = routing_matrix(net);
  std::string s;
  s += "\\ PlacementProblem: minimize control-plane load over binary "
       "placements\n";
  s += "\\ caches=" + std::to_string(net.caches) +
       " files=" + std::to_string(net.files) + "\n";
  s += "Minimize\n obj:";
  bool first = true;
  for (int i = 1; i <= net.caches; ++i)
    for (int j = 1; j <= net.files; ++j) {
      s += first ? " " : " + ";
      s += "alpha_" + std::to_string(i) + "_" + std::to_string(j);
      first = false;
    }
  s += "\nSubject To\n";
  for (int j = 1; j <= net.files; ++j) {
    s += " cover_" + std::to_string(j) + ":";
    for (int i = 1; i <= net.caches; ++i) {
      if (i > 1) s += " +";
      s += " A_" + std::to_string(i) + "_" + std::to_string(j);
    }
    s += " >= 1\n";
  }
  for (int i = 1; i <= net.caches; ++i) {
    s += " cap_" + std::to_string(i) + ":";
    for (int j = 1; j <= net.files; ++j) {
      if (j > 1) s += " +";
      s += " " + format_number(net.file_size[j - 1]) + " A_" +
           std::to_string(i) + "_" + std::to_string(j);
    }
    s += " <= " + format_number(net.storage[i - 1]) + "\n";
  }
  for (int i = 1; i <= net.caches; ++i) {
    if (!std::isfinite(net.service_rate[i - 1])) {
      s += "\\ serv_" + std::to_string(i) +
           ": service capacity unbounded\n";
      continue;
    }
    s += " serv_" + std::to_string(i) + ":";
    for (int j = 1; j <= net.files; ++j) {
      if (j > 1) s += " +";
      s += " alpha_" + std::to_string(i) + "_" + std::to_string(j);
    }
    s += " <= " + format_number(net.service_rate[i - 1]) + "\n";
  }
  // Flow balance with q_ki(j) = p_ki (1 - A_ij):
  // alpha_ij + lambda_ij A_ij - sum_k p_ki alpha_kj
  //          + [ sum_k p_ki A_ij*alpha_kj ] = lambda_ij
  for (int i = 1; i <= net.caches; ++i) {
    for (int j = 1; j <= net.files; ++j) {
      const double lambda = net.demand(i - 1, j - 1);
      const std::string aij =
          "A_" + std::to_string(i) + "_" + std::to_string(j);
      s += " flow_" + std::to_string(i) + "_" + std::to_string(j) +
           ": alpha_" + std::to_string(i) + "_" + std::to_string(j);
      if (lambda != 0.0) s += " + " + format_number(lambda) + " " + aij;
      std::string quad;
      for (int k = 1; k <= net.caches; ++k) {
        const double p = routing(k - 1, i - 1);
        if (p == 0.0) continue;
        const std::string akj =
            "alpha_" + std::to_string(k) + "_" + std::to_string(j);
        s += " - " + format_number(p) + " " + akj;
        if (!quad.empty()) quad += " + ";
        quad += format_number(p) + " " + aij + " * " + akj;
      }
      if (!quad.empty()) s += " + [ " + quad + " ]";
      s += " = " + format_number(lambda) + "\n";
    }
  }
  s += "Bounds\n";
  for (int i = 1; i <= net.caches; ++i)
    for (int j = 1; j <= net.files; ++j)
      s += " 0 <= alpha_" + std::to_string(i) + "_" + std::to_string(j) + "\n";
  s += "Binary\n";
  for (int i = 1; i <= net.caches; ++i)
    for (int j = 1; j <= net.files; ++j)
      s += " A_" + std::to_string(i) + "_" + std::to_string(j) + "\n";
  s += "End\n";
  return s;
}

CacheNetwork reduce_knapsack(const KnapsackInstance& kp) {
  const int n = static_cast<int>(kp.weights.size());
  if (n == 0 || kp.values.size() != kp.weights.size())
    throw std::domain_error("knapsack instance needs matching weights/values");
  if (!(kp.capacity > 0.0))
    throw std::domain_error("knapsack capacity must be positive");
  for (int i = 0; i < n; ++i)
    if (!(kp.weights[i] > 0.0) || !(kp.values[i] > 0.0))
      throw std::domain_error("knapsack weights/values must be positive");

  CacheNetwork net;
  net.caches = 2;
  net.files = n;
  net.adjacency = Eigen::MatrixXi::Zero(2, 2);
  net.adjacency(0, 1) = 1;
  double total_weight = 0.0;
  for (double w : kp.weights) total_weight += w;
  net.storage = Eigen::Vector2d(kp.capacity, total_weight);
  net.service_rate = Eigen::Vector2d(kInf, kInf);
  net.file_size = Eigen::VectorXd(n);
  net.demand = Eigen::MatrixXd(2, n);
  for (int f = 0; f < n; ++f) {
    net.file_size[f] = kp.weights[f];
    net.demand(0, f) = kp.values[f];
    net.demand(1, f) = kp.values[f];
  }
  return net;
}

std::vector<CacheNetwork> reduce_partition(const PartitionInstance& pt) {
  const int n = static_cast<int>(pt.values.size());
  if (n == 0) throw std::domain_error("partition instance needs values");
  double total = 0.0;
  for (long v : pt.values) {
    if (v <= 0) throw std::domain_error("partition values must be positive");
    total += static_cast<double>(v);
  }
  std::vector<CacheNetwork> instances;
  for (int m = 0; m <= n; ++m) {
    CacheNetwork net;
    net.caches = 2;
    net.files = n;
    net.adjacency = Eigen::MatrixXi::Zero(2, 2);
    net.adjacency(0, 1) = 1;
    net.adjacency(1, 0) = 1;
    net.storage = Eigen::Vector2d(m, n - m);
    net.service_rate = Eigen::Vector2d(total / 2.0, total / 2.0);
    net.file_size = Eigen::VectorXd::Ones(n);
    net.demand = Eigen::MatrixXd(2, n);
    for (int f = 0; f < n; ++f) {
      net.demand(0, f) = static_cast<double>(pt.values[f]);
      net.demand(1, f) = static_cast<double>(pt.values[f]);
    }
    instances.push_back(std::move(net));
  }
  return instances;
}

double knapsack_brute_force(const KnapsackInstance& kp) {
  const int n = static_cast<int>(kp.weights.size());
  if (n > 25) throw std::domain_error("brute-force knapsack limited to 25");
  double best = 0.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    double weight = 0.0, value = 0.0;
    for (int i = 0; i < n; ++i)
      if ((mask >> i) & 1u) {
        weight += kp.weights[i];
        value += kp.values[i];
      }
    if (weight <= kp.capacity) best = std::max(best, value);
  }
  return best;
}

bool partition_brute_force(const PartitionInstance& pt) {
  long total = 0;
  for (long v : pt.values) total += v;
  if (total % 2 != 0) return false;
  const long half = total / 2;
  std::vector<char> reachable(half + 1, 0);
  reachable[0] = 1;
  for (long v : pt.values)
    for (long s = half; s >= v; --s)
      if (reachable[s - v]) reachable[s] = 1;
  return reachable[half] != 0;
}

bool KnapsackVerdict::agree() const {
  return std::abs(oracle_value - placed_value) < 1e-9;
}

namespace {

void enumerate_multisets(int n, int max_value, long min_value,
                         std::vector<long>& prefix,
                         const std::function<void(const std::vector<long>&)>& f) {
  if (n == 0) {
    f(prefix);
    return;
  }
  for (long v = min_value; v <= max_value; ++v) {
    prefix.push_back(v);
    enumerate_multisets(n - 1, max_value, v, prefix, f);
    prefix.pop_back();
  }
}

}  // namespace

ReductionReport verify_partition_reduction(int max_n, int max_value) {
  if (max_n < 1 || max_value < 1)
    throw std::domain_error("verification range must be positive");
  ReductionReport rep;
  for (int n = 1; n <= max_n; ++n) {
    std::vector<long> prefix;
    enumerate_multisets(n, max_value, 1, prefix, [&](const std::vector<long>& values) {
      PartitionInstance inst{values};
      PartitionVerdict v;
      v.values = values;
      v.partition_exists = partition_brute_force(inst);
      v.some_instance_feasible = false;
      for (const CacheNetwork& net : reduce_partition(inst))
        if (exists_feasible_placement(net, FlowMode::MiqcpFlow)) {
          v.some_instance_feasible = true;
          break;
        }
      rep.all_ok = rep.all_ok && v.agree();
      rep.partition.push_back(std::move(v));
      ++rep.instances_checked;
    });
  }
  return rep;
}

namespace {

KnapsackVerdict check_knapsack_instance(const KnapsackInstance& inst) {
  KnapsackVerdict v;
  v.instance = inst;
  v.oracle_value = knapsack_brute_force(inst);
  const ExactSolution sol = solve_exact(reduce_knapsack(inst),
                                        FlowMode::MiqcpFlow);
  v.placed_value = 0.0;
  if (sol.feasible)
    for (int f = 0; f < static_cast<int>(inst.values.size()); ++f)
      if (sol.placement(0, f)) v.placed_value += inst.values[f];
  return v;
}

}  // namespace

ReductionReport verify_knapsack_reduction(int max_n, int max_value,
                                          int random_instances,
                                          std::uint64_t seed) {
  if (max_n < 1 || max_value < 1)
    throw std::domain_error("verification range must be positive");
  ReductionReport rep;

  // Exhaustive for tiny sizes.
  const int small_cap = std::min(4, max_value);
  for (int n = 1; n <= std::min(2, max_n); ++n) {
    std::vector<int> digits(2 * n, 1);
    while (true) {
      KnapsackInstance inst;
      double total_weight = 0.0;
      for (int i = 0; i < n; ++i) {
        inst.weights.push_back(digits[2 * i]);
        inst.values.push_back(digits[2 * i + 1]);
        total_weight += digits[2 * i];
      }
      for (int c = 1; c <= static_cast<int>(total_weight); ++c) {
        inst.capacity = c;
        const KnapsackVerdict v = check_knapsack_instance(inst);
        rep.all_ok = rep.all_ok && v.agree();
        rep.knapsack.push_back(v);
        ++rep.instances_checked;
      }
      int pos = 2 * n - 1;
      while (pos >= 0 && digits[pos] == small_cap) digits[pos--] = 1;
      if (pos < 0) break;
      ++digits[pos];
    }
  }

  std::mt19937_64 rng(seed);
  for (int r = 0; r < random_instances; ++r) {
    const int n = 2 + static_cast<int>(rng() % std::max(1, max_n - 1));
    KnapsackInstance inst;
    double total_weight = 0.0;
    for (int i = 0; i < n; ++i) {
      inst.weights.push_back(1 + static_cast<int>(rng() % max_value));
      inst.values.push_back(1 + static_cast<int>(rng() % max_value));
      total_weight += inst.weights.back();
    }
    inst.capacity = 1 + static_cast<int>(rng() % static_cast<int>(total_weight));
    const KnapsackVerdict v = check_knapsack_instance(inst);
    rep.all_ok = rep.all_ok && v.agree();
    rep.knapsack.push_back(v);
    ++rep.instances_checked;
  }
  return rep;
}

}  // namespace rcnet
