// rcnet: analysis, optimization, placement and simulation of reinforced-
// counter caches and cache networks. Subcommands: analyze, optimize,
// hysteresis, network, placement, reduce, simulate.

#include <cstdio>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rcnet/counter.hpp"
#include "rcnet/errors.hpp"
#include "rcnet/hysteresis.hpp"
#include "rcnet/model_io.hpp"
#include "rcnet/network.hpp"
#include "rcnet/optimizer.hpp"
#include "rcnet/placement.hpp"
#include "rcnet/simulator.hpp"

using namespace rcnet;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerdict = 1;  // infeasible / unstable, output still valid
constexpr int kExitError = 2;

class Overrides {
 public:
  Overrides(const std::vector<std::string>& pairs, std::set<std::string> keys)
      : known_(std::move(keys)) {
    for (const std::string& kv : pairs) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw std::domain_error("--set expects key=value, got '" + kv + "'");
      const std::string key = kv.substr(0, eq);
      if (!known_.count(key))
        throw std::domain_error("unknown --set key '" + key + "'");
      values_[key] = kv.substr(eq + 1);
    }
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  double number(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    return std::stod(it->second);
  }

  double required_number(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end())
      throw std::domain_error("missing required --set " + key + "=...");
    return std::stod(it->second);
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  std::vector<double> number_list(const std::string& key) const {
    std::vector<double> out;
    const auto it = values_.find(key);
    if (it == values_.end()) return out;
    std::string item;
    std::istringstream ss(it->second);
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
  }

  void echo(const std::string& subcommand) const {
    std::string line = "# config: subcommand=" + subcommand;
    for (const auto& [k, v] : values_) line += " " + k + "=" + v;
    std::cout << line << "\n";
  }

 private:
  std::set<std::string> known_;
  std::map<std::string, std::string> values_;
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) return;
  write_text_file(path, text);
  std::cout << "# wrote " << path << "\n";
}

std::string csv_line(std::initializer_list<std::string> cells) {
  std::string line;
  for (const std::string& c : cells) {
    if (!line.empty()) line += ",";
    line += c;
  }
  return line + "\n";
}

int cmd_analyze(const Overrides& over, const std::string& out_path) {
  over.echo("analyze");
  CounterParams params{over.required_number("lambda"),
                       over.required_number("mu"), over.number("K", 0.0)};
  const SteadyState s = steady_state(params);
  std::string csv = "metric,value\n";
  csv += csv_line({"pi_up", format_g12(s.pi_up)});
  csv += csv_line({"rho", format_g12(s.rho)});
  csv += csv_line({"gamma", format_g12(s.gamma)});
  csv += csv_line({"mean_busy", format_g12(s.mean_busy)});
  csv += csv_line({"mean_return", format_g12(s.mean_return)});
  for (double r : over.number_list("r"))
    csv += csv_line({"tail_bound_r" + format_g12(r),
                     format_g12(markov_tail_bound(s.mean_return, r))});
  std::cout << csv;
  emit(out_path, csv);
  return kExitOk;
}

int cmd_optimize(const Overrides& over, const std::string& out_path,
                 const std::string& mode) {
  over.echo("optimize");
  const double pi_up = over.required_number("pi_up");
  const double lambda = over.required_number("lambda");
  CostWeights weights{over.number("alpha", 1.0), over.number("beta", 1.0),
                      over.number("K_max", 100.0)};

  if (mode == "sweep") {
    const double step = over.number("step", 0.1);
    std::string csv = "K,cost,gamma,mean_return\n";
    for (double k = 0.0; k <= weights.k_max + 1e-12; k += step) {
      const Provision p = provision_from_target({pi_up, lambda, k});
      csv += csv_line({format_g12(k),
                       format_g12(cost_objective(k, weights, pi_up, lambda)),
                       format_g12(p.gamma), format_g12(p.mean_return)});
    }
    std::cout << csv;
    emit(out_path, csv);
    return kExitOk;
  }

  double k_star;
  bool cap_active = false;
  if (over.has("R_star")) {
    const CappedOptimum capped = minimize_with_return_cap(
        weights, pi_up, lambda, over.required_number("R_star"));
    k_star = capped.k;
    cap_active = capped.cap_active;
  } else {
    k_star = minimize_cost(weights, pi_up, lambda).k_star;
  }
  const Provision at = provision_from_target({pi_up, lambda, k_star});
  std::string csv = "metric,value\n";
  csv += csv_line({"K_star", format_g12(k_star)});
  csv += csv_line(
      {"cost", format_g12(cost_objective(k_star, weights, pi_up, lambda))});
  csv += csv_line({"gamma", format_g12(at.gamma)});
  csv += csv_line({"mean_return", format_g12(at.mean_return)});
  csv += csv_line({"mu", format_g12(at.mu)});
  csv += csv_line({"cap_active", cap_active ? "1" : "0"});
  std::cout << csv;
  emit(out_path, csv);
  return kExitOk;
}

int cmd_hysteresis(const Overrides& over, const std::string& out_path) {
  over.echo("hysteresis");
  const double lambda = over.required_number("lambda");
  const int k = static_cast<int>(over.required_number("K"));

  std::vector<double> evict_list = over.number_list("K_h");
  if (evict_list.empty()) evict_list.push_back(k);

  // Either mu is given directly, or pi_up is held and mu retuned per K_h.
  const bool retune = over.has("pi_up");
  const double mu_fixed = retune ? 0.0 : over.required_number("mu");
  const double pi_target = retune ? over.required_number("pi_up") : 0.0;
  const double probe_t = over.number("t", 4.0);

  std::string csv =
      "K_h,mu,pi_up,gamma,mean_busy,mean_return,xi_printed,cv_B,cv_R,"
      "P_R_below_t\n";
  for (double kh_real : evict_list) {
    const int kh = static_cast<int>(kh_real);
    const double mu =
        retune ? retune_mu_for_target(pi_target, lambda, k, kh) : mu_fixed;
    const HysteresisParams p{lambda, mu, k, kh};
    const double busy = first_passage_mean_busy(p);
    const double ret = first_passage_mean_return(p);
    const std::vector<double> xi = paper_recursion_xi(p, k - kh + 1);
    csv += csv_line(
        {format_g12(kh), format_g12(mu), format_g12(stationary_occupancy(p)),
         format_g12(replacement_rate(p)), format_g12(busy), format_g12(ret),
         format_g12(xi.back()),
         format_g12(coefficient_of_variation(p, Sojourn::Busy)),
         format_g12(coefficient_of_variation(p, Sojourn::Return)),
         format_g12(sojourn_cdf(p, Sojourn::Return, {probe_t})[0])});
  }
  std::cout << csv;
  emit(out_path, csv);

  // Optional CDF grids alongside the metrics.
  if (over.has("grid_max") && !out_path.empty()) {
    const double grid_max = over.required_number("grid_max");
    const double grid_step = over.number("grid_step", grid_max / 200.0);
    std::vector<double> grid;
    for (double t = 0.0; t <= grid_max + 1e-12; t += grid_step)
      grid.push_back(t);
    for (double kh_real : evict_list) {
      const int kh = static_cast<int>(kh_real);
      const double mu =
          retune ? retune_mu_for_target(pi_target, lambda, k, kh) : mu_fixed;
      const HysteresisParams p{lambda, mu, k, kh};
      for (Sojourn which : {Sojourn::Return, Sojourn::Busy}) {
        const std::vector<double> cdf = sojourn_cdf(p, which, grid);
        std::string body = "t,P\n";
        for (std::size_t i = 0; i < grid.size(); ++i)
          body += csv_line({format_g12(grid[i]), format_g12(cdf[i])});
        const std::string suffix =
            std::string(which == Sojourn::Return ? "_cdf_R_Kh" : "_cdf_B_Kh") +
            std::to_string(kh) + ".csv";
        emit(out_path + suffix, body);
      }
    }
  }
  return kExitOk;
}

int cmd_network(const Overrides& over, const std::string& in_path,
                const std::string& out_path, const std::string& mode) {
  over.echo("network");
  if (in_path.empty()) throw std::domain_error("network needs --in FILE");
  const NetworkModel model = load_network(in_path);

  if (mode == "occupancy") {
    if (!model.has_availability)
      throw std::domain_error("occupancy mode needs an [availability] section");
    const OccupancyReport rep = expected_occupancy(
        model.availability, model.net,
        static_cast<std::uint64_t>(over.number("seed", 1.0)),
        static_cast<int>(over.number("draws", 1000000.0)));
    std::string csv = "cache,expected,overflow_probability,std_error,exact\n";
    for (int i = 0; i < model.net.caches; ++i)
      csv += csv_line({std::to_string(i + 1), format_g12(rep.expected[i]),
                       format_g12(rep.overflow_probability[i]),
                       format_g12(rep.std_error[i]), rep.exact ? "1" : "0"});
    std::cout << csv;
    emit(out_path, csv);
    return kExitOk;
  }

  if (mode == "provision") {
    if (!model.has_availability)
      throw std::domain_error("provision mode needs an [availability] section");
    ThresholdPolicy policy;
    if (over.text("policy", "fixed") == "optimize") {
      policy.kind = ThresholdPolicyKind::Optimize;
      policy.weights =
          CostWeights{over.number("alpha", 1.0), over.number("beta", 1.0),
                      over.number("K_max", 100.0)};
    } else {
      policy.kind = ThresholdPolicyKind::Fixed;
      policy.fixed_threshold = over.number("K", 0.0);
    }
    const std::vector<CounterAssignment> plan =
        provision_network(model.net, model.availability, policy);
    std::string csv = "cache,file,arrival_rate,mu,K,pinned\n";
    for (const CounterAssignment& a : plan)
      csv += csv_line({std::to_string(a.cache + 1), std::to_string(a.file + 1),
                       format_g12(a.arrival_rate), format_g12(a.mu),
                       format_g12(a.threshold), a.pinned ? "1" : "0"});
    std::cout << csv;
    emit(out_path, csv);
    return kExitOk;
  }

  if (mode != "solve") throw std::domain_error("unknown network mode " + mode);
  if (!model.has_availability)
    throw std::domain_error("solve mode needs an [availability] section");
  const FlowSolution sol = solve_flow(model.net, model.availability);
  const bool mm1 = over.number("mm1", 0.0) != 0.0;
  const ResponseTime rt = response_time(model.net, sol, mm1);
  std::string csv = "kind,cache,file,value\n";
  for (int i = 0; i < model.net.caches; ++i)
    for (int f = 0; f < model.net.files; ++f)
      csv += csv_line({"alpha", std::to_string(i + 1), std::to_string(f + 1),
                       format_g12(sol.alpha(i, f))});
  for (int i = 0; i < model.net.caches; ++i) {
    csv += csv_line({"alpha_cache", std::to_string(i + 1), "",
                     format_g12(sol.alpha_cache[i])});
    csv += csv_line(
        {"slack", std::to_string(i + 1), "", format_g12(sol.slack[i])});
  }
  csv += csv_line({"stable", "", "", sol.stable ? "1" : "0"});
  csv += csv_line({"EN", "", "", format_g12(rt.expected_requests)});
  csv += csv_line({"ET", "", "", format_g12(rt.mean_response_time)});
  std::cout << csv;
  emit(out_path, csv);
  return sol.stable ? kExitOk : kExitVerdict;
}

int cmd_placement(const Overrides& over, const std::string& in_path,
                  const std::string& out_path, const std::string& mode) {
  over.echo("placement");
  if (in_path.empty()) throw std::domain_error("placement needs --in FILE");
  const NetworkModel model = load_network(in_path);
  const FlowMode flow = over.text("flow", "verbatim") == "miqcp"
                            ? FlowMode::MiqcpFlow
                            : FlowMode::VerbatimFlow;

  if (mode == "export") {
    const std::string text = export_miqcp(model.net);
    std::cout << text;
    emit(out_path, text);
    return kExitOk;
  }

  if (mode == "evaluate") {
    if (!model.has_availability)
      throw std::domain_error(
          "evaluate mode reads the placement from [availability]");
    Eigen::MatrixXi a(model.net.caches, model.net.files);
    for (int i = 0; i < model.net.caches; ++i)
      for (int f = 0; f < model.net.files; ++f) {
        const double pi = model.availability.pi(i, f);
        if (pi != 0.0 && pi != 1.0)
          throw std::domain_error("evaluate mode needs a binary placement");
        a(i, f) = pi == 1.0 ? 1 : 0;
      }
    const PlacementEvaluation ev = evaluate_placement(model.net, a, flow);
    std::string csv = "metric,value\n";
    csv += csv_line({"feasible", ev.feasible ? "1" : "0"});
    csv += csv_line({"violated", ev.violated});
    csv += csv_line({"objective", format_g12(ev.objective)});
    std::cout << csv;
    emit(out_path, csv);
    return ev.feasible ? kExitOk : kExitVerdict;
  }

  if (mode != "exact")
    throw std::domain_error("unknown placement mode " + mode);
  const ExactSolution sol = solve_exact(model.net, flow);
  std::string csv = "kind,cache,file,value\n";
  csv += csv_line({"feasible", "", "", sol.feasible ? "1" : "0"});
  if (sol.feasible) {
    csv += csv_line({"objective", "", "", format_g12(sol.objective)});
    for (int i = 0; i < model.net.caches; ++i)
      for (int f = 0; f < model.net.files; ++f)
        csv += csv_line({"A", std::to_string(i + 1), std::to_string(f + 1),
                         std::to_string(sol.placement(i, f))});
  }
  std::cout << csv;
  emit(out_path, csv);
  return sol.feasible ? kExitOk : kExitVerdict;
}

int cmd_reduce(const Overrides& over, const std::string& in_path,
               const std::string& out_path, const std::string& mode) {
  over.echo("reduce");

  if (mode == "knapsack") {
    KnapsackInstance kp;
    if (!in_path.empty()) {
      kp = load_knapsack(in_path);
    } else {
      kp.capacity = over.required_number("capacity");
      kp.weights = over.number_list("weights");
      kp.values = over.number_list("values");
    }
    const CacheNetwork net = reduce_knapsack(kp);
    NetworkModel model;
    model.net = net;
    if (!out_path.empty()) emit(out_path, write_network(model));

    const ExactSolution sol = solve_exact(net, FlowMode::MiqcpFlow);
    double placed = 0.0;
    for (std::size_t f = 0; f < kp.values.size(); ++f)
      if (sol.feasible && sol.placement(0, static_cast<int>(f)))
        placed += kp.values[f];
    const double oracle = knapsack_brute_force(kp);
    std::string csv = "metric,value\n";
    csv += csv_line({"oracle_value", format_g12(oracle)});
    csv += csv_line({"placed_value", format_g12(placed)});
    csv += csv_line({"agree", std::abs(oracle - placed) < 1e-9 ? "1" : "0"});
    std::cout << csv;
    return std::abs(oracle - placed) < 1e-9 ? kExitOk : kExitVerdict;
  }

  if (mode == "partition") {
    PartitionInstance pt;
    if (!in_path.empty()) {
      pt = load_partition(in_path);
    } else {
      for (double v : over.number_list("values"))
        pt.values.push_back(static_cast<long>(v));
    }
    const std::vector<CacheNetwork> nets = reduce_partition(pt);
    if (!out_path.empty()) {
      for (std::size_t m = 0; m < nets.size(); ++m) {
        NetworkModel model;
        model.net = nets[m];
        emit(out_path + "_m" + std::to_string(m) + ".txt",
             write_network(model));
      }
    }
    const bool partition_yes = partition_brute_force(pt);
    bool any_feasible = false;
    std::string csv = "m,feasible\n";
    for (std::size_t m = 0; m < nets.size(); ++m) {
      const bool ok = exists_feasible_placement(nets[m], FlowMode::MiqcpFlow);
      any_feasible = any_feasible || ok;
      csv += csv_line({std::to_string(m), ok ? "1" : "0"});
    }
    csv += csv_line({"partition_exists", partition_yes ? "1" : "0"});
    csv += csv_line({"some_instance_feasible", any_feasible ? "1" : "0"});
    std::cout << csv;
    return partition_yes == any_feasible ? kExitOk : kExitVerdict;
  }

  if (mode != "verify") throw std::domain_error("unknown reduce mode " + mode);
  const int max_n = static_cast<int>(over.number("max_n", 6.0));
  const int max_value = static_cast<int>(over.number("max_value", 4.0));
  const ReductionReport part = verify_partition_reduction(max_n, max_value);
  const ReductionReport kp = verify_knapsack_reduction(
      static_cast<int>(over.number("knapsack_n", 10.0)),
      static_cast<int>(over.number("knapsack_value", 8.0)),
      static_cast<int>(over.number("random_instances", 100.0)),
      static_cast<std::uint64_t>(over.number("seed", 1.0)));
  std::string csv = "instance,partition_exists,some_instance_feasible\n";
  for (const PartitionVerdict& v : part.partition) {
    std::string vals;
    for (long x : v.values)
      vals += (vals.empty() ? "" : " ") + std::to_string(x);
    csv += csv_line({vals, v.partition_exists ? "1" : "0",
                     v.some_instance_feasible ? "1" : "0"});
  }
  std::cout << "# partition instances checked: " << part.instances_checked
            << "\n";
  std::cout << "# knapsack instances checked: " << kp.instances_checked
            << "\n";
  std::cout << "# all_ok: " << (part.all_ok && kp.all_ok ? "1" : "0") << "\n";
  emit(out_path, csv);
  return part.all_ok && kp.all_ok ? kExitOk : kExitVerdict;
}

int cmd_simulate(const Overrides& over, const std::string& in_path,
                 const std::string& out_path, const std::string& mode,
                 std::uint64_t seed) {
  over.echo("simulate");
  SimConfig cfg;
  cfg.seed = seed;
  cfg.horizon = over.number("horizon", 0.0);
  cfg.max_events =
      static_cast<std::uint64_t>(over.number("events", 1000000.0));
  cfg.warmup_fraction = over.number("warmup", 0.2);
  cfg.replications = static_cast<int>(over.number("replications", 1.0));

  const auto report_csv = [&](const SimReport& rep) {
    std::string csv = "metric,estimate,stderr\n";
    if (rep.alpha_cache.empty()) {
      csv += csv_line({"pi_up", format_g12(rep.pi_up.value),
                       format_g12(rep.pi_up.std_error)});
      csv += csv_line({"gamma", format_g12(rep.gamma.value),
                       format_g12(rep.gamma.std_error)});
      csv += csv_line({"mean_busy", format_g12(rep.mean_busy.value),
                       format_g12(rep.mean_busy.std_error)});
      csv += csv_line({"mean_return", format_g12(rep.mean_return.value),
                       format_g12(rep.mean_return.std_error)});
    }
    for (std::size_t i = 0; i < rep.alpha_cache.size(); ++i)
      csv += csv_line({"alpha_cache_" + std::to_string(i + 1),
                       format_g12(rep.alpha_cache[i].value),
                       format_g12(rep.alpha_cache[i].std_error)});
    csv += csv_line({"events", std::to_string(rep.events), "0"});
    csv += csv_line(
        {"empirically_unstable", rep.empirically_unstable ? "1" : "0", "0"});
    return csv;
  };

  if (mode == "counter") {
    HysteresisParams p;
    p.lambda = over.required_number("lambda");
    p.mu = over.required_number("mu");
    p.insert_threshold = static_cast<int>(over.number("K", 0.0));
    p.evict_threshold =
        static_cast<int>(over.number("K_h", p.insert_threshold));
    const SimReport rep = simulate_counter(p, cfg);
    const std::string csv = report_csv(rep);
    std::cout << csv;
    emit(out_path, csv);
    if (!out_path.empty()) {
      std::string samples = "kind,value\n";
      for (double b : rep.busy_samples)
        samples += csv_line({"B", format_g12(b)});
      for (double r : rep.return_samples)
        samples += csv_line({"R", format_g12(r)});
      emit(out_path + "_samples.csv", samples);
    }
    return kExitOk;
  }

  if (mode == "fractional") {
    const SimReport rep = simulate_fractional_threshold(
        over.required_number("K_real"), over.required_number("lambda"),
        over.required_number("mu"), cfg);
    const std::string csv = report_csv(rep);
    std::cout << csv;
    emit(out_path, csv);
    return kExitOk;
  }

  if (mode != "network")
    throw std::domain_error("unknown simulate mode " + mode);
  if (in_path.empty()) throw std::domain_error("simulate network needs --in");
  const NetworkModel model = load_network(in_path);
  if (!model.has_availability)
    throw std::domain_error("network simulation needs [availability]");
  if (cfg.horizon <= 0.0)
    throw std::domain_error("network simulation needs --set horizon=T");

  NetworkSimOptions opt;
  opt.queue_threshold = over.number("queue_threshold", 1000.0);
  if (over.text("availability", "frozen") == "live") {
    opt.mode = AvailabilityMode::Live;
    ThresholdPolicy policy;
    policy.kind = ThresholdPolicyKind::Fixed;
    policy.fixed_threshold = over.number("K", 0.0);
    opt.counters = provision_network(model.net, model.availability, policy);
  }
  const SimReport rep =
      simulate_network(model.net, model.availability, cfg, opt);
  const std::string csv = report_csv(rep);
  std::cout << csv;
  emit(out_path, csv);
  return rep.empirically_unstable ? kExitVerdict : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reinforced-counter cache models and cache-network tools"};
  app.require_subcommand(1);

  std::string in_path, out_path, mode;
  std::uint64_t seed = 1;
  std::vector<std::string> sets;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--in", in_path, "input model file");
    cmd->add_option("--out", out_path, "output CSV path");
    cmd->add_option("--seed", seed, "random seed");
    cmd->add_option("--mode", mode, "subcommand mode");
    cmd->add_option("--set", sets, "key=value override (repeatable)");
  };

  CLI::App* analyze = app.add_subcommand("analyze", "single-counter metrics");
  CLI::App* optimize = app.add_subcommand("optimize", "tune K at fixed pi_up");
  CLI::App* hysteresis =
      app.add_subcommand("hysteresis", "two-threshold counter metrics");
  CLI::App* network = app.add_subcommand("network", "flow balance and sizing");
  CLI::App* placement =
      app.add_subcommand("placement", "static placement tools");
  CLI::App* reduce = app.add_subcommand("reduce", "hardness reductions");
  CLI::App* simulate = app.add_subcommand("simulate", "discrete-event runs");
  for (CLI::App* cmd :
       {analyze, optimize, hysteresis, network, placement, reduce, simulate})
    add_common(cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed())
      return cmd_analyze(Overrides(sets, {"lambda", "mu", "K", "r"}),
                         out_path);
    if (optimize->parsed())
      return cmd_optimize(
          Overrides(sets, {"alpha", "beta", "pi_up", "lambda", "K_max",
                           "R_star", "step"}),
          out_path, mode.empty() ? "point" : mode);
    if (hysteresis->parsed())
      return cmd_hysteresis(
          Overrides(sets, {"lambda", "mu", "pi_up", "K", "K_h", "t",
                           "grid_max", "grid_step"}),
          out_path);
    if (network->parsed())
      return cmd_network(
          Overrides(sets, {"seed", "draws", "policy", "alpha", "beta",
                           "K_max", "K", "mm1"}),
          in_path, out_path, mode.empty() ? "solve" : mode);
    if (placement->parsed())
      return cmd_placement(Overrides(sets, {"flow"}), in_path, out_path,
                           mode.empty() ? "evaluate" : mode);
    if (reduce->parsed())
      return cmd_reduce(
          Overrides(sets, {"capacity", "weights", "values", "max_n",
                           "max_value", "knapsack_n", "knapsack_value",
                           "random_instances", "seed"}),
          in_path, out_path, mode.empty() ? "verify" : mode);
    if (simulate->parsed())
      return cmd_simulate(
          Overrides(sets, {"lambda", "mu", "K", "K_h", "K_real", "horizon",
                           "events", "warmup", "replications", "availability",
                           "queue_threshold"}),
          in_path, out_path, mode.empty() ? "counter" : mode, seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
