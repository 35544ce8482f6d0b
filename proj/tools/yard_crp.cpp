// yard_crp: command-line front end for the relocation solver and experiments.
#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "yardcrp/bounds.hpp"
#include "yardcrp/experiments.hpp"
#include "yardcrp/instance_io.hpp"
#include "yardcrp/solver.hpp"
#include "yardcrp/transforms.hpp"

using namespace yardcrp;

namespace {

enum Exit { kOk = 0, kError = 1, kTimeout = 2, kInfeasible = 3 };

struct Overrides {
  std::optional<int> m;
  std::optional<std::string> w_rel, w_ret, w_stack;
  std::string delta = "auto";

  void add_to(CLI::App& app) {
    app.add_option("--m", m, "Flexibility: out-of-order retrievals allowed per container")->check(CLI::NonNegativeNumber);
    app.add_option("--w-rel", w_rel, "Relocation weight (integer or p/q)");
    app.add_option("--w-ret", w_ret, "Retrieval delay weight");
    app.add_option("--w-stack", w_stack, "Stacking delay weight");
    app.add_option("--delta", delta, "Retrieval slack for every truck: INT or auto");
  }

  void apply(Instance& inst) const {
    if (m) inst.flexibility = *m;
    if (w_rel) inst.weights.rel = Rational::parse(*w_rel);
    if (w_ret) inst.weights.ret = Rational::parse(*w_ret);
    if (w_stack) inst.weights.stack = Rational::parse(*w_stack);
    if (delta != "auto") {
      std::size_t used = 0;
      const int value = std::stoi(delta, &used);
      if (used != delta.size() || value < 0) throw std::invalid_argument("--delta expects a non-negative integer or auto");
      for (auto& c : inst.containers) {
        if (c.has_departure()) c.retrieval_slack = value;
      }
    }
  }
};

void emit(const std::optional<std::string>& path, const std::string& text) {
  if (path) {
    write_file(*path, text);
  } else {
    std::cout << text;
  }
}

int exit_for(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return kOk;
    case SolveStatus::Infeasible: return kInfeasible;
    default: return kTimeout;
  }
}

// --- solve -----------------------------------------------------------------

struct SolveArgs {
  std::string instance;
  Overrides overrides;
  std::optional<double> time_limit;
  std::optional<long> node_limit;
  bool oracle = false;
  bool no_memo = false;
  std::optional<std::string> out;
};

int cmd_solve(const SolveArgs& a) {
  Instance inst = load_instance(a.instance);
  a.overrides.apply(inst);
  if (a.overrides.delta == "auto" && inst.size() > 0) {
    try {
      const auto b = compute_bounds(inst);
      std::cerr << "bounds H=" << b.H << " lb=" << b.lb << "\n";
    } catch (const std::exception& e) {
      std::cerr << "bounds unavailable: " << e.what() << "\n";
    }
  }

  SolverParams params;
  params.time_limit = a.time_limit;
  params.node_limit = a.node_limit;
  params.use_memo = !a.no_memo;
  const auto result = solve(inst, params);
  std::cerr << "status=" << to_string(result.status) << " nodes=" << result.nodes << " horizon=" << result.horizon
            << "\n";
  if (result.status == SolveStatus::Optimal || result.status == SolveStatus::FeasibleTimeout) {
    emit(a.out, serialize_plan(result.plan, result.instance, result.metrics));
    if (a.out) std::cout << metrics_line(result.metrics) << "\n";
  }

  if (a.oracle) {
    if (!within_oracle_guard(inst)) {
      std::cerr << "oracle: skipped, instance outside the brute-force guard\n";
    } else {
      const auto check = brute_force(inst);
      const bool same_status = (check.status == SolveStatus::Infeasible) == (result.status == SolveStatus::Infeasible);
      const bool agree =
          same_status && (check.status == SolveStatus::Infeasible || check.metrics.objective == result.metrics.objective);
      std::cerr << "oracle: " << (agree ? "agrees" : "DISAGREES") << " (brute force "
                << to_string(check.status);
      if (check.status != SolveStatus::Infeasible) std::cerr << ", objective=" << check.metrics.objective;
      std::cerr << ")\n";
      if (!agree) return kError;
    }
  }
  return exit_for(result.status);
}

// --- evaluate --------------------------------------------------------------

struct EvaluateArgs {
  std::string instance;
  std::string plan;
  Overrides overrides;
};

int cmd_evaluate(const EvaluateArgs& a) {
  Instance inst = load_instance(a.instance);
  a.overrides.apply(inst);
  const Plan plan = load_plan(a.plan, inst);
  // An unset window places no limit on a given plan.
  for (auto& c : inst.containers) {
    if (c.has_departure() && !c.retrieval_slack) c.retrieval_slack = std::max(0, plan.length() - c.departure);
    if (c.incoming() && !c.stacking_slack) c.stacking_slack = std::max(0, plan.length() - c.arrival);
  }
  try {
    const auto metrics = evaluate_plan(inst, plan);
    std::cout << metrics_line(metrics) << "\n";
    const auto profile = out_of_order_profile(plan, inst);
    std::cout << "sigma=";
    for (std::size_t i = 0; i < profile.sigma.size(); ++i) std::cout << (i ? "," : "") << profile.sigma[i];
    std::cout << "\n";
    return kOk;
  } catch (const InfeasiblePlan& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  }
}

// --- bound -----------------------------------------------------------------

int cmd_bound(const std::string& path, const Overrides& overrides) {
  Instance inst = load_instance(path);
  overrides.apply(inst);
  const auto b = compute_bounds(inst);
  std::cout << "H=" << b.H << " lb=" << b.lb << "\n";
  std::cout << "delta_star=";
  for (std::size_t i = 0; i < b.delta_star.size(); ++i) {
    if (i) std::cout << ",";
    if (b.delta_star[i]) {
      std::cout << *b.delta_star[i];
    } else {
      std::cout << "-";
    }
  }
  std::cout << "\n";
  return kOk;
}

// --- generate --------------------------------------------------------------

struct GenerateArgs {
  std::uint64_t seed = 1;
  int columns = 4, tiers = 4, filled = 3;
  std::optional<std::string> batch_spec;
  std::optional<int> retrieval_slack;
  Overrides overrides;
  std::optional<std::string> out;
};

int cmd_generate(const GenerateArgs& a) {
  GeneratorConfig cfg;
  cfg.seed = a.seed;
  cfg.columns = a.columns;
  cfg.tiers = a.tiers;
  cfg.filled_tiers = a.filled;
  cfg.retrieval_slack = a.retrieval_slack;
  if (a.batch_spec) cfg.schedule = parse_batch_spec(*a.batch_spec);
  Instance inst = generate(cfg);
  a.overrides.apply(inst);
  emit(a.out, serialize_instance(inst));
  return kOk;
}

// --- experiments -----------------------------------------------------------

struct ExperimentArgs {
  std::uint64_t seed = 1;
  std::optional<int> instances;
  std::optional<int> columns, tiers, filled, m;
  std::optional<std::string> cols_list, m_list, batch_spec;
  std::optional<std::string> w_rel, w_ret, w_stack;
  std::optional<double> time_limit;
  int jobs = default_jobs();
  bool serial = false;
  bool paper_scale = false;
  std::optional<std::string> csv_out;

  void add_to(CLI::App& app) {
    app.add_option("--seed", seed, "First seed; instance i uses seed+i");
    app.add_option("--instances", instances, "Number of seeded instances")->check(CLI::NonNegativeNumber);
    app.add_option("--tiers", tiers, "Bay height")->check(CLI::PositiveNumber);
    app.add_option("--filled", filled, "Initially full tiers")->check(CLI::NonNegativeNumber);
    app.add_option("--w-rel", w_rel, "Relocation weight");
    app.add_option("--w-ret", w_ret, "Retrieval delay weight");
    app.add_option("--w-stack", w_stack, "Stacking delay weight");
    app.add_option("--time-limit", time_limit, "Per-solve limit in seconds (breaks determinism)");
    app.add_option("--jobs", jobs, "Worker threads (default $YARD_CRP_JOBS or 1)");
    app.add_flag("--serial", serial, "Use the plain serial loop");
    app.add_flag("--paper-scale", paper_scale, "Full-size configuration (long running)");
    app.add_option("--csv-out", csv_out, "Write CSV here instead of stdout");
  }

  Weights weights() const {
    Weights w;
    if (w_rel) w.rel = Rational::parse(*w_rel);
    if (w_ret) w.ret = Rational::parse(*w_ret);
    if (w_stack) w.stack = Rational::parse(*w_stack);
    return w;
  }

  RunOptions run() const {
    RunOptions o;
    o.jobs = jobs;
    o.parallel = !serial;
    o.time_limit = time_limit;
    return o;
  }
};

std::vector<int> int_list(const std::string& text) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    std::size_t used = 0;
    const int v = std::stoi(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad integer list: " + text);
    out.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

int cmd_traffic(const ExperimentArgs& a) {
  TrafficConfig cfg;
  if (a.paper_scale) {
    cfg.columns = 6;
    cfg.tiers = 4;
    cfg.filled = 3;
    cfg.instances = 500;
  }
  cfg.columns = a.columns.value_or(cfg.columns);
  cfg.tiers = a.tiers.value_or(cfg.tiers);
  cfg.filled = a.filled.value_or(cfg.filled);
  cfg.instances = a.instances.value_or(cfg.instances);
  cfg.seed = a.seed;
  cfg.weights = a.weights();
  if (a.batch_spec) cfg.batches = parse_batch_spec(*a.batch_spec);

  const auto rows = run_traffic(cfg, a.run());
  emit(a.csv_out, traffic_csv(rows));
  const auto s = summarize(rows);
  std::fprintf(stderr, "solved=%d failed=%d delay uniform=%.4f batched=%.4f decrease=%.2f%% no_repositioning=%.3f\n",
               s.solved, s.failed, s.mean_delay_uniform, s.mean_delay_batched, s.delay_decrease_pct,
               s.no_repositioning_fraction);
  if (s.relocation_mismatches > 0) {
    std::fprintf(stderr, "warning: relocation counts differ on %d instance(s)\n", s.relocation_mismatches);
  }
  return kOk;
}

int cmd_flex(const ExperimentArgs& a) {
  FlexConfig cfg;
  if (a.paper_scale) {
    cfg.columns_list = {4, 8};
    cfg.instances = 1000;
  }
  if (a.cols_list) cfg.columns_list = int_list(*a.cols_list);
  if (a.columns) cfg.columns_list = {*a.columns};
  if (a.m_list) cfg.m_list = int_list(*a.m_list);
  cfg.tiers = a.tiers.value_or(cfg.tiers);
  cfg.filled = a.filled.value_or(cfg.filled);
  cfg.instances = a.instances.value_or(cfg.instances);
  cfg.seed = a.seed;
  cfg.weights = a.weights();

  const auto rows = run_flexibility(cfg, a.run());
  emit(a.csv_out, flexibility_csv(rows));
  for (const auto& c : summarize(rows)) {
    std::fprintf(stderr, "cols=%d tiers=%d m=%d solved=%d relocations=%.3f (-%.1f%%) delay=%.3f (-%.1f%%)\n",
                 c.columns, cfg.tiers, c.m, c.solved, c.mean_relocations, c.relocation_decrease_pct, c.mean_delay,
                 c.delay_decrease_pct);
  }
  return kOk;
}

int cmd_equity(const ExperimentArgs& a) {
  EquityConfig cfg;
  if (a.paper_scale) cfg.instances = 1000;
  cfg.columns = a.columns.value_or(cfg.columns);
  cfg.tiers = a.tiers.value_or(cfg.tiers);
  cfg.filled = a.filled.value_or(cfg.filled);
  cfg.m = a.m.value_or(cfg.m);
  cfg.instances = a.instances.value_or(cfg.instances);
  cfg.seed = a.seed;
  cfg.weights = a.weights();

  const auto h = run_equity(cfg, a.run());
  emit(a.csv_out, equity_csv(h));
  std::fprintf(stderr, "trucks=%ld failed=%d frequency(0)=%.3f\n", h.trucks, h.failed, h.frequency(0));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact container relocation with time windows and flexible retrieval"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* s = app.add_subcommand("solve", "Solve an instance to optimality");
  s->add_option("--instance", solve_args.instance, "Instance JSON")->required();
  solve_args.overrides.add_to(*s);
  s->add_option("--time-limit", solve_args.time_limit, "Seconds");
  s->add_option("--node-limit", solve_args.node_limit, "Search nodes");
  s->add_flag("--oracle", solve_args.oracle, "Cross-check against brute force when small enough");
  s->add_flag("--no-memo", solve_args.no_memo, "Disable the transposition memo");
  s->add_option("--plan-out", solve_args.out, "Write the plan listing here");

  EvaluateArgs eval_args;
  auto* e = app.add_subcommand("evaluate", "Check a plan and report its metrics");
  e->add_option("--instance", eval_args.instance, "Instance JSON")->required();
  e->add_option("--plan", eval_args.plan, "Plan listing")->required();
  eval_args.overrides.add_to(*e);

  std::string bound_instance;
  Overrides bound_overrides;
  auto* b = app.add_subcommand("bound", "Heuristic relocations, tightened windows and lower bound");
  b->add_option("--instance", bound_instance, "Instance JSON")->required();
  bound_overrides.add_to(*b);

  GenerateArgs gen_args;
  auto* g = app.add_subcommand("generate", "Write a seeded random instance");
  g->add_option("--seed", gen_args.seed);
  g->add_option("--cols", gen_args.columns)->check(CLI::PositiveNumber);
  g->add_option("--tiers", gen_args.tiers)->check(CLI::PositiveNumber);
  g->add_option("--filled", gen_args.filled)->check(CLI::NonNegativeNumber);
  g->add_option("--batch-spec", gen_args.batch_spec, "Batched departures, e.g. 9@1,9@20");
  g->add_option("--retrieval-slack", gen_args.retrieval_slack)->check(CLI::NonNegativeNumber);
  gen_args.overrides.add_to(*g);
  g->add_option("--out", gen_args.out);

  ExperimentArgs traffic_args;
  auto* tr = app.add_subcommand("experiment-traffic", "Uniform vs. batched truck arrivals");
  traffic_args.add_to(*tr);
  tr->add_option("--cols", traffic_args.columns)->check(CLI::PositiveNumber);
  tr->add_option("--batch-spec", traffic_args.batch_spec, "e.g. 9@1,9@20");

  ExperimentArgs flex_args;
  auto* fx = app.add_subcommand("experiment-flex", "Relocations and delay vs. flexibility");
  flex_args.add_to(*fx);
  fx->add_option("--cols", flex_args.columns)->check(CLI::PositiveNumber);
  fx->add_option("--cols-list", flex_args.cols_list, "Comma-separated column counts");
  fx->add_option("--m-list", flex_args.m_list, "Comma-separated flexibility levels");

  ExperimentArgs equity_args;
  auto* eq = app.add_subcommand("experiment-equity", "Histogram of out-of-order experience");
  equity_args.add_to(*eq);
  eq->add_option("--cols", equity_args.columns)->check(CLI::PositiveNumber);
  eq->add_option("--m", equity_args.m)->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kOk : kError;
  }

  try {
    if (*s) return cmd_solve(solve_args);
    if (*e) return cmd_evaluate(eval_args);
    if (*b) return cmd_bound(bound_instance, bound_overrides);
    if (*g) return cmd_generate(gen_args);
    if (*tr) return cmd_traffic(traffic_args);
    if (*fx) return cmd_flex(flex_args);
    if (*eq) return cmd_equity(equity_args);
  } catch (const ParseError& err) {
    std::cerr << "parse error: " << err.what() << "\n";
  } catch (const SemanticError& err) {
    std::cerr << "invalid instance: " << err.what() << "\n";
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
  }
  return kError;
}
