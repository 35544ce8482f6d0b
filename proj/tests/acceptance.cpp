// Acceptance runner: one PASS/FAIL line per criterion.
//   acceptance            run everything
//   acceptance NAME...    run the named criteria only
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "yardcrp/experiments.hpp"
#include "yardcrp/transforms.hpp"

using namespace yardcrp;
using namespace yardcrp::testing;

namespace {

// Pinned tolerances and sample sizes.
constexpr double kFlexExampleSeconds = 10;
constexpr double kTradeoffSeconds = 5;
constexpr double kDynamicSeconds = 60;
constexpr double kOracleSeconds = 20 * 60;
constexpr int kOracleInstances = 200;
constexpr int kWindowInstances = 100;
constexpr int kDominancePlans = 200;
constexpr int kCapInstances = 30;
constexpr std::size_t kCapPlanLimit = 200'000;  // per instance; hitting it fails the criterion
constexpr int kFlexInstances = 100;
constexpr double kFlexTarget = 32.0;
constexpr double kFlexTolerance = 8.0;
constexpr int kTrafficInstances = 50;
constexpr int kEquityInstances = 100;
constexpr double kEquityZeroShare = 0.40;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[" << what << "] ";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

RunOptions harness_options() {
  RunOptions o;
  o.jobs = default_jobs();
  return o;
}

// ---------------------------------------------------------------------------

void golden_flexible_example(Outcome& out) {
  const auto start = std::chrono::steady_clock::now();
  auto inst = load_instance(fixture("flex_example.json"));
  const auto a = solve(inst);
  inst.flexibility = 1;
  const auto b = solve(inst);
  out.require(a.status == SolveStatus::Optimal && a.metrics.objective == Rational(25), "solve m=0 objective 25");
  out.require(b.status == SolveStatus::Optimal && b.metrics.objective == Rational(10), "solve m=1 objective 10");

  inst.flexibility = 0;
  const auto fcfs = load_plan(fixture("flex_example_fcfs.plan"), inst);
  const auto ea = evaluate_plan(open_windows(inst, fcfs), fcfs);
  auto flex_inst = inst;
  flex_inst.flexibility = 1;
  const auto flex = load_plan(fixture("flex_example_m1.plan"), inst);
  const auto eb = evaluate_plan(open_windows(flex_inst, flex), flex);
  out.require(ea.relocations == 3 && ea.total_delay == 22, "fcfs plan (3,22)");
  out.require(eb.relocations == 1 && eb.total_delay == 9, "flexible plan (1,9)");
  out.require(ea.retrieval_delay == std::vector<int>{1, 2, 2, 2, 3, 3, 3, 3, 3}, "m=0 delay vector");
  out.require(eb.retrieval_delay == std::vector<int>{1, 2, 0, 1, 2, 0, 1, 1, 1}, "m=1 delay vector");
  const double secs = seconds_since(start);
  out.require(secs < kFlexExampleSeconds, "runtime");
  out.detail << "objectives " << a.metrics.objective << "/" << b.metrics.objective << ", plans (" << ea.relocations
             << "," << ea.total_delay << ") (" << eb.relocations << "," << eb.total_delay << "), " << secs << "s";
}

void golden_tradeoff(Outcome& out) {
  const auto start = std::chrono::steady_clock::now();
  auto inst = load_instance(fixture("tradeoff.json"));
  const auto equal = solve(inst);
  out.require(equal.status == SolveStatus::Optimal && equal.metrics.objective == Rational(5), "optimum 5");

  const auto p1 = load_plan(fixture("tradeoff_wait.plan"), inst);
  const auto p2 = load_plan(fixture("tradeoff_reposition.plan"), inst);
  const auto m1 = evaluate_plan(open_windows(inst, p1), p1);
  const auto m2 = evaluate_plan(open_windows(inst, p2), p2);
  out.require(m1.relocations == 1 && m1.total_delay == 4, "solution 1 (1,4)");
  out.require(m2.relocations == 2 && m2.total_delay == 3, "solution 2 (2,3)");

  inst.weights.rel = Rational(2);
  const auto heavy = solve(inst);
  out.require(heavy.metrics.objective == Rational(6), "w_rel=2 optimum 6");
  out.require(heavy.metrics.relocations == 1 && heavy.metrics.total_delay == 4, "w_rel=2 picks solution 1");
  const double secs = seconds_since(start);
  out.require(secs < kTradeoffSeconds, "runtime");
  out.detail << "optimum " << equal.metrics.objective << ", w_rel=2 optimum " << heavy.metrics.objective << " ("
             << heavy.metrics.relocations << "," << heavy.metrics.total_delay << "), " << secs << "s";
}

void golden_dynamic_stacking(Outcome& out) {
  const auto start = std::chrono::steady_clock::now();
  const auto free_order = solve(load_instance(fixture("dynamic_stacking.json")));
  out.require(free_order.status == SolveStatus::Optimal, "solved");
  out.require(free_order.metrics.relocations == 0 && free_order.metrics.total_delay == 0, "0 relocations, 0 delay");

  // Fixed stacking order c1..c5, c9, c8, c7, c6: one container per arrival step.
  const auto fixed = solve(load_instance(fixture("dynamic_stacking_fixed_order.json")));
  out.require(fixed.status == SolveStatus::Optimal, "fixed order solved");
  out.require(fixed.metrics.relocations == 3 && fixed.metrics.total_delay == 23, "fixed order (3,23)");
  const double secs = seconds_since(start);
  out.require(secs < kDynamicSeconds, "runtime");
  out.detail << "free order (" << free_order.metrics.relocations << "," << free_order.metrics.total_delay
             << "), fixed order (" << fixed.metrics.relocations << "," << fixed.metrics.total_delay << "), " << secs
             << "s";
}

void oracle_equivalence(Outcome& out) {
  const auto start = std::chrono::steady_clock::now();
  int checked = 0, mismatches = 0, dynamic = 0, infeasible = 0;
  std::set<int> levels;
  for (std::uint64_t seed = 1; checked < kOracleInstances && seed < 10'000; ++seed) {
    const auto inst = small_instance(seed);
    if (!inst || !within_oracle_guard(*inst)) continue;
    const auto a = solve(*inst);
    const auto b = brute_force(*inst);
    const bool agree = a.status == b.status &&
                       (a.status != SolveStatus::Optimal || a.metrics.objective == b.metrics.objective);
    if (!agree) {
      ++mismatches;
      out.detail << "seed " << seed << " differs; ";
    }
    ++checked;
    dynamic += inst->dynamic();
    infeasible += b.status == SolveStatus::Infeasible;
    levels.insert(inst->flexibility);
  }
  const double secs = seconds_since(start);
  out.require(checked >= kOracleInstances, "instance count");
  out.require(mismatches == 0, "mismatches");
  out.require(dynamic > 0 && dynamic < checked, "CRP and DCRP covered");
  out.require(levels == std::set<int>{0, 1, 2}, "m in {0,1,2} covered");
  out.require(secs < kOracleSeconds, "runtime");
  out.detail << checked << " instances (" << dynamic << " dynamic, " << infeasible << " infeasible), " << mismatches
             << " mismatches, " << secs << "s";
}

void tightened_windows(Outcome& out) {
  int checked = 0, violations = 0;
  for (std::uint64_t seed = 1; checked < kWindowInstances; ++seed) {
    GeneratorConfig g;
    g.seed = seed;
    g.columns = 3 + static_cast<int>(seed % 2);
    g.tiers = 4;
    g.filled_tiers = 2;
    g.weights.ret = Rational(0);
    const auto inst = generate(g);
    auto wide = inst;
    for (auto& c : wide.containers) c.retrieval_slack = 3 * inst.size();
    const auto tight = solve(inst);
    const auto loose = solve(wide);
    if (tight.status != SolveStatus::Optimal || loose.status != SolveStatus::Optimal ||
        tight.metrics.relocations != loose.metrics.relocations) {
      ++violations;
      out.detail << "seed " << seed << "; ";
    }
    ++checked;
  }
  out.require(violations == 0, "violations");
  out.detail << checked << " instances, " << violations << " violations";
}

void idle_and_flexify_dominance(Outcome& out) {
  Xoshiro256 rng(2024);
  int plans = 0, violations = 0;
  const auto not_later = [](const PlanMetrics& after, const PlanMetrics& before) {
    for (std::size_t i = 0; i < before.retrieval_delay.size(); ++i) {
      if (before.retrieval_time[i] && after.retrieval_delay[i] > before.retrieval_delay[i]) return false;
    }
    return true;
  };
  for (std::uint64_t seed = 1; plans < kDominancePlans; ++seed) {
    GeneratorConfig g;
    g.seed = seed;
    g.columns = 3 + static_cast<int>(seed % 2);
    g.tiers = 4;
    g.filled_tiers = 2 + static_cast<int>(seed % 2);
    g.retrieval_slack = 6;
    g.flexibility = static_cast<int>(seed % 3);
    if (seed % 4 == 0) g.incoming = IncomingBlock{{2}, {3}, 4};
    Instance inst;
    try {
      inst = generate(g);
    } catch (const ConfigInvalid&) {
      continue;
    }
    std::optional<Plan> plan;
    for (int attempt = 0; attempt < 20 && !plan; ++attempt) plan = random_plan(inst, rng);
    if (!plan) continue;
    ++plans;
    const auto before = evaluate_plan(inst, *plan);
    bool ok = true;
    try {
      const auto normalized = evaluate_plan(inst, normalize_idle(*plan, inst));
      ok = ok && normalized.relocations == before.relocations && not_later(normalized, before);
      auto looser = inst;
      looser.flexibility = inst.flexibility + 1;
      const auto flexible = evaluate_plan(looser, flexify(*plan, inst, looser.flexibility));
      ok = ok && flexible.relocations <= before.relocations && not_later(flexible, before);
    } catch (const std::exception& e) {
      ok = false;
    }
    if (!ok) {
      ++violations;
      out.detail << "seed " << seed << "; ";
    }
  }
  out.require(violations == 0, "violations");
  out.detail << plans << " plans, " << violations << " violations";
}

void cap_equals_out_of_order(Outcome& out) {
  std::size_t plans = 0;
  int instances = 0, violations = 0, truncated = 0;
  for (std::uint64_t seed = 1; instances < kCapInstances; ++seed) {
    auto inst = small_instance(seed, 0);
    if (!inst || !within_oracle_guard(*inst)) continue;
    inst = resolve_windows(*inst);
    if (compute_horizon(*inst) > 10) continue;  // keeps full enumeration cheap
    inst->flexibility = inst->size();             // enumerate every retrieval order
    ++instances;
    std::size_t mine = 0;
    enumerate_plans(*inst, kCapPlanLimit, [&](const Plan& plan) {
      ++mine;
      const auto before = retrievals_before(plan, *inst);
      const auto sigma = out_of_order_profile(plan, *inst).sigma;
      const int worst = sigma.empty() ? 0 : *std::max_element(sigma.begin(), sigma.end());
      for (int m = 0; m <= 2; ++m) {
        bool capped = true;
        for (const auto& c : inst->containers) {
          if (c.has_departure()) capped = capped && before[static_cast<std::size_t>(c.id - 1)] <= c.id - 1 + m;
        }
        if (capped != (worst <= m)) ++violations;
      }
    });
    plans += mine;
    truncated += mine >= kCapPlanLimit;
  }
  out.require(violations == 0, "violations");
  out.require(truncated == 0, "complete enumeration");
  out.detail << instances << " instances, " << plans << " plans, " << violations << " violations";
}

void flexibility_desk(Outcome& out) {
  FlexConfig cfg;  // 4x4, 3 filled tiers, uniform trucks, m in {0,1,2}
  cfg.instances = kFlexInstances;
  const auto rows = run_flexibility(cfg, harness_options());
  const auto cells = summarize(rows);
  std::map<int, FlexCell> by_m;
  for (const auto& c : cells) by_m[c.m] = c;
  const auto& one = by_m[1];
  const auto& two = by_m[2];
  out.require(one.solved == kFlexInstances, "all instances solved");
  out.require(std::abs(one.relocation_decrease_pct - kFlexTarget) <= kFlexTolerance, "relocation decrease m=1");
  out.require(std::abs(one.delay_decrease_pct - kFlexTarget) <= kFlexTolerance, "delay decrease m=1");

  int worse = 0;
  for (std::size_t i = 0; i + 2 < rows.size(); i += 3) {
    const auto& r1 = rows[i + 1];
    const auto& r2 = rows[i + 2];
    if (r2.relocations > r1.relocations || r2.delay > r1.delay) ++worse;
  }
  out.require(worse == 0, "m=2 no worse than m=1 per seed");
  out.require(two.relocation_decrease_pct >= one.relocation_decrease_pct, "m=2 cell decrease");
  out.detail << "m=1 relocations -" << one.relocation_decrease_pct << "%, delay -" << one.delay_decrease_pct
             << "%; m=2 relocations -" << two.relocation_decrease_pct << "%, delay -" << two.delay_decrease_pct
             << "%; seeds where m=2 is worse: " << worse;
}

void traffic_desk(Outcome& out) {
  TrafficConfig cfg;  // 3x4, 2 filled tiers
  cfg.instances = kTrafficInstances;
  const auto rows = run_traffic(cfg, harness_options());
  const auto s = summarize(rows);
  out.require(s.solved == kTrafficInstances, "all instances solved");
  out.require(s.relocation_mismatches == 0, "relocation counts identical");
  out.require(s.mean_delay_batched <= s.mean_delay_uniform, "batched delay <= uniform");
  out.require(s.delay_decrease_pct > 0, "decrease > 0");
  out.detail << s.solved << " instances, delay " << s.mean_delay_uniform << " -> " << s.mean_delay_batched << " (-"
             << s.delay_decrease_pct << "%), relocation mismatches " << s.relocation_mismatches
             << ", no repositioning in " << s.no_repositioning_fraction * 100 << "%";
}

void equity(Outcome& out) {
  EquityConfig cfg;
  cfg.instances = kEquityInstances;
  cfg.m = 1;
  const auto one = run_equity(cfg, harness_options());
  cfg.m = 2;
  const auto two = run_equity(cfg, harness_options());
  out.require(one.failed == 0 && two.failed == 0, "all instances solved");
  out.require(one.frequency(0) > kEquityZeroShare, "frequency(0) at m=1");
  out.require(one.counts.rbegin()->first <= 1, "codes <= +1 at m=1");
  out.require(two.counts.rbegin()->first <= 2, "codes <= +2 at m=2");
  out.detail << "m=1 frequency(0)=" << one.frequency(0) << " over " << one.trucks << " trucks, max code "
             << one.counts.rbegin()->first << "; m=2 max code " << two.counts.rbegin()->first;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"golden_flexible_example", golden_flexible_example},
      {"golden_tradeoff", golden_tradeoff},
      {"golden_dynamic_stacking", golden_dynamic_stacking},
      {"oracle_equivalence", oracle_equivalence},
      {"tightened_windows", tightened_windows},
      {"idle_and_flexify_dominance", idle_and_flexify_dominance},
      {"cap_equals_out_of_order", cap_equals_out_of_order},
      {"flexibility_desk", flexibility_desk},
      {"traffic_desk", traffic_desk},
      {"equity_desk", equity},
  };
  std::set<std::string> wanted(argv + 1, argv + argc);
  for (const auto& name : wanted) {
    if (std::none_of(criteria.begin(), criteria.end(), [&](const auto& c) { return c.first == name; })) {
      std::fprintf(stderr, "unknown criterion: %s\n", name.c_str());
      return 2;
    }
  }

  int failed = 0;
  for (const auto& [name, run] : criteria) {
    if (!wanted.empty() && !wanted.count(name)) continue;
    Outcome out;
    try {
      run(out);
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << "exception: " << e.what();
    }
    std::printf("%s %s: %s\n", out.pass ? "PASS" : "FAIL", name.c_str(), out.detail.str().c_str());
    std::fflush(stdout);
    failed += !out.pass;
  }
  return failed == 0 ? 0 : 1;
}
