#include "yardcrp/experiments.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <set>

#include "yardcrp/transforms.hpp"

namespace yardcrp {

namespace {

template <typename F>
void for_each_index(int count, const RunOptions& options, F&& body) {
  if (!options.parallel) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  const int jobs = options.jobs > 0 ? options.jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
  for (int i = 0; i < count; ++i) body(i);
}

SolverParams params_of(const RunOptions& options) {
  SolverParams p;
  p.time_limit = options.time_limit;
  return p;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

double mean_delay(const PlanMetrics& m, int trucks) { return trucks ? static_cast<double>(m.total_delay) / trucks : 0.0; }

int trucks_of(const Instance& inst) {
  return static_cast<int>(std::count_if(inst.containers.begin(), inst.containers.end(),
                                        [](const ContainerSpec& c) { return c.has_departure(); }));
}

double pct_decrease(double base, double value) { return base == 0 ? 0.0 : 100.0 * (base - value) / base; }

// A relocation while no truck is waiting for a container in the bay.
bool repositions(const Plan& plan, const Instance& inst) {
  BayState s = BayState::initial(inst);
  for (int t = 1; t <= plan.length(); ++t) {
    const Move& move = plan.at(t);
    if (is_relocation(move)) {
      bool someone_waiting = false;
      for (const auto& c : inst.containers) {
        if (c.has_departure() && !s.retrieved(c.id) && c.departure <= t) someone_waiting = true;
      }
      if (!someone_waiting) return true;
    }
    s = apply_move(s, move);
  }
  return false;
}

}  // namespace

int default_jobs() {
  if (const char* env = std::getenv("YARD_CRP_JOBS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

// ---------------------------------------------------------------------------

std::vector<TrafficRow> run_traffic(const TrafficConfig& config, const RunOptions& options) {
  std::vector<TrafficRow> rows(static_cast<std::size_t>(std::max(config.instances, 0)));
  const SolverParams params = params_of(options);
  for_each_index(config.instances, options, [&](int i) {
    TrafficRow& row = rows[static_cast<std::size_t>(i)];
    row.seed = config.seed + static_cast<std::uint64_t>(i);
    try {
      GeneratorConfig gen;
      gen.seed = row.seed;
      gen.columns = config.columns;
      gen.tiers = config.tiers;
      gen.filled_tiers = config.filled;
      gen.weights = config.weights;
      const Instance uniform = generate(gen);
      gen.schedule = config.batches ? *config.batches : default_batches(config.columns * config.filled);
      const Instance batched = generate(gen);

      const auto a = solve(uniform, params);
      const auto b = solve(batched, params);
      row.status_uniform = a.status;
      row.status_batched = b.status;
      row.ok = a.status == SolveStatus::Optimal && b.status == SolveStatus::Optimal;
      if (!row.ok) {
        row.error = "not solved to optimality";
        return;
      }
      const int trucks = trucks_of(uniform);
      row.relocations_uniform = a.metrics.relocations;
      row.relocations_batched = b.metrics.relocations;
      row.delay_uniform = mean_delay(a.metrics, trucks);
      row.delay_batched = mean_delay(b.metrics, trucks);
      row.repositioned = repositions(b.plan, b.instance);
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
  });
  return rows;
}

TrafficSummary summarize(const std::vector<TrafficRow>& rows) {
  TrafficSummary s;
  int still = 0;
  for (const auto& r : rows) {
    if (!r.ok) {
      ++s.failed;
      continue;
    }
    ++s.solved;
    s.mean_delay_uniform += r.delay_uniform;
    s.mean_delay_batched += r.delay_batched;
    if (!r.repositioned) ++still;
    if (r.relocations_uniform != r.relocations_batched) ++s.relocation_mismatches;
  }
  if (s.solved > 0) {
    s.mean_delay_uniform /= s.solved;
    s.mean_delay_batched /= s.solved;
    s.no_repositioning_fraction = static_cast<double>(still) / s.solved;
  }
  s.delay_decrease_pct = pct_decrease(s.mean_delay_uniform, s.mean_delay_batched);
  return s;
}

std::string traffic_csv(const std::vector<TrafficRow>& rows) {
  std::string out =
      "kind,seed,status_uniform,status_batched,relocations_uniform,relocations_batched,delay_uniform,delay_batched,"
      "repositioned,solved,delay_decrease_pct,no_repositioning_fraction,relocation_mismatches,error\n";
  for (const auto& r : rows) {
    out += "instance," + std::to_string(r.seed) + "," + to_string(r.status_uniform) + "," +
           to_string(r.status_batched) + ",";
    if (r.ok) {
      out += std::to_string(r.relocations_uniform) + "," + std::to_string(r.relocations_batched) + "," +
             fmt(r.delay_uniform) + "," + fmt(r.delay_batched) + "," + (r.repositioned ? "1" : "0");
    } else {
      out += ",,,,";
    }
    out += ",,,,," + csv_field(r.error) + "\n";
  }
  const auto s = summarize(rows);
  out += "summary,,,,,," + fmt(s.mean_delay_uniform) + "," + fmt(s.mean_delay_batched) + ",," +
         std::to_string(s.solved) + "," + fmt(s.delay_decrease_pct) + "," + fmt(s.no_repositioning_fraction) + "," +
         std::to_string(s.relocation_mismatches) + ",\n";
  return out;
}

// ---------------------------------------------------------------------------

std::vector<FlexRow> run_flexibility(const FlexConfig& config, const RunOptions& options) {
  const auto bays = static_cast<int>(config.columns_list.size());
  const int per_bay = std::max(config.instances, 0);
  const auto ms = config.m_list.size();
  std::vector<FlexRow> rows(static_cast<std::size_t>(bays * per_bay) * ms);
  const SolverParams params = params_of(options);

  for_each_index(bays * per_bay, options, [&](int job) {
    const int columns = config.columns_list[static_cast<std::size_t>(job / per_bay)];
    const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(job % per_bay);
    std::optional<Instance> inst;
    std::string gen_error;
    try {
      GeneratorConfig gen;
      gen.seed = seed;
      gen.columns = columns;
      gen.tiers = config.tiers;
      gen.filled_tiers = config.filled;
      gen.weights = config.weights;
      inst = generate(gen);
    } catch (const std::exception& e) {
      gen_error = e.what();
    }
    for (std::size_t k = 0; k < ms; ++k) {
      FlexRow& row = rows[static_cast<std::size_t>(job) * ms + k];
      row.columns = columns;
      row.seed = seed;
      row.m = config.m_list[k];
      if (!inst) {
        row.error = gen_error;
        continue;
      }
      try {
        Instance variant = *inst;
        variant.flexibility = row.m;
        const auto r = solve(variant, params);
        row.status = r.status;
        row.ok = r.status == SolveStatus::Optimal;
        if (!row.ok) {
          row.error = "not solved to optimality";
          continue;
        }
        row.relocations = r.metrics.relocations;
        row.delay = mean_delay(r.metrics, trucks_of(variant));
        row.objective = r.metrics.objective;
      } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
      }
    }
  });
  return rows;
}

std::vector<FlexCell> summarize(const std::vector<FlexRow>& rows) {
  std::set<std::pair<int, std::uint64_t>> broken;
  std::vector<int> bays;
  std::vector<int> levels;
  for (const auto& r : rows) {
    if (!r.ok) broken.insert({r.columns, r.seed});
    if (std::find(bays.begin(), bays.end(), r.columns) == bays.end()) bays.push_back(r.columns);
    if (std::find(levels.begin(), levels.end(), r.m) == levels.end()) levels.push_back(r.m);
  }

  std::vector<FlexCell> cells;
  for (int columns : bays) {
    const std::size_t first = cells.size();
    for (int m : levels) {
      FlexCell c;
      c.columns = columns;
      c.m = m;
      for (const auto& r : rows) {
        if (r.columns != columns || r.m != m || broken.count({r.columns, r.seed})) continue;
        ++c.solved;
        c.mean_relocations += r.relocations;
        c.mean_delay += r.delay;
      }
      if (c.solved > 0) {
        c.mean_relocations /= c.solved;
        c.mean_delay /= c.solved;
      }
      cells.push_back(c);
    }
    // Baseline: m = 0 when present, otherwise the smallest level.
    const auto base = std::min_element(cells.begin() + static_cast<std::ptrdiff_t>(first), cells.end(),
                                       [](const FlexCell& a, const FlexCell& b) { return a.m < b.m; });
    const FlexCell reference = *base;
    for (auto it = cells.begin() + static_cast<std::ptrdiff_t>(first); it != cells.end(); ++it) {
      it->relocation_decrease_pct = pct_decrease(reference.mean_relocations, it->mean_relocations);
      it->delay_decrease_pct = pct_decrease(reference.mean_delay, it->mean_delay);
    }
  }
  return cells;
}

std::string flexibility_csv(const std::vector<FlexRow>& rows) {
  std::string out =
      "kind,columns,seed,m,status,relocations,delay,objective,solved,relocation_decrease_pct,delay_decrease_pct,"
      "error\n";
  for (const auto& r : rows) {
    out += "instance," + std::to_string(r.columns) + "," + std::to_string(r.seed) + "," + std::to_string(r.m) + "," +
           to_string(r.status) + ",";
    if (r.ok) {
      out += std::to_string(r.relocations) + "," + fmt(r.delay) + "," + r.objective.str();
    } else {
      out += ",,";
    }
    out += ",,,," + csv_field(r.error) + "\n";
  }
  for (const auto& c : summarize(rows)) {
    out += "cell," + std::to_string(c.columns) + ",," + std::to_string(c.m) + ",," + fmt(c.mean_relocations) + "," +
           fmt(c.mean_delay) + ",," + std::to_string(c.solved) + "," + fmt(c.relocation_decrease_pct) + "," +
           fmt(c.delay_decrease_pct) + ",\n";
  }
  return out;
}

// ---------------------------------------------------------------------------

double EquityHistogram::frequency(int code) const {
  const auto it = counts.find(code);
  return it == counts.end() || trucks == 0 ? 0.0 : static_cast<double>(it->second) / static_cast<double>(trucks);
}

EquityHistogram run_equity(const EquityConfig& config, const RunOptions& options) {
  const int count = std::max(config.instances, 0);
  std::vector<std::optional<std::vector<int>>> codes(static_cast<std::size_t>(count));
  const SolverParams params = params_of(options);
  for_each_index(count, options, [&](int i) {
    try {
      GeneratorConfig gen;
      gen.seed = config.seed + static_cast<std::uint64_t>(i);
      gen.columns = config.columns;
      gen.tiers = config.tiers;
      gen.filled_tiers = config.filled;
      gen.flexibility = config.m;
      gen.weights = config.weights;
      const Instance inst = generate(gen);
      const auto r = solve(inst, params);
      if (r.status != SolveStatus::Optimal) return;
      const auto profile = out_of_order_profile(r.plan, r.instance);
      std::vector<int> mine;
      for (const auto& c : inst.containers) {
        if (c.has_departure()) mine.push_back(profile.experience[static_cast<std::size_t>(c.id - 1)]);
      }
      codes[static_cast<std::size_t>(i)] = std::move(mine);
    } catch (const std::exception&) {
    }
  });

  EquityHistogram h;
  for (const auto& list : codes) {
    if (!list) {
      ++h.failed;
      continue;
    }
    for (int code : *list) {
      ++h.counts[code];
      ++h.trucks;
    }
  }
  return h;
}

std::string equity_csv(const EquityHistogram& h) {
  std::string out = "code,count,frequency\n";
  for (const auto& [code, n] : h.counts) out += std::to_string(code) + "," + std::to_string(n) + "," + fmt(h.frequency(code)) + "\n";
  return out;
}

}  // namespace yardcrp
