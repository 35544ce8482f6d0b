#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "yardcrp/instance_io.hpp"
#include "yardcrp/solver.hpp"

namespace yardcrp {

/// How a batch of independent solves is executed. Rows always come back in
/// seed order, so serial and parallel runs produce identical output when no
/// time limit is set.
struct RunOptions {
  int jobs = 1;           // worker threads; <= 0 means all available cores
  bool parallel = true;   // false: plain serial loop (reference path)
  std::optional<double> time_limit;  // per solve, seconds
};

/// Threads to use when the caller did not ask: $YARD_CRP_JOBS, else 1.
int default_jobs();

// ---------------------------------------------------------------------------
// Traffic bursts: uniform vs. batched truck arrivals on the same bays.

struct TrafficConfig {
  int columns = 3;
  int tiers = 4;
  int filled = 2;
  int instances = 50;
  std::uint64_t seed = 1;
  std::optional<BatchedSchedule> batches;  // default: default_batches(N)
  Weights weights;                         // stack weight unused
};

struct TrafficRow {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  SolveStatus status_uniform = SolveStatus::Infeasible;
  SolveStatus status_batched = SolveStatus::Infeasible;
  int relocations_uniform = 0;
  int relocations_batched = 0;
  double delay_uniform = 0;  // mean retrieval delay per container
  double delay_batched = 0;
  bool repositioned = false;  // batched plan relocates while no truck waits
};

struct TrafficSummary {
  int solved = 0;
  int failed = 0;
  double mean_delay_uniform = 0;
  double mean_delay_batched = 0;
  double delay_decrease_pct = 0;  // relative to uniform
  double no_repositioning_fraction = 0;
  int relocation_mismatches = 0;  // instances where the two counts differ
};

std::vector<TrafficRow> run_traffic(const TrafficConfig& config, const RunOptions& options);
TrafficSummary summarize(const std::vector<TrafficRow>& rows);
std::string traffic_csv(const std::vector<TrafficRow>& rows);

// ---------------------------------------------------------------------------
// Flexibility: relocations and truck delay as the allowance m grows.

struct FlexConfig {
  std::vector<int> columns_list{4};
  int tiers = 4;
  int filled = 3;
  std::vector<int> m_list{0, 1, 2};
  int instances = 100;
  std::uint64_t seed = 1;
  Weights weights;
};

struct FlexRow {
  int columns = 0;
  std::uint64_t seed = 0;
  int m = 0;
  bool ok = false;
  std::string error;
  SolveStatus status = SolveStatus::Infeasible;
  int relocations = 0;
  double delay = 0;  // mean retrieval delay per truck
  Rational objective;
};

struct FlexCell {
  int columns = 0;
  int m = 0;
  int solved = 0;
  double mean_relocations = 0;
  double mean_delay = 0;
  double relocation_decrease_pct = 0;  // vs. the m=0 cell of the same bay
  double delay_decrease_pct = 0;
};

std::vector<FlexRow> run_flexibility(const FlexConfig& config, const RunOptions& options);
/// One cell per (columns, m). Seeds where any m failed are left out of every
/// cell of that bay, so the cells compare the same instances.
std::vector<FlexCell> summarize(const std::vector<FlexRow>& rows);
std::string flexibility_csv(const std::vector<FlexRow>& rows);

// ---------------------------------------------------------------------------
// Equity: how individual trucks experience out-of-order service.

struct EquityConfig {
  int columns = 4;
  int tiers = 4;
  int filled = 3;
  int m = 1;
  int instances = 100;
  std::uint64_t seed = 1;
  Weights weights;
};

struct EquityHistogram {
  std::map<int, long> counts;  // experience code -> trucks
  long trucks = 0;
  int failed = 0;
  double frequency(int code) const;
};

EquityHistogram run_equity(const EquityConfig& config, const RunOptions& options);
std::string equity_csv(const EquityHistogram& histogram);

}  // namespace yardcrp
