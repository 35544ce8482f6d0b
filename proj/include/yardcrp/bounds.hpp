#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "yardcrp/model.hpp"

namespace yardcrp {

class NoRelocationSpace : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct HeuristicResult {
  Plan plan;
  int relocations = 0;  // H
  PlanMetrics metrics;  // delays measured without any window limits
};

struct BoundsResult {
  int H = 0;
  std::vector<std::optional<int>> delta_star;  // by id-1; empty for infinite departures
  int lb = 0;
};

/// First-come-first-served plan: serve the lowest unretrieved id as soon as
/// its truck is there, moving its blockers one by one to the best column.
/// Idles when nothing is ready. Incoming containers are stacked whenever no
/// retrieval is ready (latest departure first). Windows and the instance's
/// flexibility are ignored; the plan length is whatever it takes.
HeuristicResult heuristic_plan(const Instance& instance);

/// H + (n - d_n)^+ for every finite-departure container.
std::vector<std::optional<int>> default_windows(const Instance& instance, int H);

/// Containers that must still be relocated at least once from the current
/// state. Admissible for the instance's flexibility level.
int lower_bound_relocations(const BayState& state, const Instance& instance);

BoundsResult compute_bounds(const Instance& instance);

/// Copy of the instance with every unset window filled:
///  - w_ret > 0: slack = floor(U / w_ret), U being the heuristic objective
///  - w_ret = 0, no incoming containers: the tightened slack H + (n - d_n)^+
///  - otherwise the heuristic plan's makespan
/// Stacking slacks follow the same rule with w_stack. Explicit slacks are kept.
Instance resolve_windows(const Instance& instance);

/// Target columns for a container leaving `exclude_column` (0: none), best
/// first. Columns whose earliest remaining id exceeds `id` come first; within
/// each group a larger earliest id wins; ties go to the leftmost column.
/// Empty columns count as +infinity. Full columns are omitted.
std::vector<int> preferred_columns(const BayState& state, ContainerId id, int exclude_column);

}  // namespace yardcrp
