#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "yardcrp/model.hpp"

namespace yardcrp {

struct SolverParams {
  std::optional<double> time_limit;  // wall-clock seconds
  std::optional<std::int64_t> node_limit;
  bool use_memo = true;
  /// Cap on stored memo keys; the search stays exact once it is reached,
  /// it just stops remembering new states.
  std::size_t memo_capacity = 4'000'000;
};

enum class SolveStatus {
  Optimal,
  FeasibleTimeout,  // limit hit, best plan found so far is returned
  Infeasible,       // proven: no plan meets every window
  Timeout,          // limit hit before any plan was found
};

std::string to_string(SolveStatus status);

struct SolveResult {
  Plan plan;
  PlanMetrics metrics;
  SolveStatus status = SolveStatus::Infeasible;
  std::int64_t nodes = 0;
  int horizon = 0;
  Instance instance;  // the instance actually solved, with all windows filled
};

class TooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact depth-first branch-and-bound over time-steps 1..T minimizing
/// w_rel*relocations + w_ret*retrieval delay + w_stack*stacking delay.
///
/// Unset windows are filled with resolve_windows() first. Moves are tried in
/// a fixed order (retrievals by id, stacks, relocations by column preference,
/// Idle last) and ties between equally good plans keep the first one found,
/// so results are deterministic when no time limit is set.
SolveResult solve(const Instance& instance, const SolverParams& params = {});

/// Exhaustive reference: expands every feasible move sequence layer by layer
/// (identical bay states at the same time-step are merged, keeping the
/// cheaper prefix). No bounds, no symmetry reduction, no move ordering.
/// Refuses instances with more than 9 slots, 6 containers or 14 time-steps.
SolveResult brute_force(const Instance& instance, const SolverParams& params = {});

inline constexpr int kOracleMaxSlots = 9;
inline constexpr int kOracleMaxContainers = 6;
inline constexpr int kOracleMaxHorizon = 14;

/// Whether brute_force accepts the instance (after window resolution).
bool within_oracle_guard(const Instance& instance);

}  // namespace yardcrp
