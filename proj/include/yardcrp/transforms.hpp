#pragma once

#include <vector>

#include "yardcrp/model.hpp"

namespace yardcrp {

/// Removes avoidable waiting: while step t is Idle and some container still
/// in the bay is already due (d <= t), the next non-idle move is pulled
/// forward to t, provided it is legal there. Relocation count is unchanged
/// and no container is served later than before.
/// Throws InfeasiblePlan if `plan` is not feasible for `instance`.
Plan normalize_idle(const Plan& plan, const Instance& instance);

/// Turns relocations into retrievals where a container is already due and
/// one more out-of-order retrieval is affordable, producing a plan feasible
/// for `target_m` that has no more relocations and no larger delays.
///
/// Relocations are examined in time order. Relocating container X at t is
/// replaced by retrieving X when d_X <= t and every lower id still waiting has
/// fewer than target_m later containers served ahead of it. Later moves of X
/// become Idle and the tiers of the remaining moves are re-derived by replaying
/// the plan. A conversion is kept only if the whole plan stays feasible. The
/// scan repeats until nothing changes, then normalize_idle is applied.
Plan flexify(const Plan& plan, const Instance& instance, int target_m);

struct OutOfOrderProfile {
  /// By id-1: later containers retrieved before this one.
  std::vector<int> sigma;
  /// By id-1, per truck: +k if k trucks were served ahead of it out of turn,
  /// -k if it was served k positions early, 0 otherwise.
  std::vector<int> experience;
};

/// Throws InfeasiblePlan if the plan is not feasible.
OutOfOrderProfile out_of_order_profile(const Plan& plan, const Instance& instance);

}  // namespace yardcrp
