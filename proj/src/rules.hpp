#pragma once

// Precomputed per-instance lookups shared by move generation, evaluation and
// the search routines. Internal header.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "yardcrp/model.hpp"

namespace yardcrp::detail {

struct RuleIndex {
  explicit RuleIndex(const Instance& instance);

  int n = 0;
  int columns = 0;
  int tiers = 0;
  int flexibility = 0;
  std::uint64_t finite_mask = 0;    // containers that must be retrieved
  std::uint64_t incoming_mask = 0;  // containers that must be stacked
  // Indexed by id (slot 0 unused).
  std::vector<int> departure;
  std::vector<int> retrieval_deadline;  // kInfiniteTime when unbounded
  std::vector<int> arrival;
  std::vector<int> stacking_deadline;
  std::vector<std::uint64_t> earlier_groups;  // incoming ids with a strictly earlier arrival

  bool finite(ContainerId id) const { return (finite_mask >> id) & 1U; }

  bool may_retrieve(const BayState& s, ContainerId id) const {
    const int t = s.clock();
    return finite(id) && departure[id] <= t && t <= retrieval_deadline[id] &&
           s.retrieved_count() <= id - 1 + flexibility;
  }
  bool may_stack(const BayState& s, ContainerId id) const {
    const int t = s.clock();
    return s.pending(id) && arrival[id] <= t && t <= stacking_deadline[id] &&
           (earlier_groups[id] & s.pending_mask()) == 0;
  }
  bool done(const BayState& s) const {
    return (s.retrieved_mask() & finite_mask) == finite_mask && s.pending_mask() == 0;
  }
  /// True when some unfinished task already missed its window end at the
  /// current clock, so no completion can be feasible.
  bool deadline_missed(const BayState& s) const;
};

std::optional<std::string> move_violation(const BayState& s, const RuleIndex& rules, const Move& move);

}  // namespace yardcrp::detail
