#pragma once
// Helpers shared by the unit tests and the acceptance runner.

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "yardcrp/bounds.hpp"
#include "yardcrp/instance_io.hpp"
#include "yardcrp/model.hpp"
#include "yardcrp/solver.hpp"

namespace yardcrp::testing {

inline std::string fixture(const std::string& name) { return std::string(YARDCRP_FIXTURE_DIR) + "/" + name; }

/// Copy with every unset window opened wide enough for `plan`.
inline Instance open_windows(Instance inst, const Plan& plan) {
  for (auto& c : inst.containers) {
    if (c.has_departure() && !c.retrieval_slack) c.retrieval_slack = std::max(0, plan.length() - c.departure);
    if (c.incoming() && !c.stacking_slack) c.stacking_slack = std::max(0, plan.length() - c.arrival);
  }
  return inst;
}

/// Small random instance, sometimes dynamic, sometimes with explicit or
/// infinite departures. Returns nullopt when the draw is not a valid config.
inline std::optional<Instance> small_instance(std::uint64_t seed, int flexibility = -1) {
  Xoshiro256 r(seed * 7919);
  GeneratorConfig g;
  g.seed = seed;
  g.columns = 2 + static_cast<int>(r.below(2));
  g.tiers = 3;
  g.filled_tiers = 1 + static_cast<int>(r.below(2));
  const int in_bay = g.columns * g.filled_tiers;
  if (r.below(2)) {
    const int k = 1 + static_cast<int>(r.below(2));
    if (in_bay + k <= 6) {
      g.incoming = IncomingBlock{{k}, {1 + static_cast<int>(r.below(2))}, static_cast<int>(r.below(4))};
    }
  }
  if (r.below(3)) g.retrieval_slack = static_cast<int>(r.below(5));
  if (r.below(2)) {
    const int n = in_bay + (g.incoming ? g.incoming->group_sizes[0] : 0);
    std::vector<int> d;
    int cur = 1;
    for (int i = 0; i < n; ++i) {
      cur += static_cast<int>(r.below(3));
      d.push_back(cur);
    }
    if (r.below(2) && !g.incoming) d.back() = kInfiniteTime;
    g.schedule = ExplicitSchedule{d};
  }
  g.flexibility = flexibility >= 0 ? flexibility : static_cast<int>(r.below(3));
  g.weights.rel = Rational(1 + static_cast<int>(r.below(2)));
  g.weights.ret = Rational(static_cast<int>(r.below(3)));
  g.weights.stack = Rational(1);
  try {
    return generate(g);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

/// Random walk over legal moves, biased towards useful work, until every
/// task is done. Returns nullopt when the walk runs out of time.
inline std::optional<Plan> random_plan(const Instance& inst, Xoshiro256& rng) {
  const int horizon = compute_horizon(inst);
  BayState s = BayState::initial(inst);
  Plan plan;
  while (!all_tasks_done(s, inst)) {
    if (s.clock() > horizon) return std::nullopt;
    const auto moves = legal_moves(s, inst);
    if (moves.empty()) return std::nullopt;
    std::vector<Move> work;
    for (const auto& m : moves) {
      if (std::holds_alternative<Retrieve>(m) || std::holds_alternative<Stack>(m)) work.push_back(m);
    }
    const Move pick = !work.empty() && rng.below(10) < 7 ? work[rng.below(work.size())] : moves[rng.below(moves.size())];
    s = apply_move(s, pick, inst);
    plan.moves.push_back(pick);
  }
  return plan;
}

/// Every plan that completes all tasks, in DFS order, up to `cap` plans.
/// Plans stop at the move completing the last task.
inline void enumerate_plans(const Instance& inst, std::size_t cap, const std::function<void(const Plan&)>& visit) {
  const int horizon = compute_horizon(inst);
  Plan plan;
  std::size_t seen = 0;
  std::function<void(const BayState&)> dfs = [&](const BayState& s) {
    if (seen >= cap) return;
    if (all_tasks_done(s, inst)) {
      ++seen;
      visit(plan);
      return;
    }
    if (s.clock() > horizon) return;
    for (const auto& m : legal_moves(s, inst)) {
      plan.moves.push_back(m);
      dfs(apply_move(s, m, inst));
      plan.moves.pop_back();
    }
  };
  dfs(BayState::initial(inst));
}

/// Number of retrievals performed strictly before each container's own.
inline std::vector<int> retrievals_before(const Plan& plan, const Instance& inst) {
  std::vector<int> out(static_cast<std::size_t>(inst.size()), 0);
  int done = 0;
  for (const auto& m : plan.moves) {
    if (const auto* r = std::get_if<Retrieve>(&m)) {
      out[static_cast<std::size_t>(r->id - 1)] = done;
      ++done;
    }
  }
  return out;
}

}  // namespace yardcrp::testing
