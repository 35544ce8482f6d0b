#include "yardcrp/transforms.hpp"

#include <algorithm>
#include <bit>

#include "rules.hpp"

namespace yardcrp {

namespace {

// Plans can be analysed without explicit windows: any unset window is taken
// to end with the plan itself.
Instance fit_windows(const Instance& instance, const Plan& plan) {
  Instance out = instance;
  const int length = plan.length();
  for (auto& c : out.containers) {
    if (c.has_departure() && !c.retrieval_slack) c.retrieval_slack = std::max(0, length - c.departure);
    if (c.incoming() && !c.stacking_slack) c.stacking_slack = std::max(0, length - c.arrival);
  }
  return out;
}

bool someone_due(const BayState& s, const detail::RuleIndex& rules) {
  for (int c = 1; c <= s.columns(); ++c) {
    for (int j = 1; j <= s.height(c); ++j) {
      const ContainerId id = s.at({c, j});
      if (rules.finite(id) && rules.departure[id] <= s.clock()) return true;
    }
  }
  return false;
}

std::vector<Move> pull_forward(std::vector<Move> moves, const Instance& instance) {
  const detail::RuleIndex rules(instance);
  for (bool changed = true; changed;) {
    changed = false;
    BayState s = BayState::initial(instance);
    for (std::size_t t = 0; t < moves.size(); ++t) {
      if (is_idle(moves[t]) && someone_due(s, rules)) {
        const auto next = std::find_if(moves.begin() + static_cast<std::ptrdiff_t>(t) + 1, moves.end(),
                                       [](const Move& m) { return !is_idle(m); });
        if (next != moves.end() && !detail::move_violation(s, rules, *next)) {
          std::iter_swap(moves.begin() + static_cast<std::ptrdiff_t>(t), next);
          changed = true;
        }
      }
      s = apply_move(s, moves[t]);
    }
  }
  return moves;
}

// Replays `moves`, re-deriving every slot from the actual occupancy.
// Returns false when some move no longer fits.
bool rederive_slots(std::vector<Move>& moves, const Instance& instance) {
  BayState s = BayState::initial(instance);
  for (auto& move : moves) {
    bool ok = true;
    std::visit(
        [&](auto& m) {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, Retrieve> || std::is_same_v<T, Relocate>) {
            const auto where = s.find(m.id);
            if (!where || s.top(where->column) != m.id) {
              ok = false;
              return;
            }
            m.from = *where;
          }
          if constexpr (std::is_same_v<T, Stack> || std::is_same_v<T, Relocate>) {
            if (s.full(m.to.column)) {
              ok = false;
              return;
            }
            m.to.tier = s.height(m.to.column) + 1;
          }
        },
        move);
    if (!ok) return false;
    s = apply_move(s, move);
  }
  return true;
}

bool feasible(const Instance& instance, const Plan& plan) {
  try {
    evaluate_plan(instance, plan);
    return true;
  } catch (const InfeasiblePlan&) {
    return false;
  }
}

}  // namespace

Plan normalize_idle(const Plan& plan, const Instance& instance) {
  const Instance fitted = fit_windows(instance, plan);
  evaluate_plan(fitted, plan);
  return Plan{pull_forward(plan.moves, fitted)};
}

Plan flexify(const Plan& plan, const Instance& instance, int target_m) {
  const Instance fitted = fit_windows(instance, plan);
  evaluate_plan(fitted, plan);
  Instance target = fitted;
  target.flexibility = target_m;
  const detail::RuleIndex rules(target);

  Plan current = plan;
  for (bool changed = true; changed;) {
    changed = false;
    BayState s = BayState::initial(target);
    for (int t = 1; t <= current.length() && !changed; ++t) {
      const Move move = current.at(t);
      const auto* r = std::get_if<Relocate>(&move);
      if (r && rules.finite(r->id) && rules.departure[r->id] <= t) {
        bool affordable = true;
        for (ContainerId i = 1; i < r->id && affordable; ++i) {
          if (!rules.finite(i) || s.retrieved(i)) continue;
          const std::uint64_t later = s.retrieved_mask() & ~((std::uint64_t{2} << i) - 1);
          affordable = std::popcount(later) < target_m;
        }
        if (affordable) {
          std::vector<Move> moves = current.moves;
          moves[static_cast<std::size_t>(t - 1)] = Retrieve{r->id, r->from};
          for (std::size_t k = static_cast<std::size_t>(t); k < moves.size(); ++k) {
            if (moved_container(moves[k]) == r->id) moves[k] = Idle{};
          }
          Plan candidate{std::move(moves)};
          if (rederive_slots(candidate.moves, target) && feasible(target, candidate)) {
            current = std::move(candidate);
            changed = true;
          }
        }
      }
      s = apply_move(s, move);
    }
  }
  return Plan{pull_forward(current.moves, target)};
}

OutOfOrderProfile out_of_order_profile(const Plan& plan, const Instance& instance) {
  const PlanMetrics metrics = evaluate_plan(fit_windows(instance, plan), plan);
  const auto n = static_cast<std::size_t>(instance.size());
  OutOfOrderProfile out;
  out.sigma = metrics.ooo_profile;
  out.experience.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const int when = metrics.retrieval_time[i];
    if (!when) continue;
    if (out.sigma[i] > 0) {
      out.experience[i] = out.sigma[i];
      continue;
    }
    int position = 1;
    for (std::size_t k = 0; k < n; ++k) {
      if (metrics.retrieval_time[k] && metrics.retrieval_time[k] < when) ++position;
    }
    const int early = position - static_cast<int>(i + 1);
    out.experience[i] = std::min(early, 0);
  }
  return out;
}

}  // namespace yardcrp
