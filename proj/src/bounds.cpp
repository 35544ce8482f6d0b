#include "yardcrp/bounds.hpp"

#include <algorithm>
#include <limits>

#include "rules.hpp"

namespace yardcrp {

namespace {

constexpr int kEmptyColumnKey = std::numeric_limits<int>::max();

int min_id(const BayState& s, int column) {
  int best = kEmptyColumnKey;
  for (int j = 1; j <= s.height(column); ++j) best = std::min(best, s.at({column, j}));
  return best;
}

Instance without_limits(const Instance& instance) {
  Instance relaxed = instance;
  relaxed.flexibility = 0;
  for (auto& c : relaxed.containers) {
    c.retrieval_slack.reset();
    c.stacking_slack.reset();
  }
  return relaxed;
}

}  // namespace

std::vector<int> preferred_columns(const BayState& s, ContainerId id, int exclude_column) {
  struct Candidate {
    int column;
    int key;
    bool good;
  };
  std::vector<Candidate> cands;
  for (int c = 1; c <= s.columns(); ++c) {
    if (c == exclude_column || s.full(c)) continue;
    const int key = min_id(s, c);
    cands.push_back({c, key, key > id});
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.good != b.good) return a.good;
    return a.key > b.key;
  });
  std::vector<int> out;
  out.reserve(cands.size());
  for (const auto& c : cands) out.push_back(c.column);
  return out;
}

HeuristicResult heuristic_plan(const Instance& instance) {
  const Instance relaxed = without_limits(instance);
  const detail::RuleIndex rules(relaxed);
  BayState s = BayState::initial(relaxed);
  HeuristicResult result;

  // Every step either finishes a task, moves a blocker of the current target
  // or waits for a release time; this cap only guards against logic errors.
  int latest_release = 0;
  for (const auto& c : instance.containers) {
    if (c.has_departure()) latest_release = std::max(latest_release, c.departure);
    if (c.incoming()) latest_release = std::max(latest_release, c.arrival);
  }
  const long step_cap = static_cast<long>(latest_release) + 4L * (instance.size() + 1) * (instance.tiers + 1) + 16;

  while (!rules.done(s)) {
    if (s.clock() > step_cap) throw std::logic_error("heuristic did not terminate");
    const int t = s.clock();
    ContainerId target = 0;
    for (ContainerId id = 1; id <= rules.n; ++id) {
      if (rules.finite(id) && !s.retrieved(id)) {
        target = id;
        break;
      }
    }
    Move move = Idle{};
    const auto where = target ? s.find(target) : std::nullopt;
    if (where && rules.departure[target] <= t) {
      const int col = where->column;
      if (s.top(col) == target) {
        move = Retrieve{target, *where};
      } else {
        const ContainerId blocker = s.top(col);
        const auto targets = preferred_columns(s, blocker, col);
        if (targets.empty())
          throw NoRelocationSpace("no column can take c" + instance.container(blocker).name() + " at t=" +
                                  std::to_string(t));
        const int to = targets.front();
        move = Relocate{blocker, {col, s.height(col)}, {to, s.height(to) + 1}};
      }
    } else {
      ContainerId stackable = 0;
      for (ContainerId id = rules.n; id >= 1; --id) {
        if (rules.may_stack(s, id)) {
          stackable = id;
          break;
        }
      }
      if (stackable) {
        const auto targets = preferred_columns(s, stackable, 0);
        if (targets.empty()) throw NoRelocationSpace("bay is full when stacking");
        move = Stack{stackable, {targets.front(), s.height(targets.front()) + 1}};
      }
    }
    result.plan.moves.push_back(move);
    s = apply_move(s, move);
  }

  // Metrics against a horizon that fits the plan exactly.
  Instance measured = relaxed;
  const int length = result.plan.length();
  for (auto& c : measured.containers) {
    if (c.has_departure()) c.retrieval_slack = std::max(0, length - c.departure);
    if (c.incoming()) c.stacking_slack = std::max(0, length - c.arrival);
  }
  result.metrics = evaluate_plan(measured, result.plan);
  result.relocations = result.metrics.relocations;
  return result;
}

std::vector<std::optional<int>> default_windows(const Instance& instance, int H) {
  std::vector<std::optional<int>> out(static_cast<std::size_t>(instance.size()));
  for (const auto& c : instance.containers) {
    if (!c.has_departure()) continue;
    out[static_cast<std::size_t>(c.id - 1)] = H + std::max(c.id - c.departure, 0);
  }
  return out;
}

int lower_bound_relocations(const BayState& s, const Instance& instance) {
  const int m = instance.flexibility;
  int total = 0;
  for (int col = 1; col <= s.columns(); ++col) {
    const int h = s.height(col);
    if (m == 0) {
      // Anything above a container that leaves earlier must move at least once.
      int lowest_finite = std::numeric_limits<int>::max();
      for (int j = 1; j <= h; ++j) {
        const ContainerId id = s.at({col, j});
        if (lowest_finite < id) ++total;
        if (instance.container(id).has_departure()) lowest_finite = std::min(lowest_finite, id);
      }
      continue;
    }
    // With allowance m, at most m of the later containers stacked over a
    // finite container n may leave by retrieval before n does.
    int best = 0;
    for (int j = 1; j <= h; ++j) {
      const ContainerId n = s.at({col, j});
      if (!instance.container(n).has_departure()) continue;
      int later_finite = 0;
      int never_leaving = 0;
      for (int k = j + 1; k <= h; ++k) {
        const ContainerId x = s.at({col, k});
        if (x <= n) continue;
        if (instance.container(x).has_departure()) {
          ++later_finite;
        } else {
          ++never_leaving;
        }
      }
      best = std::max(best, never_leaving + std::max(0, later_finite - m));
    }
    total += best;
  }
  return total;
}

BoundsResult compute_bounds(const Instance& instance) {
  BoundsResult r;
  r.H = heuristic_plan(instance).relocations;
  r.delta_star = default_windows(instance, r.H);
  r.lb = lower_bound_relocations(BayState::initial(instance), instance);
  return r;
}

Instance resolve_windows(const Instance& instance) {
  if (instance.windows_set()) return instance;
  Instance out = instance;

  std::optional<HeuristicResult> heuristic;
  try {
    heuristic = heuristic_plan(instance);
  } catch (const NoRelocationSpace&) {
  }

  int makespan = 0;
  Rational upper;
  if (heuristic) {
    makespan = heuristic->plan.length();
    upper = heuristic->metrics.objective;
  } else {
    // No constructive plan: fall back to a generous horizon.
    int latest = 0;
    for (const auto& c : instance.containers) {
      if (c.has_departure()) latest = std::max(latest, c.departure);
      if (c.incoming()) latest = std::max(latest, c.arrival);
    }
    makespan = latest + 2 * instance.size() * (instance.tiers + 1);
  }

  auto slack_from_weight = [&](const Rational& w) -> std::optional<int> {
    if (!heuristic || w.is_zero()) return std::nullopt;
    const Rational q = upper * Rational(w.den(), w.num());
    return static_cast<int>(q.num() / q.den());
  };

  const auto retrieval_slack = slack_from_weight(instance.weights.ret);
  const auto stacking_slack = slack_from_weight(instance.weights.stack);
  const auto tightened = heuristic && !instance.dynamic()
                             ? default_windows(instance, heuristic->relocations)
                             : std::vector<std::optional<int>>{};

  for (auto& c : out.containers) {
    if (c.has_departure() && !c.retrieval_slack) {
      if (retrieval_slack) {
        c.retrieval_slack = *retrieval_slack;
      } else if (!tightened.empty()) {
        c.retrieval_slack = *tightened[static_cast<std::size_t>(c.id - 1)];
      } else {
        c.retrieval_slack = std::max(0, makespan - c.departure);
      }
    }
    if (c.incoming() && !c.stacking_slack) {
      c.stacking_slack = stacking_slack ? *stacking_slack : std::max(0, makespan - c.arrival);
    }
  }
  return out;
}

}  // namespace yardcrp
