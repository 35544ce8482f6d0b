#include "yardcrp/model.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <set>
#include <sstream>

#include "rules.hpp"

namespace yardcrp {

namespace detail {

RuleIndex::RuleIndex(const Instance& instance)
    : n(instance.size()),
      columns(instance.columns),
      tiers(instance.tiers),
      flexibility(instance.flexibility),
      departure(static_cast<std::size_t>(n + 1), kInfiniteTime),
      retrieval_deadline(static_cast<std::size_t>(n + 1), kInfiniteTime),
      arrival(static_cast<std::size_t>(n + 1), 0),
      stacking_deadline(static_cast<std::size_t>(n + 1), kInfiniteTime),
      earlier_groups(static_cast<std::size_t>(n + 1), 0) {
  for (const auto& c : instance.containers) {
    const auto id = static_cast<std::size_t>(c.id);
    departure[id] = c.departure;
    if (c.has_departure()) {
      finite_mask |= std::uint64_t{1} << c.id;
      if (c.retrieval_slack) retrieval_deadline[id] = c.departure + *c.retrieval_slack;
    }
    if (c.incoming()) {
      incoming_mask |= std::uint64_t{1} << c.id;
      arrival[id] = c.arrival;
      if (c.stacking_slack) stacking_deadline[id] = c.arrival + *c.stacking_slack;
    }
  }
  for (const auto& c : instance.containers) {
    if (!c.incoming()) continue;
    for (const auto& o : instance.containers) {
      if (o.incoming() && o.arrival < c.arrival) earlier_groups[static_cast<std::size_t>(c.id)] |= std::uint64_t{1} << o.id;
    }
  }
}

bool RuleIndex::deadline_missed(const BayState& s) const {
  const int t = s.clock();
  for (ContainerId id = 1; id <= n; ++id) {
    if (finite(id) && !s.retrieved(id) && retrieval_deadline[id] < t) return true;
    if (s.pending(id) && stacking_deadline[id] < t) return true;
  }
  return false;
}

namespace {

std::optional<std::string> violation(const BayState& s, const RuleIndex& rules, const Move& move) {
  const int t = s.clock();
  auto top_of = [&](Slot from, ContainerId id) -> std::optional<std::string> {
    if (from.column < 1 || from.column > s.columns()) return "source column out of range";
    if (s.height(from.column) != from.tier || s.at(from) != id)
      return "c" + std::to_string(id) + " is not on top of column " + std::to_string(from.column);
    return std::nullopt;
  };
  auto free_top = [&](Slot to) -> std::optional<std::string> {
    if (to.column < 1 || to.column > s.columns()) return "target column out of range";
    if (s.full(to.column)) return "column " + std::to_string(to.column) + " is full";
    if (to.tier != s.height(to.column) + 1) return "target tier is not the first empty tier";
    return std::nullopt;
  };

  return std::visit(
      [&](const auto& m) -> std::optional<std::string> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Idle>) {
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, Retrieve>) {
          if (m.id < 1 || m.id > rules.n) return "unknown container";
          if (auto e = top_of(m.from, m.id)) return e;
          if (!rules.finite(m.id)) return "c" + std::to_string(m.id) + " has no departure";
          if (t < rules.departure[m.id]) return "c" + std::to_string(m.id) + " retrieved before its truck arrives";
          if (t > rules.retrieval_deadline[m.id]) return "c" + std::to_string(m.id) + " retrieved after its window";
          if (s.retrieved_count() > m.id - 1 + rules.flexibility)
            return "retrieving c" + std::to_string(m.id) + " exceeds the out-of-order allowance";
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, Stack>) {
          if (m.id < 1 || m.id > rules.n) return "unknown container";
          if (!s.pending(m.id)) return "c" + std::to_string(m.id) + " is not waiting to be stacked";
          if (auto e = free_top(m.to)) return e;
          if (t < rules.arrival[m.id]) return "c" + std::to_string(m.id) + " stacked before it arrives";
          if (t > rules.stacking_deadline[m.id]) return "c" + std::to_string(m.id) + " stacked after its window";
          if (rules.earlier_groups[m.id] & s.pending_mask())
            return "c" + std::to_string(m.id) + " stacked before an earlier group is complete";
          return std::nullopt;
        } else {
          if (m.id < 1 || m.id > rules.n) return "unknown container";
          if (auto e = top_of(m.from, m.id)) return e;
          if (m.from.column == m.to.column) return "relocation within the same column";
          if (auto e = free_top(m.to)) return e;
          return std::nullopt;
        }
      },
      move);
}

}  // namespace

std::optional<std::string> move_violation(const BayState& s, const RuleIndex& rules, const Move& move) {
  return violation(s, rules, move);
}

}  // namespace detail

// ---------------------------------------------------------------------------

bool Instance::dynamic() const {
  return std::any_of(containers.begin(), containers.end(), [](const auto& c) { return c.incoming(); });
}

bool Instance::windows_set() const {
  return std::all_of(containers.begin(), containers.end(), [](const ContainerSpec& c) {
    if (c.has_departure() && !c.retrieval_slack) return false;
    if (c.incoming() && !c.stacking_slack) return false;
    return true;
  });
}

BayState::BayState(int columns, int tiers)
    : columns_(static_cast<std::uint8_t>(columns)), tiers_(static_cast<std::uint8_t>(tiers)) {
  if (columns < 1 || columns > kMaxColumns || tiers < 1 || tiers > kMaxTiers || columns * tiers > kMaxSlots)
    throw std::invalid_argument("unsupported bay geometry " + std::to_string(columns) + "x" + std::to_string(tiers));
}

BayState BayState::initial(const Instance& instance) {
  const auto report = validate_bay(instance);
  if (!report.ok()) throw std::invalid_argument(report.summary());
  BayState s(instance.columns, instance.tiers);
  std::vector<const ContainerSpec*> placed;
  for (const auto& c : instance.containers) {
    if (c.incoming()) {
      s.mark_pending(c.id);
    } else {
      placed.push_back(&c);
    }
  }
  std::sort(placed.begin(), placed.end(), [](auto* a, auto* b) { return a->initial->tier < b->initial->tier; });
  for (const auto* c : placed) s.push(c->initial->column, c->id);
  return s;
}

std::optional<Slot> BayState::find(ContainerId id) const {
  for (int c = 1; c <= columns_; ++c) {
    for (int j = 1; j <= height(c); ++j) {
      if (at({c, j}) == id) return Slot{c, j};
    }
  }
  return std::nullopt;
}

int BayState::retrieved_count() const { return std::popcount(retrieved_); }

void BayState::push(int column, ContainerId id) {
  const int h = height(column);
  grid_[index(column, h + 1)] = static_cast<std::uint8_t>(id);
  heights_[static_cast<std::size_t>(column - 1)] = static_cast<std::uint8_t>(h + 1);
}

ContainerId BayState::pop(int column) {
  const int h = height(column);
  const ContainerId id = grid_[index(column, h)];
  grid_[index(column, h)] = 0;
  heights_[static_cast<std::size_t>(column - 1)] = static_cast<std::uint8_t>(h - 1);
  return id;
}

ContainerId moved_container(const Move& m) {
  return std::visit(
      [](const auto& mv) -> ContainerId {
        if constexpr (std::is_same_v<std::decay_t<decltype(mv)>, Idle>) {
          return 0;
        } else {
          return mv.id;
        }
      },
      m);
}

namespace {
std::string slot_str(Slot s) { return "[" + std::to_string(s.column) + "," + std::to_string(s.tier) + "]"; }
}  // namespace

std::string describe(const Move& m) {
  return std::visit(
      [](const auto& mv) -> std::string {
        using T = std::decay_t<decltype(mv)>;
        if constexpr (std::is_same_v<T, Idle>) {
          return "idle";
        } else if constexpr (std::is_same_v<T, Retrieve>) {
          return "retrieve c" + std::to_string(mv.id) + " " + slot_str(mv.from) + " -> out";
        } else if constexpr (std::is_same_v<T, Stack>) {
          return "stack c" + std::to_string(mv.id) + " out -> " + slot_str(mv.to);
        } else {
          return "relocate c" + std::to_string(mv.id) + " " + slot_str(mv.from) + " -> " + slot_str(mv.to);
        }
      },
      m);
}

// ---------------------------------------------------------------------------

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::OutOfRange: return "out-of-range";
    case ViolationKind::DuplicateSlot: return "duplicate slot";
    case ViolationKind::Floating: return "floating";
    case ViolationKind::DuplicateId: return "duplicate id";
    case ViolationKind::NonContiguousIds: return "non-contiguous ids";
    case ViolationKind::TooManyContainers: return "too many containers";
    case ViolationKind::DepartureOrder: return "departure order";
    case ViolationKind::ArrivalAfterDeparture: return "arrival after departure";
    case ViolationKind::BadWindow: return "bad window";
    case ViolationKind::BadGeometry: return "bad geometry";
    case ViolationKind::NegativeWeight: return "negative weight";
  }
  return "unknown";
}

bool ValidationReport::has(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == kind; });
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) os << "; ";
    os << to_string(violations[i].kind) << ": " << violations[i].message;
  }
  return os.str();
}

ValidationReport validate_bay(const Instance& inst) {
  ValidationReport report;
  auto add = [&](ViolationKind k, ContainerId id, std::string msg) { report.violations.push_back({k, id, std::move(msg)}); };
  auto cname = [](const ContainerSpec& c) { return "c" + c.name(); };

  const bool geometry_ok = inst.columns >= 1 && inst.columns <= kMaxColumns && inst.tiers >= 1 &&
                           inst.tiers <= kMaxTiers && inst.columns * inst.tiers <= kMaxSlots;
  if (!geometry_ok) {
    add(ViolationKind::BadGeometry, 0,
        "bay " + std::to_string(inst.columns) + "x" + std::to_string(inst.tiers) + " is outside the supported range");
  }
  if (inst.size() > kMaxContainers || (geometry_ok && inst.size() > inst.columns * inst.tiers)) {
    add(ViolationKind::TooManyContainers, 0, std::to_string(inst.size()) + " containers do not fit");
  }
  if (inst.flexibility < 0) add(ViolationKind::BadWindow, 0, "negative flexibility");
  for (const auto* w : {&inst.weights.rel, &inst.weights.ret, &inst.weights.stack}) {
    if (w->is_negative()) add(ViolationKind::NegativeWeight, 0, "weight " + w->str() + " is negative");
  }

  std::set<ContainerId> seen;
  for (std::size_t i = 0; i < inst.containers.size(); ++i) {
    const auto& c = inst.containers[i];
    if (!seen.insert(c.id).second) add(ViolationKind::DuplicateId, c.id, "id " + std::to_string(c.id) + " repeated");
    if (c.id != static_cast<int>(i) + 1)
      add(ViolationKind::NonContiguousIds, c.id, "expected id " + std::to_string(i + 1) + ", found " + std::to_string(c.id));
    if (c.departure < 1) add(ViolationKind::BadWindow, c.id, cname(c) + " has a non-positive departure");
    if (c.retrieval_slack && *c.retrieval_slack < 0) add(ViolationKind::BadWindow, c.id, cname(c) + " has a negative slack");
    if (c.incoming()) {
      if (c.arrival < 1) add(ViolationKind::BadWindow, c.id, cname(c) + " has a non-positive arrival");
      if (c.stacking_slack && *c.stacking_slack < 0)
        add(ViolationKind::BadWindow, c.id, cname(c) + " has a negative stacking slack");
      if (c.has_departure() && c.arrival >= c.departure)
        add(ViolationKind::ArrivalAfterDeparture, c.id, cname(c) + " must arrive before its departure");
    }
    if (i > 0 && inst.containers[i - 1].departure > c.departure)
      add(ViolationKind::DepartureOrder, c.id, cname(c) + " departs before c" + inst.containers[i - 1].name());
  }

  if (!geometry_ok) return report;
  std::map<Slot, ContainerId> occupied;
  for (const auto& c : inst.containers) {
    if (c.incoming()) continue;
    const Slot s = *c.initial;
    if (s.column < 1 || s.column > inst.columns || s.tier < 1 || s.tier > inst.tiers) {
      add(ViolationKind::OutOfRange, c.id, cname(c) + " placed outside the bay");
      continue;
    }
    if (auto [it, fresh] = occupied.emplace(s, c.id); !fresh) {
      add(ViolationKind::DuplicateSlot, c.id,
          cname(c) + " shares slot [" + std::to_string(s.column) + "," + std::to_string(s.tier) + "]");
    }
  }
  for (const auto& [slot, id] : occupied) {
    if (slot.tier > 1 && !occupied.count({slot.column, slot.tier - 1})) {
      add(ViolationKind::Floating, id,
          "c" + inst.container(id).name() + " floats above an empty slot in column " + std::to_string(slot.column));
    }
  }
  return report;
}

int compute_horizon(const Instance& inst) {
  int horizon = 0;
  bool any = false;
  for (const auto& c : inst.containers) {
    if (c.has_departure()) {
      if (!c.retrieval_slack) throw std::invalid_argument("retrieval window of c" + c.name() + " is unset");
      horizon = std::max(horizon, c.departure + *c.retrieval_slack);
      any = true;
    }
    if (c.incoming()) {
      if (!c.stacking_slack) throw std::invalid_argument("stacking window of c" + c.name() + " is unset");
      horizon = std::max(horizon, c.arrival + *c.stacking_slack);
      any = true;
    }
  }
  if (!any) throw NoFiniteTasks();
  return horizon;
}

std::optional<std::string> move_violation(const BayState& state, const Instance& instance, const Move& move) {
  return detail::move_violation(state, detail::RuleIndex(instance), move);
}

std::vector<Move> legal_moves(const BayState& s, const Instance& instance) {
  const detail::RuleIndex rules(instance);
  std::vector<Move> out;
  std::vector<ContainerId> retrievable;
  for (int c = 1; c <= s.columns(); ++c) {
    const ContainerId top = s.top(c);
    if (top && rules.may_retrieve(s, top)) retrievable.push_back(top);
  }
  std::sort(retrievable.begin(), retrievable.end());
  for (ContainerId id : retrievable) out.emplace_back(Retrieve{id, *s.find(id)});

  for (ContainerId id = 1; id <= rules.n; ++id) {
    if (!rules.may_stack(s, id)) continue;
    for (int c = 1; c <= s.columns(); ++c) {
      if (!s.full(c)) out.emplace_back(Stack{id, {c, s.height(c) + 1}});
    }
  }
  for (int from = 1; from <= s.columns(); ++from) {
    const ContainerId top = s.top(from);
    if (!top) continue;
    for (int to = 1; to <= s.columns(); ++to) {
      if (to != from && !s.full(to)) out.emplace_back(Relocate{top, {from, s.height(from)}, {to, s.height(to) + 1}});
    }
  }
  out.emplace_back(Idle{});
  return out;
}

BayState apply_move(const BayState& state, const Move& move) {
  BayState next = state;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        auto require_top = [&](Slot from, ContainerId id) {
          if (from.column < 1 || from.column > next.columns() || next.height(from.column) != from.tier ||
              next.at(from) != id)
            throw IllegalMove(describe(move) + ": container is not on top of its column");
        };
        auto require_free = [&](Slot to) {
          if (to.column < 1 || to.column > next.columns() || next.full(to.column) ||
              next.height(to.column) + 1 != to.tier)
            throw IllegalMove(describe(move) + ": target is not the first empty tier");
        };
        if constexpr (std::is_same_v<T, Retrieve>) {
          require_top(m.from, m.id);
          next.pop(m.from.column);
          next.mark_retrieved(m.id);
        } else if constexpr (std::is_same_v<T, Stack>) {
          if (!next.pending(m.id)) throw IllegalMove(describe(move) + ": container is not waiting outside");
          require_free(m.to);
          next.push(m.to.column, m.id);
          next.clear_pending(m.id);
        } else if constexpr (std::is_same_v<T, Relocate>) {
          require_top(m.from, m.id);
          if (m.from.column == m.to.column) throw IllegalMove(describe(move) + ": same column");
          require_free(m.to);
          next.pop(m.from.column);
          next.push(m.to.column, m.id);
        }
      },
      move);
  next.set_clock(state.clock() + 1);
  return next;
}

BayState apply_move(const BayState& state, const Move& move, const Instance& instance) {
  if (auto why = move_violation(state, instance, move)) throw IllegalMove(describe(move) + ": " + *why);
  return apply_move(state, move);
}

bool all_tasks_done(const BayState& state, const Instance& instance) { return detail::RuleIndex(instance).done(state); }

Rational weighted_objective(const Instance& inst, int relocations, std::int64_t retrieval_delay,
                            std::int64_t stacking_delay) {
  return inst.weights.rel * Rational(relocations) + inst.weights.ret * Rational(retrieval_delay) +
         inst.weights.stack * Rational(stacking_delay);
}

PlanMetrics evaluate_plan(const Instance& instance, const Plan& plan) {
  const auto report = validate_bay(instance);
  if (!report.ok()) throw InfeasiblePlan(0, "invalid instance: " + report.summary());
  const detail::RuleIndex rules(instance);
  int horizon = 0;
  try {
    horizon = compute_horizon(instance);
  } catch (const NoFiniteTasks&) {
    horizon = 0;
  }

  const auto n = static_cast<std::size_t>(instance.size());
  PlanMetrics m;
  m.retrieval_time.assign(n, 0);
  m.stacking_time.assign(n, 0);
  m.retrieval_delay.assign(n, 0);
  m.stacking_delay.assign(n, 0);
  m.ooo_profile.assign(n, 0);

  for (int t = horizon + 1; t <= plan.length(); ++t) {
    if (!is_idle(plan.at(t))) throw InfeasiblePlan(t, describe(plan.at(t)) + " lies beyond the horizon T=" + std::to_string(horizon));
  }

  BayState s = BayState::initial(instance);
  for (int t = 1; t <= horizon; ++t) {
    const Move move = t <= plan.length() ? plan.at(t) : Move{Idle{}};
    if (auto why = detail::move_violation(s, rules, move)) throw InfeasiblePlan(t, describe(move) + ": " + *why);
    if (const auto* r = std::get_if<Retrieve>(&move)) {
      const auto i = static_cast<std::size_t>(r->id - 1);
      m.retrieval_time[i] = t;
      m.retrieval_delay[i] = t - rules.departure[r->id];
      m.total_delay += m.retrieval_delay[i];
    } else if (const auto* st = std::get_if<Stack>(&move)) {
      const auto i = static_cast<std::size_t>(st->id - 1);
      m.stacking_time[i] = t;
      m.stacking_delay[i] = t - rules.arrival[st->id];
      m.total_stacking_delay += m.stacking_delay[i];
    } else if (is_relocation(move)) {
      ++m.relocations;
    }
    s = apply_move(s, move);
  }
  for (const auto& c : instance.containers) {
    if (c.has_departure() && !s.retrieved(c.id)) throw InfeasiblePlan(0, "c" + c.name() + " is never retrieved");
    if (s.pending(c.id)) throw InfeasiblePlan(0, "c" + c.name() + " is never stacked");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!m.retrieval_time[i]) continue;
    for (std::size_t k = i + 1; k < n; ++k) {
      if (m.retrieval_time[k] && m.retrieval_time[k] < m.retrieval_time[i]) ++m.ooo_profile[i];
    }
  }
  m.objective = weighted_objective(instance, m.relocations, m.total_delay, m.total_stacking_delay);
  return m;
}

}  // namespace yardcrp
