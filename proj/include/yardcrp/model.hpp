#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "yardcrp/rational.hpp"

namespace yardcrp {

// Time-steps are 1-based. A departure of kInfiniteTime means the container
// may stay in the bay for the whole horizon and is never retrieved.
inline constexpr int kInfiniteTime = std::numeric_limits<int>::max();

inline constexpr int kMaxColumns = 16;
inline constexpr int kMaxTiers = 16;
inline constexpr int kMaxSlots = 64;
inline constexpr int kMaxContainers = 63;

using ContainerId = int;

/// Bay position; column in [1..C], tier in [1..P], tier 1 is the ground.
struct Slot {
  int column = 0;
  int tier = 0;
  friend auto operator<=>(const Slot&, const Slot&) = default;
};

struct ContainerSpec {
  ContainerId id = 0;
  std::optional<Slot> initial;  // empty: container arrives later and must be stacked
  int departure = kInfiniteTime;
  std::optional<int> retrieval_slack;
  int arrival = 0;  // incoming only
  std::optional<int> stacking_slack;
  std::string label;  // display name; falls back to the id

  bool incoming() const { return !initial.has_value(); }
  bool has_departure() const { return departure != kInfiniteTime; }
  std::string name() const { return label.empty() ? std::to_string(id) : label; }

  friend bool operator==(const ContainerSpec&, const ContainerSpec&) = default;
};

struct Weights {
  Rational rel{1};
  Rational ret{1};
  Rational stack{1};
  friend bool operator==(const Weights&, const Weights&) = default;
};

/// A complete problem: bay geometry, containers in service order, objective
/// weights and the out-of-order retrieval allowance m.
///
/// Ids are 1..N and follow departure order (ties broken by id), so the id is
/// also the container's rank in the first-come-first-served queue.
struct Instance {
  int columns = 0;
  int tiers = 0;
  std::vector<ContainerSpec> containers;
  Weights weights;
  int flexibility = 0;

  int size() const { return static_cast<int>(containers.size()); }
  const ContainerSpec& container(ContainerId id) const { return containers.at(static_cast<std::size_t>(id - 1)); }
  ContainerSpec& container(ContainerId id) { return containers.at(static_cast<std::size_t>(id - 1)); }
  bool dynamic() const;
  /// True when every task has an explicit window (retrieval slack for finite
  /// departures, stacking slack for incoming containers).
  bool windows_set() const;

  friend bool operator==(const Instance&, const Instance&) = default;
};

// ---------------------------------------------------------------------------
// Errors

class InfeasiblePlan : public std::runtime_error {
 public:
  InfeasiblePlan(int time_step, const std::string& what)
      : std::runtime_error(format(time_step, what)), time_step_(time_step) {}
  /// First offending time-step; 0 when the violation is not tied to a step.
  int time_step() const { return time_step_; }

 private:
  static std::string format(int t, const std::string& what) {
    return t > 0 ? "infeasible plan at t=" + std::to_string(t) + ": " + what : "infeasible plan: " + what;
  }
  int time_step_;
};

class IllegalMove : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class NoFiniteTasks : public std::runtime_error {
 public:
  NoFiniteTasks() : std::runtime_error("instance has no finite departure and no incoming container") {}
};

// ---------------------------------------------------------------------------
// Bay state

/// Occupancy of the bay at the start of time-step clock(), plus which
/// containers have left and which are still waiting outside to be stacked.
/// Trivially copyable; copies are cheap enough to pass by value.
class BayState {
 public:
  BayState() = default;
  BayState(int columns, int tiers);

  /// Layout at t=1. Throws std::invalid_argument if the layout is not a valid bay.
  static BayState initial(const Instance& instance);

  int columns() const { return columns_; }
  int tiers() const { return tiers_; }
  int clock() const { return clock_; }
  void set_clock(int t) { clock_ = t; }

  ContainerId at(Slot s) const { return grid_[index(s.column, s.tier)]; }
  int height(int column) const { return heights_[static_cast<std::size_t>(column - 1)]; }
  bool full(int column) const { return height(column) == tiers_; }
  /// 0 for an empty column.
  ContainerId top(int column) const { return height(column) == 0 ? 0 : at({column, height(column)}); }
  std::optional<Slot> find(ContainerId id) const;

  bool retrieved(ContainerId id) const { return (retrieved_ >> id) & 1U; }
  bool pending(ContainerId id) const { return (pending_ >> id) & 1U; }
  std::uint64_t retrieved_mask() const { return retrieved_; }
  std::uint64_t pending_mask() const { return pending_; }
  int retrieved_count() const;

  void push(int column, ContainerId id);
  ContainerId pop(int column);
  void mark_retrieved(ContainerId id) { retrieved_ |= bit(id); }
  void mark_pending(ContainerId id) { pending_ |= bit(id); }
  void clear_pending(ContainerId id) { pending_ &= ~bit(id); }

  /// Column-major raw grid, columns()*tiers() entries are meaningful.
  const std::array<std::uint8_t, kMaxSlots>& raw_grid() const { return grid_; }

  friend bool operator==(const BayState&, const BayState&) = default;

 private:
  static std::uint64_t bit(ContainerId id) { return std::uint64_t{1} << id; }
  std::size_t index(int column, int tier) const {
    return static_cast<std::size_t>((column - 1) * tiers_ + (tier - 1));
  }

  std::array<std::uint8_t, kMaxSlots> grid_{};
  std::array<std::uint8_t, kMaxColumns> heights_{};
  std::uint64_t retrieved_ = 0;
  std::uint64_t pending_ = 0;
  int clock_ = 1;
  std::uint8_t columns_ = 0;
  std::uint8_t tiers_ = 0;
};

// ---------------------------------------------------------------------------
// Moves and plans

struct Idle {
  friend bool operator==(const Idle&, const Idle&) = default;
};
struct Retrieve {
  ContainerId id = 0;
  Slot from;
  friend bool operator==(const Retrieve&, const Retrieve&) = default;
};
struct Stack {
  ContainerId id = 0;
  Slot to;
  friend bool operator==(const Stack&, const Stack&) = default;
};
struct Relocate {
  ContainerId id = 0;
  Slot from;
  Slot to;
  friend bool operator==(const Relocate&, const Relocate&) = default;
};

using Move = std::variant<Idle, Retrieve, Stack, Relocate>;

inline bool is_idle(const Move& m) { return std::holds_alternative<Idle>(m); }
inline bool is_relocation(const Move& m) { return std::holds_alternative<Relocate>(m); }
/// Container touched by the move, 0 for Idle.
ContainerId moved_container(const Move& m);
std::string describe(const Move& m);

/// One move per time-step; moves[0] is performed at t=1.
struct Plan {
  std::vector<Move> moves;
  int length() const { return static_cast<int>(moves.size()); }
  const Move& at(int t) const { return moves.at(static_cast<std::size_t>(t - 1)); }
  friend bool operator==(const Plan&, const Plan&) = default;
};

struct PlanMetrics {
  int relocations = 0;
  // Per-container vectors are indexed by id-1; 0 marks "never happened".
  std::vector<int> retrieval_time;
  std::vector<int> stacking_time;
  std::vector<int> retrieval_delay;
  std::vector<int> stacking_delay;
  int total_delay = 0;
  int total_stacking_delay = 0;
  Rational objective;
  std::vector<int> ooo_profile;  // out-of-order retrievals suffered by each container

  friend bool operator==(const PlanMetrics&, const PlanMetrics&) = default;
};

// ---------------------------------------------------------------------------
// Validation, horizon, move generation, evaluation

enum class ViolationKind {
  OutOfRange,
  DuplicateSlot,
  Floating,
  DuplicateId,
  NonContiguousIds,
  TooManyContainers,
  DepartureOrder,
  ArrivalAfterDeparture,
  BadWindow,
  BadGeometry,
  NegativeWeight,
};

std::string to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  ContainerId id = 0;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  bool has(ViolationKind kind) const;
  std::string summary() const;
};

ValidationReport validate_bay(const Instance& instance);

/// Largest window end over all tasks. Requires windows_set().
int compute_horizon(const Instance& instance);

/// Reason the move is not allowed at state.clock(), or nullopt if it is legal.
std::optional<std::string> move_violation(const BayState& state, const Instance& instance, const Move& move);

/// Every legal move at state.clock(): retrievals, stacks, relocations and Idle.
std::vector<Move> legal_moves(const BayState& state, const Instance& instance);

/// Structural application (tops, target tiers); advances the clock.
/// Throws IllegalMove when the move does not fit the occupancy.
BayState apply_move(const BayState& state, const Move& move);
/// As above but also checks windows, service order and stacking groups.
BayState apply_move(const BayState& state, const Move& move, const Instance& instance);

/// Replays the plan, checks every constraint and computes the metrics.
/// Plans shorter than the horizon are padded with Idle.
/// Throws InfeasiblePlan on the first violation.
PlanMetrics evaluate_plan(const Instance& instance, const Plan& plan);

/// w_rel*R + w_ret*sum(retrieval delay) + w_stack*sum(stacking delay).
Rational weighted_objective(const Instance& instance, int relocations, std::int64_t retrieval_delay,
                            std::int64_t stacking_delay);

/// Every finite-departure container retrieved and every incoming one stacked.
bool all_tasks_done(const BayState& state, const Instance& instance);

}  // namespace yardcrp
