#include <map>

#include "yardcrp/bounds.hpp"
#include "yardcrp/solver.hpp"

namespace yardcrp {

namespace {

int horizon_or_zero(const Instance& instance) {
  try {
    return compute_horizon(instance);
  } catch (const NoFiniteTasks&) {
    return 0;
  }
}

struct Node {
  BayState state;
  Rational cost;
  int parent = -1;
  Move move = Idle{};
};

Rational step_cost(const Instance& instance, const Move& move, int t) {
  if (is_relocation(move)) return instance.weights.rel;
  if (const auto* r = std::get_if<Retrieve>(&move))
    return instance.weights.ret * Rational(t - instance.container(r->id).departure);
  if (const auto* s = std::get_if<Stack>(&move))
    return instance.weights.stack * Rational(t - instance.container(s->id).arrival);
  return Rational(0);
}

}  // namespace

bool within_oracle_guard(const Instance& instance) {
  if (instance.columns * instance.tiers > kOracleMaxSlots || instance.size() > kOracleMaxContainers) return false;
  return horizon_or_zero(resolve_windows(instance)) <= kOracleMaxHorizon;
}

SolveResult brute_force(const Instance& instance, const SolverParams& /*params*/) {
  const auto report = validate_bay(instance);
  if (!report.ok()) throw std::invalid_argument(report.summary());
  if (!within_oracle_guard(instance)) throw TooLarge("instance is too large for exhaustive search");

  SolveResult result;
  result.instance = resolve_windows(instance);
  const Instance& inst = result.instance;
  const int horizon = horizon_or_zero(inst);
  result.horizon = horizon;

  // layers[t-1] holds every distinct state reachable at the start of step t.
  std::vector<std::vector<Node>> layers(1);
  layers[0].push_back({BayState::initial(inst), Rational(0), -1, Idle{}});

  std::optional<std::pair<int, int>> best;  // (layer, index)
  Rational best_cost;
  for (int t = 1;; ++t) {
    auto& layer = layers[static_cast<std::size_t>(t - 1)];
    for (int i = 0; i < static_cast<int>(layer.size()); ++i) {
      const Node& node = layer[static_cast<std::size_t>(i)];
      if (all_tasks_done(node.state, inst) && (!best || node.cost < best_cost)) {
        best = {t - 1, i};
        best_cost = node.cost;
      }
    }
    if (t > horizon) break;

    std::vector<Node> next;
    std::map<std::pair<std::array<std::uint8_t, kMaxSlots>, std::uint64_t>, std::size_t> seen;
    for (int i = 0; i < static_cast<int>(layer.size()); ++i) {
      const Node& node = layer[static_cast<std::size_t>(i)];
      ++result.nodes;
      if (all_tasks_done(node.state, inst)) continue;
      for (const Move& move : legal_moves(node.state, inst)) {
        BayState after = apply_move(node.state, move, inst);
        const Rational cost = node.cost + step_cost(inst, move, t);
        const auto key = std::make_pair(after.raw_grid(), after.retrieved_mask());
        const auto it = seen.find(key);
        if (it == seen.end()) {
          seen.emplace(key, next.size());
          next.push_back({after, cost, i, move});
        } else if (cost < next[it->second].cost) {
          next[it->second] = {after, cost, i, move};
        }
      }
    }
    layers.push_back(std::move(next));
  }

  if (!best) {
    result.status = SolveStatus::Infeasible;
    return result;
  }
  std::vector<Move> reversed;
  for (auto [layer, index] = *best; layer > 0;) {
    const Node& node = layers[static_cast<std::size_t>(layer)][static_cast<std::size_t>(index)];
    reversed.push_back(node.move);
    index = node.parent;
    --layer;
  }
  result.plan.moves.assign(reversed.rbegin(), reversed.rend());
  result.metrics = evaluate_plan(inst, result.plan);
  result.status = SolveStatus::Optimal;
  return result;
}

}  // namespace yardcrp
