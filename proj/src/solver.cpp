#include "yardcrp/solver.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstring>
#include <numeric>
#include <unordered_map>

#include "rules.hpp"
#include "yardcrp/bounds.hpp"

namespace yardcrp {

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::FeasibleTimeout: return "feasible-timeout";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Timeout: return "timeout";
  }
  return "unknown";
}

namespace {

using Cost = std::int64_t;
constexpr Cost kNoBound = std::numeric_limits<Cost>::max() / 4;
constexpr int kNone = std::numeric_limits<int>::max();

// Weights brought to a common denominator so the search works on integers.
struct ScaledWeights {
  Cost rel = 0;
  Cost ret = 0;
  Cost stack = 0;

  explicit ScaledWeights(const Weights& w) {
    const Cost l = std::lcm(std::lcm(w.rel.den(), w.ret.den()), w.stack.den());
    rel = w.rel.num() * (l / w.rel.den());
    ret = w.ret.num() * (l / w.ret.den());
    stack = w.stack.num() * (l / w.stack.den());
  }
};

// Limits on the next move inherited from the path so far. Both only remove
// moves that provably cannot lead to a strictly better plan:
//  - last: the container relocated by the previous move may not move again
//    (moving it twice in a row is one move wasted);
//  - wait: the crane has idled since this time-step, so the next real move
//    must be one that was not yet allowed back then (anything else could have
//    been done instead of the first Idle).
struct Restriction {
  int last = 0;
  int wait = 0;
  friend bool operator==(const Restriction&, const Restriction&) = default;
};

struct Key {
  std::array<std::uint64_t, kMaxSlots / 8> grid{};
  std::uint64_t retrieved = 0;
  Restriction limits;
  friend bool operator==(const Key&, const Key&) = default;
};

struct KeyHash {
  std::size_t operator()(const Key& k) const noexcept {
    std::uint64_t h = k.retrieved * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(k.limits.last) +
                      (static_cast<std::uint64_t>(k.limits.wait) << 8);
    for (std::uint64_t w : k.grid) {
      h ^= w + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
      h *= 0xBF58476D1CE4E5B9ULL;
    }
    return static_cast<std::size_t>(h ^ (h >> 31));
  }
};

// A closed node: the subtree below (state, clock, cost) has been searched.
struct Stamp {
  int clock;
  Cost cost;
};

// Columns are interchangeable (every relocation costs the same), so states
// that differ only by a column permutation share one key.
Key make_key(const BayState& s, Restriction limits) {
  const int columns = s.columns();
  const int tiers = s.tiers();
  const auto& raw = s.raw_grid();
  std::array<int, kMaxColumns> order{};
  std::iota(order.begin(), order.begin() + columns, 0);
  std::sort(order.begin(), order.begin() + columns, [&](int a, int b) {
    return std::lexicographical_compare(raw.begin() + a * tiers, raw.begin() + (a + 1) * tiers, raw.begin() + b * tiers,
                                        raw.begin() + (b + 1) * tiers);
  });
  std::array<std::uint8_t, kMaxSlots> canonical{};
  for (int i = 0; i < columns; ++i) {
    std::copy_n(raw.begin() + order[static_cast<std::size_t>(i)] * tiers, tiers, canonical.begin() + i * tiers);
  }
  Key k;
  std::memcpy(k.grid.data(), canonical.data(), kMaxSlots);
  k.retrieved = s.retrieved_mask();
  k.limits = limits;
  return k;
}

class Search {
 public:
  Search(const Instance& instance, const SolverParams& params, int horizon, Cost incumbent_bound)
      : rules_(instance),
        weights_(instance.weights),
        params_(params),
        horizon_(horizon),
        best_bound_(incumbent_bound),
        path_(static_cast<std::size_t>(horizon + 1)),
        buffers_(static_cast<std::size_t>(horizon + 2)),
        start_(std::chrono::steady_clock::now()) {
    int previous = 0;
    for (int id = 1; id <= rules_.n; ++id) {
      if (!rules_.finite(id)) continue;
      if (rules_.retrieval_deadline[id] < previous) monotone_deadlines_ = false;
      previous = rules_.retrieval_deadline[id];
    }
  }

  void run(const BayState& initial) { dfs(initial, 0, {}); }

  bool found() const { return found_; }
  bool aborted() const { return aborted_; }
  std::int64_t nodes() const { return nodes_; }
  const std::vector<Move>& best_moves() const { return best_moves_; }

 private:
  void dfs(const BayState& s, Cost g, Restriction limits) {
    if (aborted_) return;
    if ((++nodes_ & 1023) == 0) check_limits();
    if (aborted_) return;

    const int t = s.clock();
    if (rules_.done(s)) {
      if (g < best_bound_) {
        best_bound_ = g;
        found_ = true;
        best_moves_.assign(path_.begin(), path_.begin() + (t - 1));
      }
      return;
    }
    if (t > horizon_) return;

    const Cost lb = bound(s);
    if (lb >= kNoBound || g + lb >= best_bound_) return;

    Key key;
    if (params_.use_memo) {
      // A node with limits is also covered by the unrestricted one.
      key = make_key(s, limits);
      if (dominated(key, t, g)) return;
      if (limits != Restriction{}) {
        Key open = key;
        open.limits = {};
        if (dominated(open, t, g)) return;
      }
    }

    auto& moves = buffers_[static_cast<std::size_t>(t)];
    children(s, limits, moves);
    for (std::size_t i = 0; i < moves.size(); ++i) {
      const Move move = moves[i];
      path_[static_cast<std::size_t>(t - 1)] = move;
      BayState next = s;
      Cost step = 0;
      Restriction after;
      if (const auto* r = std::get_if<Retrieve>(&move)) {
        next.pop(r->from.column);
        next.mark_retrieved(r->id);
        step = weights_.ret * (t - rules_.departure[r->id]);
      } else if (const auto* st = std::get_if<Stack>(&move)) {
        next.push(st->to.column, st->id);
        next.clear_pending(st->id);
        step = weights_.stack * (t - rules_.arrival[st->id]);
      } else if (const auto* rl = std::get_if<Relocate>(&move)) {
        next.pop(rl->from.column);
        next.push(rl->to.column, rl->id);
        step = weights_.rel;
        after.last = rl->id;
      } else {
        after.wait = limits.wait ? limits.wait : t;
      }
      next.set_clock(t + 1);
      dfs(next, g + step, after);
      if (aborted_) return;
    }

    if (params_.use_memo) close(key, t, g);
  }

  bool dominated(const Key& key, int t, Cost g) const {
    const auto it = memo_.find(key);
    if (it == memo_.end()) return false;
    return std::any_of(it->second.begin(), it->second.end(),
                       [&](const Stamp& e) { return e.clock <= t && e.cost <= g; });
  }

  void close(const Key& key, int t, Cost g) {
    auto it = memo_.find(key);
    if (it == memo_.end()) {
      if (memo_.size() >= params_.memo_capacity) return;
      it = memo_.emplace(key, std::vector<Stamp>{}).first;
    }
    auto& list = it->second;
    std::erase_if(list, [&](const Stamp& e) { return t <= e.clock && g <= e.cost; });
    list.push_back({t, g});
  }

  void check_limits() {
    if (params_.node_limit && nodes_ >= *params_.node_limit) aborted_ = true;
    if (params_.time_limit) {
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
      if (elapsed.count() >= *params_.time_limit) aborted_ = true;
    }
  }

  // Smallest id in each column (kNone when empty).
  std::array<int, kMaxColumns + 1> column_minima(const BayState& s) const {
    std::array<int, kMaxColumns + 1> out{};
    for (int c = 1; c <= rules_.columns; ++c) {
      int best = kNone;
      for (int j = 1; j <= s.height(c); ++j) best = std::min(best, s.at({c, j}));
      out[static_cast<std::size_t>(c)] = best;
    }
    return out;
  }

  // Same ranking as preferred_columns(), with every empty column after the
  // leftmost one dropped: they lead to mirror-image states.
  int ranked_targets(const BayState& s, const std::array<int, kMaxColumns + 1>& minima, int id, int exclude,
                     std::array<int, kMaxColumns>& out) const {
    int count = 0;
    bool empty_taken = false;
    for (int c = 1; c <= rules_.columns; ++c) {
      if (c == exclude || s.full(c)) continue;
      if (s.height(c) == 0) {
        if (empty_taken) continue;
        empty_taken = true;
      }
      out[static_cast<std::size_t>(count++)] = c;
    }
    std::stable_sort(out.begin(), out.begin() + count, [&](int a, int b) {
      const int ka = minima[static_cast<std::size_t>(a)];
      const int kb = minima[static_cast<std::size_t>(b)];
      const bool ga = ka > id;
      const bool gb = kb > id;
      if (ga != gb) return ga;
      return ka > kb;
    });
    return count;
  }

  void children(const BayState& s, Restriction limits, std::vector<Move>& out) const {
    out.clear();
    const int t = s.clock();
    const int wait = limits.wait;
    const auto minima = column_minima(s);
    std::array<int, kMaxColumns> targets{};

    std::array<int, kMaxColumns> retrievable{};
    int nret = 0;
    // Serving anyone but the first in line uses up allowance that the first
    // in line still needs.
    const int first = first_in_line(s);
    const bool skip_allowed = s.retrieved_count() + 1 <= first - 1 + rules_.flexibility;
    for (int c = 1; c <= rules_.columns; ++c) {
      const int top = s.top(c);
      if (top && rules_.may_retrieve(s, top) && rules_.departure[top] > wait && (top == first || skip_allowed))
        retrievable[static_cast<std::size_t>(nret++)] = top;
    }
    std::sort(retrievable.begin(), retrievable.begin() + nret);

    // With nothing left to stack and deadlines ordered like the queue, the
    // first container in line is served as soon as it can be: any plan that
    // postpones it does no better after moving its retrieval forward.
    if (nret > 0 && monotone_deadlines_ && s.pending_mask() == 0 && retrievable[0] == first) {
      out.emplace_back(Retrieve{retrievable[0], {0, 0}});
      fill_slot(s, out.back());
      return;
    }
    for (int i = 0; i < nret; ++i) {
      out.emplace_back(Retrieve{retrievable[static_cast<std::size_t>(i)], {0, 0}});
      fill_slot(s, out.back());
    }

    for (int id = rules_.n; id >= 1; --id) {
      if (!rules_.may_stack(s, id) || rules_.arrival[id] <= wait) continue;
      const int k = ranked_targets(s, minima, id, 0, targets);
      for (int i = 0; i < k; ++i) {
        const int c = targets[static_cast<std::size_t>(i)];
        out.emplace_back(Stack{id, {c, s.height(c) + 1}});
      }
    }

    if (wait == 0) {
      // Sources: the column holding the most urgent finite container first.
      std::array<std::pair<int, int>, kMaxColumns> sources{};
      int nsrc = 0;
      for (int c = 1; c <= rules_.columns; ++c) {
        const int top = s.top(c);
        if (!top || top == limits.last) continue;
        int urgent = kNone;
        for (int j = 1; j <= s.height(c); ++j) {
          const int id = s.at({c, j});
          if (rules_.finite(id)) urgent = std::min(urgent, id);
        }
        sources[static_cast<std::size_t>(nsrc++)] = {urgent, c};
      }
      std::stable_sort(sources.begin(), sources.begin() + nsrc,
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      for (int i = 0; i < nsrc; ++i) {
        const int from = sources[static_cast<std::size_t>(i)].second;
        const int top = s.top(from);
        const int k = ranked_targets(s, minima, top, from, targets);
        for (int j = 0; j < k; ++j) {
          const int to = targets[static_cast<std::size_t>(j)];
          out.emplace_back(Relocate{top, {from, s.height(from)}, {to, s.height(to) + 1}});
        }
      }
    }

    // Waiting only helps while some task is not released yet; otherwise the
    // rest of the plan can always be shifted one step earlier.
    bool unreleased = false;
    for (int id = 1; id <= rules_.n && !unreleased; ++id) {
      if (rules_.finite(id) && !s.retrieved(id) && rules_.departure[id] > t) unreleased = true;
      if (s.pending(id) && rules_.arrival[id] > t) unreleased = true;
    }
    if (unreleased) out.emplace_back(Idle{});
  }

  int first_in_line(const BayState& s) const {
    for (int id = 1; id <= rules_.n; ++id) {
      if (rules_.finite(id) && !s.retrieved(id)) return id;
    }
    return 0;
  }

  static void fill_slot(const BayState& s, Move& move) {
    auto& r = std::get<Retrieve>(move);
    for (int c = 1; c <= s.columns(); ++c) {
      if (s.top(c) == r.id) r.from = {c, s.height(c)};
    }
  }

  // Admissible estimate of the cost still to come, or kNoBound when some
  // window can no longer be met.
  Cost bound(const BayState& s) const {
    const int t = s.clock();
    const int n = rules_.n;
    const int m = rules_.flexibility;
    // The first in line can no longer be served within the allowance.
    if (const int first = first_in_line(s); first && s.retrieved_count() > first - 1 + m) return kNoBound;

    std::array<int, kMaxContainers + 1> above{};  // containers stacked over id (in-bay only)
    std::array<bool, kMaxContainers + 1> in_bay{};
    std::array<int, kMaxContainers + 2> blockers{};  // by the id they must clear first
    int relocations = 0;
    for (int c = 1; c <= rules_.columns; ++c) {
      const int h = s.height(c);
      int lowest_finite = kNone;
      int best = 0;
      for (int j = 1; j <= h; ++j) {
        const int id = s.at({c, j});
        in_bay[static_cast<std::size_t>(id)] = true;
        above[static_cast<std::size_t>(id)] = h - j;
        if (m == 0) {
          // id sits over lowest_finite and leaves later: it must move before
          // lowest_finite, and hence every later container, can be served.
          if (lowest_finite < id) {
            ++relocations;
            ++blockers[static_cast<std::size_t>(lowest_finite)];
          }
        } else if (rules_.finite(id)) {
          int later_finite = 0;
          int never_leaving = 0;
          for (int k = j + 1; k <= h; ++k) {
            const int x = s.at({c, k});
            if (x <= id) continue;
            if (rules_.finite(x)) {
              ++later_finite;
            } else {
              ++never_leaving;
            }
          }
          best = std::max(best, never_leaving + std::max(0, later_finite - m));
        }
        if (rules_.finite(id)) lowest_finite = std::min(lowest_finite, id);
      }
      relocations += best;
    }

    // Retrieval delay.
    Cost retrieval = 0;
    int remaining = 0;
    int pending_finite = 0;
    std::array<int, kMaxContainers> release{};
    int last_slot = t - 1;
    {
      int before = 0;         // remaining finite ids below the current one
      int stacks_before = 0;  // pending finite ids up to the current one
      int running_blockers = 0;
      int prev = t - 1;
      for (int id = 1; id <= n; ++id) {
        running_blockers += blockers[static_cast<std::size_t>(id)];
        if (!rules_.finite(id) || s.retrieved(id)) continue;
        int r = rules_.departure[id];
        if (in_bay[static_cast<std::size_t>(id)]) {
          r = std::max(r, t + above[static_cast<std::size_t>(id)]);
        } else {
          r = std::max(r, std::max(t, rules_.arrival[id]) + 1);
          ++stacks_before;
          ++pending_finite;
        }
        if (r > rules_.retrieval_deadline[id]) return kNoBound;
        if (m == 0) {
          const int slot = std::max({prev + 1, r, t + before + running_blockers + stacks_before});
          if (slot > rules_.retrieval_deadline[id]) return kNoBound;
          retrieval += slot - rules_.departure[id];
          prev = slot;
          last_slot = slot;
        } else {
          release[static_cast<std::size_t>(remaining)] = r;
        }
        ++before;
        ++remaining;
      }
      if (m > 0 && remaining > 0) {
        std::sort(release.begin(), release.begin() + remaining);
        int cur = t - 1;
        for (int i = 0; i < remaining; ++i) {
          cur = std::max(cur + 1, release[static_cast<std::size_t>(i)]);
          retrieval += cur;
        }
        for (int id = 1; id <= n; ++id) {
          if (rules_.finite(id) && !s.retrieved(id)) retrieval -= rules_.departure[id];
        }
        last_slot = cur;
      }
      // Every retrieval, required relocation and stack of a finite container
      // happens no later than the last retrieval.
      if (remaining > 0) {
        const int makespan = t - 1 + remaining + relocations + pending_finite;
        if (makespan > last_slot) retrieval += makespan - last_slot;
      }
    }

    // Stacking delay: groups in arrival order, earliest deadline first inside.
    Cost stacking = 0;
    if (s.pending_mask() != 0) {
      std::array<std::pair<int, int>, kMaxContainers> pending{};  // (arrival, deadline)
      int np = 0;
      for (int id = 1; id <= n; ++id) {
        if (s.pending(id)) pending[static_cast<std::size_t>(np++)] = {rules_.arrival[id], rules_.stacking_deadline[id]};
      }
      std::sort(pending.begin(), pending.begin() + np);
      int cur = t - 1;
      for (int i = 0; i < np; ++i) {
        const auto [a, deadline] = pending[static_cast<std::size_t>(i)];
        cur = std::max(cur + 1, a);
        if (cur > deadline) return kNoBound;
        stacking += cur - a;
      }
    }

    return weights_.rel * relocations + weights_.ret * retrieval + weights_.stack * stacking;
  }

  detail::RuleIndex rules_;
  ScaledWeights weights_;
  SolverParams params_;
  int horizon_;
  Cost best_bound_;
  bool found_ = false;
  bool aborted_ = false;
  std::int64_t nodes_ = 0;
  std::vector<Move> path_;
  std::vector<Move> best_moves_;
  std::vector<std::vector<Move>> buffers_;
  std::unordered_map<Key, std::vector<Stamp>, KeyHash> memo_;
  std::chrono::steady_clock::time_point start_;
  bool monotone_deadlines_ = true;
};

int horizon_of(const Instance& instance) {
  try {
    return compute_horizon(instance);
  } catch (const NoFiniteTasks&) {
    return 0;
  }
}

}  // namespace

SolveResult solve(const Instance& instance, const SolverParams& params) {
  const auto report = validate_bay(instance);
  if (!report.ok()) throw std::invalid_argument(report.summary());

  SolveResult result;
  result.instance = resolve_windows(instance);
  const Instance& inst = result.instance;
  result.horizon = horizon_of(inst);

  const ScaledWeights w(inst.weights);
  std::optional<Plan> fallback;
  Cost bound = kNoBound;
  try {
    auto h = heuristic_plan(inst);
    const auto metrics = evaluate_plan(inst, h.plan);
    fallback = std::move(h.plan);
    bound = w.rel * metrics.relocations + w.ret * metrics.total_delay + w.stack * metrics.total_stacking_delay + 1;
  } catch (const NoRelocationSpace&) {
  } catch (const InfeasiblePlan&) {
  }

  Search search(inst, params, result.horizon, bound);
  search.run(BayState::initial(inst));
  result.nodes = search.nodes();

  if (search.found()) {
    result.plan.moves = search.best_moves();
    result.status = search.aborted() ? SolveStatus::FeasibleTimeout : SolveStatus::Optimal;
  } else if (fallback) {
    // Only reachable on a limit: the search admits plans as good as this one.
    result.plan = *fallback;
    result.status = search.aborted() ? SolveStatus::FeasibleTimeout : SolveStatus::Optimal;
  } else {
    result.status = search.aborted() ? SolveStatus::Timeout : SolveStatus::Infeasible;
    return result;
  }
  result.metrics = evaluate_plan(inst, result.plan);
  return result;
}

}  // namespace yardcrp
