#include <doctest.h>

#include "support.hpp"

using namespace yardcrp;
using namespace yardcrp::testing;

TEST_CASE("heuristic plan on the example bay") {
  const auto inst = load_instance(fixture("flex_example.json"));
  const auto h = heuristic_plan(inst);
  CHECK(h.relocations == 3);
  const auto m = evaluate_plan(open_windows(inst, h.plan), h.plan);
  CHECK(m.relocations == h.relocations);
  CHECK(m.total_delay == h.metrics.total_delay);
}

TEST_CASE("default windows are H plus the truck's lateness in the queue") {
  auto inst = load_instance(fixture("flex_example.json"));
  auto w = default_windows(inst, 3);
  REQUIRE(w.size() == 9);
  for (const auto& v : w) CHECK(v == 3);

  // Trucks arriving before their turn get extra room.
  inst.container(5).departure = 4;
  w = default_windows(inst, 3);
  CHECK(w[4] == 4);
}

TEST_CASE("resolve_windows keeps explicit slacks") {
  auto inst = load_instance(fixture("tradeoff.json"));
  inst.container(2).retrieval_slack = 7;
  const auto r = resolve_windows(inst);
  CHECK(r.windows_set());
  CHECK(r.container(2).retrieval_slack == 7);
  for (const auto& c : r.containers) CHECK(c.retrieval_slack.value() >= 0);
}

TEST_CASE("relocation lower bound never exceeds a feasible plan") {
  int checked = 0;
  for (std::uint64_t seed = 1; checked < 60 && seed < 400; ++seed) {
    auto inst = small_instance(seed);
    if (!inst || !within_oracle_guard(*inst)) continue;
    const auto exact = brute_force(*inst);
    if (exact.status != SolveStatus::Optimal) continue;
    CAPTURE(seed);
    CHECK(lower_bound_relocations(BayState::initial(exact.instance), exact.instance) <= exact.metrics.relocations);
    ++checked;
  }
  CHECK(checked >= 40);
}

TEST_CASE("tightened windows keep the optimal relocation count") {
  int checked = 0;
  for (std::uint64_t seed = 1; checked < 25; ++seed) {
    GeneratorConfig g;
    g.seed = seed;
    g.columns = 3;
    g.tiers = 3;
    g.filled_tiers = 2;
    g.weights.ret = Rational(0);
    const auto inst = generate(g);
    auto wide = inst;
    for (auto& c : wide.containers) c.retrieval_slack = 3 * inst.size();
    CAPTURE(seed);
    const auto a = solve(inst);
    const auto b = solve(wide);
    REQUIRE(a.status == SolveStatus::Optimal);
    REQUIRE(b.status == SolveStatus::Optimal);
    CHECK(a.metrics.relocations == b.metrics.relocations);
    ++checked;
  }
}

TEST_CASE("compute_bounds on the small trade-off bay") {
  const auto b = compute_bounds(load_instance(fixture("tradeoff.json")));
  CHECK(b.H == 1);
  CHECK(b.lb == 1);
  REQUIRE(b.delta_star.size() == 6);
}

TEST_CASE("preferred columns: good columns first, then the least bad") {
  Instance inst;
  inst.columns = 3;
  inst.tiers = 3;
  inst.containers = {
      {.id = 1, .initial = Slot{1, 1}, .departure = 1},
      {.id = 2, .initial = Slot{2, 1}, .departure = 2},
      {.id = 3, .initial = Slot{3, 1}, .departure = 3},
      {.id = 4, .initial = Slot{3, 2}, .departure = 4},
  };
  const auto s = BayState::initial(inst);
  // Moving c4 off column 3: no column has only later ids; column 2 (c2) beats column 1 (c1).
  CHECK(preferred_columns(s, 4, 3) == std::vector<int>{2, 1});
}
