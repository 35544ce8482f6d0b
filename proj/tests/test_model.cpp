#include <doctest.h>

#include "support.hpp"

using namespace yardcrp;
using yardcrp::testing::fixture;
using yardcrp::testing::open_windows;

namespace {

Instance bay_2x2() {
  Instance inst;
  inst.columns = 2;
  inst.tiers = 2;
  inst.containers = {
      {.id = 1, .initial = Slot{1, 1}, .departure = 1},
      {.id = 2, .initial = Slot{1, 2}, .departure = 2},
  };
  return inst;
}

}  // namespace

TEST_CASE("rational arithmetic stays normalized") {
  CHECK(Rational::parse("3/6") == Rational(1, 2));
  CHECK(Rational::parse("4") == Rational(4));
  CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
  CHECK(Rational(2, 3) * Rational(3, 4) == Rational(1, 2));
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(-2, -4).str() == "1/2");
  CHECK_THROWS(Rational(1, 0));
}

TEST_CASE("validate_bay reports each kind of defect") {
  SUBCASE("a well-formed bay passes") { CHECK(validate_bay(bay_2x2()).ok()); }
  SUBCASE("floating container") {
    auto inst = bay_2x2();
    inst.container(2).initial = Slot{2, 2};
    CHECK(validate_bay(inst).has(ViolationKind::Floating));
  }
  SUBCASE("two containers in one slot") {
    auto inst = bay_2x2();
    inst.container(2).initial = Slot{1, 1};
    CHECK(validate_bay(inst).has(ViolationKind::DuplicateSlot));
  }
  SUBCASE("slot outside the bay") {
    auto inst = bay_2x2();
    inst.container(2).initial = Slot{3, 1};
    CHECK(validate_bay(inst).has(ViolationKind::OutOfRange));
  }
  SUBCASE("departures must follow ids") {
    auto inst = bay_2x2();
    inst.container(1).departure = 5;
    CHECK(validate_bay(inst).has(ViolationKind::DepartureOrder));
  }
  SUBCASE("ids must be 1..N") {
    auto inst = bay_2x2();
    inst.container(2).id = 3;
    CHECK(validate_bay(inst).has(ViolationKind::NonContiguousIds));
  }
  SUBCASE("incoming container leaving before it arrives") {
    auto inst = bay_2x2();
    inst.containers.push_back({.id = 3, .departure = 4, .arrival = 6, .stacking_slack = 1});
    CHECK(validate_bay(inst).has(ViolationKind::ArrivalAfterDeparture));
  }
  SUBCASE("negative weight") {
    auto inst = bay_2x2();
    inst.weights.ret = Rational(-1);
    CHECK(validate_bay(inst).has(ViolationKind::NegativeWeight));
  }
}

TEST_CASE("apply_move moves tops and advances the clock") {
  const auto inst = bay_2x2();
  BayState s = BayState::initial(inst);
  CHECK(s.clock() == 1);
  CHECK(s.top(1) == 2);
  s = apply_move(s, Relocate{2, {1, 2}, {2, 1}});
  CHECK(s.clock() == 2);
  CHECK(s.top(1) == 1);
  CHECK(s.at({2, 1}) == 2);
  s = apply_move(s, Retrieve{1, {1, 1}});
  CHECK(s.retrieved(1));
  CHECK(s.height(1) == 0);
  CHECK_THROWS_AS(apply_move(s, Retrieve{1, {1, 1}}), IllegalMove);
}

TEST_CASE("legal_moves respects blocking, windows and the retrieval cap") {
  auto inst = bay_2x2();
  inst.container(1).retrieval_slack = 2;
  inst.container(2).retrieval_slack = 2;
  const auto s = BayState::initial(inst);
  bool retrieves = false;
  for (const auto& m : legal_moves(s, inst)) {
    if (const auto* r = std::get_if<Retrieve>(&m)) retrieves = retrieves || r->id == 2;
  }
  CHECK_FALSE(retrieves);  // c2 is on top but m = 0

  inst.flexibility = 1;
  auto moves = legal_moves(s, inst);
  CHECK(std::find(moves.begin(), moves.end(), Move{Retrieve{2, {1, 2}}}) == moves.end());  // d2 = 2 > t
  auto later = s;
  later.set_clock(2);
  moves = legal_moves(later, inst);
  CHECK(std::find(moves.begin(), moves.end(), Move{Retrieve{2, {1, 2}}}) != moves.end());
}

TEST_CASE("evaluate_plan reproduces the example table") {
  const auto inst = load_instance(fixture("flex_example.json"));
  const auto fcfs = load_plan(fixture("flex_example_fcfs.plan"), inst);
  const auto flex = load_plan(fixture("flex_example_m1.plan"), inst);

  const auto a = evaluate_plan(open_windows(inst, fcfs), fcfs);
  CHECK(a.relocations == 3);
  CHECK(a.total_delay == 22);
  CHECK(a.objective == Rational(25));
  CHECK(a.retrieval_delay == std::vector<int>{1, 2, 2, 2, 3, 3, 3, 3, 3});

  auto flexible = open_windows(inst, flex);
  flexible.flexibility = 1;
  const auto b = evaluate_plan(flexible, flex);
  CHECK(b.relocations == 1);
  CHECK(b.total_delay == 9);
  CHECK(b.retrieval_delay == std::vector<int>{1, 2, 0, 1, 2, 0, 1, 1, 1});
  CHECK(b.ooo_profile == std::vector<int>{0, 1, 0, 0, 1, 0, 0, 0, 0});

  // Without flexibility the second plan breaks the service order.
  flexible.flexibility = 0;
  CHECK_THROWS_AS(evaluate_plan(flexible, flex), InfeasiblePlan);
}

TEST_CASE("evaluate_plan rejects window and order violations") {
  auto inst = bay_2x2();
  inst.container(1).retrieval_slack = 1;
  inst.container(2).retrieval_slack = 1;

  Plan early;  // c2's truck is not there at t=1
  early.moves = {Retrieve{2, {1, 2}}};
  CHECK_THROWS_AS(evaluate_plan(inst, early), InfeasiblePlan);

  Plan late;  // c1 must leave by t=2
  late.moves = {Relocate{2, {1, 2}, {2, 1}}, Idle{}, Retrieve{1, {1, 1}}};
  try {
    evaluate_plan(inst, late);
    FAIL("expected an infeasible plan");
  } catch (const InfeasiblePlan& e) {
    CHECK(e.time_step() == 3);
  }

  Plan ok;
  ok.moves = {Relocate{2, {1, 2}, {2, 1}}, Retrieve{1, {1, 1}}, Retrieve{2, {2, 1}}};
  const auto m = evaluate_plan(inst, ok);
  CHECK(m.relocations == 1);
  CHECK(m.retrieval_delay == std::vector<int>{1, 1});
}

TEST_CASE("stacking respects arrival windows and group order") {
  Instance inst;
  inst.columns = 2;
  inst.tiers = 2;
  inst.containers = {
      {.id = 1, .departure = 5, .retrieval_slack = 3, .arrival = 1, .stacking_slack = 2},
      {.id = 2, .departure = 6, .retrieval_slack = 3, .arrival = 2, .stacking_slack = 2},
  };
  const auto s = BayState::initial(inst);
  CHECK(s.pending(1));
  CHECK(s.pending(2));
  // The later group cannot go first, even once it has arrived.
  auto t2 = s;
  t2.set_clock(2);
  CHECK(move_violation(t2, inst, Stack{2, {1, 1}}).has_value());
  CHECK_FALSE(move_violation(t2, inst, Stack{1, {1, 1}}).has_value());

  Plan plan;
  plan.moves = {Idle{}, Stack{1, {1, 1}}, Stack{2, {2, 1}}, Idle{}, Retrieve{1, {1, 1}}, Retrieve{2, {2, 1}}};
  const auto m = evaluate_plan(inst, plan);
  CHECK(m.stacking_delay == std::vector<int>{1, 1});
  CHECK(m.total_stacking_delay == 2);
  CHECK(m.objective == Rational(2));
}

TEST_CASE("horizon is the latest window end") {
  auto inst = bay_2x2();
  inst.container(1).retrieval_slack = 4;
  inst.container(2).retrieval_slack = 1;
  CHECK(compute_horizon(inst) == 5);
  inst.container(1).departure = kInfiniteTime;
  inst.container(2).departure = kInfiniteTime;
  CHECK_THROWS_AS(compute_horizon(inst), NoFiniteTasks);
}
