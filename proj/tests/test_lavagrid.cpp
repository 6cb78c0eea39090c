#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "morlgen/lavagrid.hpp"
#include "support.hpp"

using namespace morlgen;
using namespace morlgen::lavagrid;

namespace {

Context from_rows(std::vector<std::string_view> rows, Cell agent, Direction dir, std::array<double, 3> w) {
  Context ctx{"test", Layout::from_rows(rows, agent, dir), GoalWeights{w}};
  ctx.validate();
  return ctx;
}

}  // namespace

TEST_CASE("step examples") {
  RandomStream s(0, 0);
  Env env;
  const auto ctx = from_rows({"..G..", "....Y", "L...B"}, {0, 0}, Direction::east, {0.5, 0.3, 0.2});
  env.reset(ctx, s);

  auto t = env.step(forward);
  CHECK(t.reward == ValueVector{0, 0, -1});
  CHECK_FALSE(t.terminal);

  t = env.step(forward);
  CHECK(t.reward == ValueVector{50, 0, -1});
  CHECK(t.next_observation.remaining_weights[0] == 0.0);
  CHECK(t.next_observation.remaining_weights[1] == 0.3);
  CHECK(t.next_observation.collected == 0b001);

  // stepping back onto the collected goal cell pays nothing
  env.step(turn_left);
  env.step(turn_left);
  env.step(forward);
  env.step(turn_left);
  env.step(turn_left);
  t = env.step(forward);
  CHECK(t.reward == ValueVector{0, 0, -1});
}

TEST_CASE("lava is charged per timestep, including turns") {
  RandomStream s(0, 0);
  Env env;
  const auto ctx = from_rows({".L.G"}, {0, 0}, Direction::east, {1, 0, 0});
  env.reset(ctx, s);
  CHECK(env.step(forward).reward == ValueVector{0, -1, -1});
  CHECK(env.step(turn_left).reward == ValueVector{0, -1, -1});
  CHECK(env.step(turn_right).reward == ValueVector{0, -1, -1});
  CHECK(env.step(forward).reward == ValueVector{0, 0, -1});
  const auto last = env.step(forward);
  CHECK(last.reward == ValueVector{100, 0, -1});
  CHECK(last.terminal);
  CHECK_THROWS_AS(env.step(forward), EnvironmentError);
}

TEST_CASE("walls block forward moves") {
  RandomStream s(0, 0);
  Env env;
  const auto ctx = from_rows({"...", "..G"}, {0, 0}, Direction::north, {1, 0, 0});
  env.reset(ctx, s);
  const auto t = env.step(forward);
  CHECK(t.next_observation.position == Cell{0, 0});
  CHECK(t.reward == ValueVector{0, 0, -1});
}

TEST_CASE("reset and truncation") {
  RandomStream s(0, 0);
  Env env(5);
  const auto ctx = *find_builtin("Room");
  const auto obs = env.reset(ctx, s);
  CHECK(obs.position == ctx.layout.agent_start());
  CHECK(obs.dir == ctx.layout.agent_dir());
  CHECK(obs.remaining_weights == ctx.weights.w);
  CHECK(obs.collected == 0);
  Transition<Observation> t{obs, ValueVector::zeros(3)};
  for (int i = 0; i < 5; ++i) t = env.step(turn_left);
  CHECK(t.truncated);
  CHECK_FALSE(t.terminal);
  CHECK_FALSE(env.active());
  CHECK_THROWS_AS(env.step(turn_left), EnvironmentError);
  env.reset(ctx, s);
  CHECK(env.active());
  CHECK(env.steps() == 0);
  CHECK_THROWS_AS(env.step(3), EnvironmentError);
}

TEST_CASE("builtin contexts carry the expected goal weights") {
  const std::map<std::string, std::array<double, 3>> expected{
      {"Snake", {0.20, 0.30, 0.50}},        {"Room", {0.50, 0.30, 0.20}},
      {"Smiley", {0.40, 0.40, 0.20}},       {"Maze", {0.05, 0.05, 0.90}},
      {"CheckerBoard", {0.30, 0.10, 0.60}}, {"Corridor", {0.60, 0.10, 0.30}},
      {"Islands", {1.0 / 3, 1.0 / 3, 1.0 / 3}}, {"Labyrinth", {0.50, 0.05, 0.45}},
  };
  const auto builtins = builtin_eval_contexts();
  REQUIRE(builtins.size() == 8);
  for (const auto& ctx : builtins) {
    INFO(ctx.name);
    REQUIRE(expected.count(ctx.name) == 1);
    CHECK(ctx.weights.w == expected.at(ctx.name));
    CHECK(ctx.layout.width() == 11);
    CHECK(ctx.layout.height() == 11);
    CHECK(ctx.layout.is_complete());
    CHECK_NOTHROW(ctx.validate());
    CHECK(testing_support::bfs_all_goals_reachable(ctx.layout));
  }
  CHECK(find_builtin("Maze")->weights.w == std::array<double, 3>{0.05, 0.05, 0.90});
  CHECK(find_builtin("Room")->weights.w == std::array<double, 3>{0.50, 0.30, 0.20});
  CHECK_FALSE(find_builtin("Nowhere").has_value());
}

TEST_CASE("micro suite contexts are small and complete") {
  const auto suite = micro_suite();
  CHECK(suite.size() == 5);
  for (const auto& ctx : suite) {
    CHECK(ctx.layout.width() <= 5);
    CHECK(ctx.layout.height() <= 5);
    CHECK(ctx.layout.is_complete());
    CHECK(testing_support::bfs_all_goals_reachable(ctx.layout));
    CHECK(find_builtin(ctx.name) == ctx);
  }
}

TEST_CASE("random layouts: no-lava range, distinct cells, BFS reachability") {
  RandomStream s(11, 0);
  for (int i = 0; i < 20; ++i) CHECK(random_layout(s, 0, 0).lava_count() == 0);
  int failures = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto layout = random_layout(s, 0, 30);
    int goals = 0;
    for (auto t : layout.tiles()) goals += goal_color(t) >= 0;
    failures += goals != 3 || !layout.is_complete() || layout.at(layout.agent_start()) != Tile::empty ||
                layout.lava_count() > 30 || !testing_support::bfs_all_goals_reachable(layout);
  }
  CHECK(failures == 0);
  CHECK_THROWS_AS(random_layout(s, 10, 5), std::invalid_argument);
  CHECK_THROWS_AS(random_layout(s, 200, 200), BudgetExceededError);
}

TEST_CASE("layout validation errors") {
  CHECK_THROWS_AS(Layout::from_rows(std::vector<std::string_view>{"..X"}, {0, 0}, Direction::east), FormatError);
  CHECK_THROWS_AS(Layout::from_rows(std::vector<std::string_view>{"...", ".."}, {0, 0}, Direction::east),
                  FormatError);
  CHECK_THROWS_AS(Layout::from_rows(std::vector<std::string_view>{"GG."}, {2, 0}, Direction::east).validate(),
                  EnvironmentError);
  CHECK_THROWS_AS(Layout::from_rows(std::vector<std::string_view>{"L.G"}, {0, 0}, Direction::east).validate(),
                  EnvironmentError);
  CHECK_THROWS_AS(Layout::from_rows(std::vector<std::string_view>{"..."}, {0, 0}, Direction::east).validate(),
                  EnvironmentError);
  CHECK_THROWS_AS((GoalWeights{{0.5, 0.5, 0.5}}.validate()), EnvironmentError);
  CHECK_THROWS_AS((GoalWeights{{1.5, -0.5, 0.0}}.validate()), EnvironmentError);
}

TEST_CASE("context JSON round-trip and errors") {
  for (const auto& ctx : builtin_eval_contexts()) CHECK(context_from_json(context_to_json(ctx)) == ctx);
  auto j = context_to_json(*find_builtin("Maze"));
  j.erase("weights");
  CHECK_THROWS_AS(context_from_json(j), FormatError);
  CHECK_THROWS_AS(context_from_json(nlohmann::json::array()), FormatError);
}

TEST_CASE("episode invariants under random action sequences") {
  RandomStream s(21, 0);
  const auto contexts = builtin_eval_contexts();
  for (int episode = 0; episode < 200; ++episode) {
    const auto& ctx = contexts[episode % contexts.size()];
    Env env;
    auto obs = env.reset(ctx, s);
    double time = 0.0, goal = 0.0;
    std::size_t steps = 0;
    bool terminal = false;
    // Biased toward forward moves so some episodes collect every goal.
    while (env.active()) {
      const Action a = s.uniform() < 0.6 ? forward : static_cast<Action>(s.uniform_index(2));
      const auto before = obs;
      const auto t = env.step(a);
      ++steps;
      time += t.reward[kTimeObjective];
      goal += t.reward[kGoalObjective];
      if (a != forward) CHECK(t.next_observation.position == before.position);
      if (a == forward) CHECK(t.next_observation.dir == before.dir);
      terminal = t.terminal;
      obs = t.next_observation;
    }
    CHECK(steps <= kStepLimit);
    CHECK(time == -static_cast<double>(steps));
    if (terminal) CHECK(goal == doctest::Approx(100.0).epsilon(1e-12));
  }
}

TEST_CASE("four turns in one direction restore orientation") {
  const auto ctx = *find_builtin("Islands");
  AgentState st = initial_state(ctx);
  for (Action a : {turn_left, turn_right}) {
    AgentState cur = st;
    for (int i = 0; i < 4; ++i) cur = apply_move(ctx, cur, a).next;
    CHECK(cur == st);
  }
}

TEST_CASE("identical action sequences give identical trajectories") {
  const auto ctx = *find_builtin("Labyrinth");
  RandomStream actions(4, 4), unused(0, 0);
  std::vector<Action> seq;
  for (int i = 0; i < 256; ++i) seq.push_back(static_cast<Action>(actions.uniform_index(3)));
  std::vector<ValueVector> first, second;
  for (auto* out : {&first, &second}) {
    Env env;
    env.reset(ctx, unused);
    for (Action a : seq) {
      if (!env.active()) break;
      out->push_back(env.step(a).reward);
    }
  }
  CHECK(first == second);
}

TEST_CASE("render draws the agent") {
  const auto ctx = from_rows({"..G"}, {0, 0}, Direction::east, {1, 0, 0});
  CHECK(render(ctx).find('>') != std::string::npos);
}
