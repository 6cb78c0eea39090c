#pragma once

// MO-LavaGrid: a deterministic, wall-enclosed gridworld with three weighted
// goals, traversable lava and a per-step time cost. Rewards are ordered
// (goal, lava, time).

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "morlgen/momdp.hpp"

namespace morlgen::lavagrid {

enum class Tile : std::uint8_t { empty = 0, lava = 1, goal_green = 2, goal_yellow = 3, goal_blue = 4 };

/// MiniGrid orientation order: turning right adds one.
enum class Direction : std::uint8_t { east = 0, south = 1, west = 2, north = 3 };

enum Move : Action { turn_left = 0, turn_right = 1, forward = 2 };

inline constexpr std::size_t kActionCount = 3;
inline constexpr std::size_t kNumObjectives = 3;
inline constexpr std::size_t kGoalObjective = 0;
inline constexpr std::size_t kLavaObjective = 1;
inline constexpr std::size_t kTimeObjective = 2;
inline constexpr double kGoalReward = 100.0;
inline constexpr std::size_t kStepLimit = 256;
inline constexpr double kDiscount = 0.995;
inline constexpr int kStandardSize = 11;
inline constexpr std::uint8_t kAllGoals = 0b111;

/// Goal colors index weights and collected-mask bits: green 0, yellow 1, blue 2.
constexpr int goal_color(Tile t) noexcept {
  switch (t) {
    case Tile::goal_green: return 0;
    case Tile::goal_yellow: return 1;
    case Tile::goal_blue: return 2;
    default: return -1;
  }
}

struct Cell {
  int x = 0;
  int y = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

class Layout {
 public:
  /// All-empty grid, agent at (0, 0) facing east.
  Layout(int width = kStandardSize, int height = kStandardSize);

  /// Rows top to bottom using '.', 'L', 'G', 'Y', 'B'.
  static Layout from_rows(std::span<const std::string_view> rows, Cell agent, Direction dir);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool in_bounds(Cell c) const noexcept { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  Tile at(Cell c) const { return tiles_[index(c)]; }
  void set(Cell c, Tile t) { tiles_[index(c)] = t; }
  std::span<const Tile> tiles() const noexcept { return tiles_; }

  Cell agent_start() const noexcept { return start_; }
  Direction agent_dir() const noexcept { return dir_; }
  void set_agent(Cell c, Direction d) {
    start_ = c;
    dir_ = d;
  }

  std::optional<Cell> goal(int color) const;
  std::size_t lava_count() const;
  /// Bits of the goal colors present on the grid.
  std::uint8_t goals_present() const;
  /// Exactly one goal of each color.
  bool is_complete() const { return goals_present() == kAllGoals; }

  /// Throws EnvironmentError unless: agent start in bounds and on an empty
  /// tile, at most one goal per color, at least one goal.
  void validate() const;

  std::vector<std::string> rows() const;

  friend bool operator==(const Layout&, const Layout&) = default;

 private:
  std::size_t index(Cell c) const;

  int width_;
  int height_;
  std::vector<Tile> tiles_;
  Cell start_{};
  Direction dir_ = Direction::east;
};

struct GoalWeights {
  std::array<double, 3> w{1.0 / 3, 1.0 / 3, 1.0 / 3};  // green, yellow, blue

  void validate() const;
  friend bool operator==(const GoalWeights&, const GoalWeights&) = default;
};

struct Context {
  std::string name;
  Layout layout;
  GoalWeights weights;

  void validate() const {
    layout.validate();
    weights.validate();
  }
  friend bool operator==(const Context&, const Context&) = default;
};

/// Agent-dependent part of the state. Goals absent from a reduced layout
/// start out marked as collected.
struct AgentState {
  Cell pos;
  Direction dir = Direction::east;
  std::uint8_t collected = 0;
  friend bool operator==(const AgentState&, const AgentState&) = default;
};

struct Observation {
  std::shared_ptr<const Context> context;  // full tile grid, unchanged during an episode
  Cell position;
  Direction dir = Direction::east;
  /// Context weight for uncollected goals, exactly 0 once collected.
  std::array<double, 3> remaining_weights{};
  std::uint8_t collected = 0;

  std::span<const Tile> tiles() const { return context->layout.tiles(); }
};

AgentState initial_state(const Context& ctx);

struct StepOutcome {
  AgentState next;
  std::array<double, 3> reward{};
  bool all_collected = false;
};

/// Deterministic dynamics shared by the environment and the exact oracle.
StepOutcome apply_move(const Context& ctx, const AgentState& state, Action action);

class Env {
 public:
  using context_type = Context;
  using observation_type = Observation;

  explicit Env(std::size_t step_limit = kStepLimit);

  /// Validates the context. The stream is unused: episodes are deterministic.
  Observation reset(const Context& context, RandomStream& stream);
  Transition<Observation> step(Action action);

  std::size_t num_objectives() const noexcept { return kNumObjectives; }
  std::size_t action_count() const noexcept { return kActionCount; }
  std::size_t step_limit() const noexcept { return step_limit_; }
  std::size_t steps() const noexcept { return steps_; }
  const AgentState& state() const noexcept { return state_; }
  bool active() const noexcept { return active_; }

 private:
  Observation observe() const;

  std::size_t step_limit_;
  std::shared_ptr<const Context> context_;
  AgentState state_{};
  std::size_t steps_ = 0;
  bool active_ = false;
};

/// True when every goal can be reached from the start by 4-neighbour moves
/// (lava is passable, only the boundary blocks).
bool goals_reachable(const Layout& layout);

/// Uniform placement of lava, the three goals and the agent on distinct
/// cells, redrawn until all goals are reachable.
Layout random_layout(RandomStream& stream, int lava_min, int lava_max, int width = kStandardSize,
                     int height = kStandardSize, std::size_t max_attempts = 1000);

/// Domain-randomization space: start cell and orientation, lava count and
/// placement, goal placement and goal weights are all redrawn per sample.
struct RandomizationSpace {
  using context_type = Context;

  int width = kStandardSize;
  int height = kStandardSize;
  int lava_min = 0;
  int lava_max = 30;
  std::size_t max_attempts = 1000;

  Context sample(RandomStream& stream) const;
};

/// The eight named 11x11 evaluation contexts.
std::vector<Context> builtin_eval_contexts();
/// Horizon used with the micro suite; long enough for every goal route.
inline constexpr std::size_t kMicroHorizon = 32;
/// Five 5x5 contexts small enough for exact oracles and quick training.
std::vector<Context> micro_suite();
/// Looks up builtin and micro-suite contexts by name.
std::optional<Context> find_builtin(std::string_view name);

nlohmann::json context_to_json(const Context& ctx);
/// Throws FormatError describing the offending field.
Context context_from_json(const nlohmann::json& j);

char direction_code(Direction d);
Direction direction_from_code(char c);

/// ASCII picture of the grid; the agent is drawn as one of > v < ^.
std::string render(const Context& ctx, const std::optional<AgentState>& agent = std::nullopt);

}  // namespace morlgen::lavagrid
