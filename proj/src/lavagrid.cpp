#include "morlgen/lavagrid.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <sstream>

#include "morlgen/aggregate.hpp"

namespace morlgen::lavagrid {

namespace {

Tile tile_from_code(char c) {
  switch (c) {
    case '.': return Tile::empty;
    case 'L': return Tile::lava;
    case 'G': return Tile::goal_green;
    case 'Y': return Tile::goal_yellow;
    case 'B': return Tile::goal_blue;
    default: throw FormatError(std::string("unknown tile code '") + c + "'");
  }
}

char tile_code(Tile t) {
  switch (t) {
    case Tile::empty: return '.';
    case Tile::lava: return 'L';
    case Tile::goal_green: return 'G';
    case Tile::goal_yellow: return 'Y';
    case Tile::goal_blue: return 'B';
  }
  return '?';
}

Cell ahead(Cell c, Direction d) {
  switch (d) {
    case Direction::east: return {c.x + 1, c.y};
    case Direction::south: return {c.x, c.y + 1};
    case Direction::west: return {c.x - 1, c.y};
    case Direction::north: return {c.x, c.y - 1};
  }
  return c;
}

constexpr Tile kGoalTiles[3] = {Tile::goal_green, Tile::goal_yellow, Tile::goal_blue};

}  // namespace

// ---------------------------------------------------------------------------
// Layout

Layout::Layout(int width, int height) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) throw EnvironmentError("Layout: non-positive grid size");
  tiles_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), Tile::empty);
}

Layout Layout::from_rows(std::span<const std::string_view> rows, Cell agent, Direction dir) {
  if (rows.empty()) throw FormatError("layout: no rows");
  Layout layout(static_cast<int>(rows.front().size()), static_cast<int>(rows.size()));
  for (std::size_t y = 0; y < rows.size(); ++y) {
    if (rows[y].size() != rows.front().size()) {
      throw FormatError("layout row " + std::to_string(y) + ": expected " +
                        std::to_string(rows.front().size()) + " tiles, got " +
                        std::to_string(rows[y].size()));
    }
    for (std::size_t x = 0; x < rows[y].size(); ++x) {
      layout.set({static_cast<int>(x), static_cast<int>(y)}, tile_from_code(rows[y][x]));
    }
  }
  layout.set_agent(agent, dir);
  return layout;
}

std::size_t Layout::index(Cell c) const {
  if (!in_bounds(c)) {
    throw EnvironmentError("cell (" + std::to_string(c.x) + "," + std::to_string(c.y) +
                           ") out of bounds");
  }
  return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) +
         static_cast<std::size_t>(c.x);
}

std::optional<Cell> Layout::goal(int color) const {
  const Tile want = kGoalTiles[color];
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      if (at({x, y}) == want) return Cell{x, y};
    }
  }
  return std::nullopt;
}

std::size_t Layout::lava_count() const {
  return static_cast<std::size_t>(std::count(tiles_.begin(), tiles_.end(), Tile::lava));
}

std::uint8_t Layout::goals_present() const {
  std::uint8_t mask = 0;
  for (Tile t : tiles_) {
    const int c = goal_color(t);
    if (c >= 0) mask |= static_cast<std::uint8_t>(1u << c);
  }
  return mask;
}

void Layout::validate() const {
  std::array<int, 3> counts{};
  for (Tile t : tiles_) {
    const int c = goal_color(t);
    if (c >= 0) ++counts[static_cast<std::size_t>(c)];
  }
  for (int c = 0; c < 3; ++c) {
    if (counts[static_cast<std::size_t>(c)] > 1) {
      throw EnvironmentError("layout: more than one goal of color " + std::to_string(c));
    }
  }
  if (counts[0] + counts[1] + counts[2] == 0) throw EnvironmentError("layout: no goals");
  if (!in_bounds(start_)) throw EnvironmentError("layout: agent start out of bounds");
  if (at(start_) != Tile::empty) throw EnvironmentError("layout: agent start is not an empty tile");
  if (static_cast<int>(dir_) > 3) throw EnvironmentError("layout: bad agent orientation");
}

std::vector<std::string> Layout::rows() const {
  std::vector<std::string> out;
  for (int y = 0; y < height_; ++y) {
    std::string row;
    for (int x = 0; x < width_; ++x) row.push_back(tile_code(at({x, y})));
    out.push_back(std::move(row));
  }
  return out;
}

void GoalWeights::validate() const {
  double sum = 0.0;
  for (double x : w) {
    if (!std::isfinite(x) || x < 0.0) throw EnvironmentError("goal weights must be finite and >= 0");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw EnvironmentError("goal weights must sum to 1");
}

// ---------------------------------------------------------------------------
// Dynamics

AgentState initial_state(const Context& ctx) {
  return {ctx.layout.agent_start(), ctx.layout.agent_dir(),
          static_cast<std::uint8_t>(kAllGoals & ~ctx.layout.goals_present())};
}

StepOutcome apply_move(const Context& ctx, const AgentState& state, Action action) {
  StepOutcome out{state};
  AgentState& next = out.next;
  switch (action) {
    case turn_left: next.dir = static_cast<Direction>((static_cast<int>(state.dir) + 3) % 4); break;
    case turn_right: next.dir = static_cast<Direction>((static_cast<int>(state.dir) + 1) % 4); break;
    case forward: {
      const Cell target = ahead(state.pos, state.dir);
      if (ctx.layout.in_bounds(target)) next.pos = target;
      break;
    }
    default: throw EnvironmentError("lavagrid: action " + std::to_string(action) + " out of range");
  }
  const Tile tile = ctx.layout.at(next.pos);
  const int color = goal_color(tile);
  if (color >= 0 && !(state.collected & (1u << color))) {
    out.reward[kGoalObjective] = kGoalReward * ctx.weights.w[static_cast<std::size_t>(color)];
    next.collected = static_cast<std::uint8_t>(next.collected | (1u << color));
  }
  if (tile == Tile::lava) out.reward[kLavaObjective] = -1.0;
  out.reward[kTimeObjective] = -1.0;
  out.all_collected = next.collected == kAllGoals;
  return out;
}

Env::Env(std::size_t step_limit) : step_limit_(step_limit) {
  if (step_limit == 0) throw std::invalid_argument("lavagrid::Env: step limit must be positive");
}

Observation Env::reset(const Context& context, RandomStream& /*stream*/) {
  context.validate();
  if (!context_ || !(*context_ == context)) context_ = std::make_shared<const Context>(context);
  state_ = initial_state(*context_);
  steps_ = 0;
  active_ = true;
  return observe();
}

Transition<Observation> Env::step(Action action) {
  if (!active_) throw EnvironmentError("lavagrid: step called on a finished episode; reset first");
  const StepOutcome out = apply_move(*context_, state_, action);
  state_ = out.next;
  ++steps_;
  const bool terminal = out.all_collected;
  const bool truncated = !terminal && steps_ >= step_limit_;
  active_ = !(terminal || truncated);
  return {observe(), ValueVector({out.reward[0], out.reward[1], out.reward[2]}), terminal, truncated};
}

Observation Env::observe() const {
  Observation obs{context_, state_.pos, state_.dir, {}, state_.collected};
  for (std::size_t c = 0; c < 3; ++c) {
    obs.remaining_weights[c] = (state_.collected & (1u << c)) ? 0.0 : context_->weights.w[c];
  }
  return obs;
}

// ---------------------------------------------------------------------------
// Sampling

bool goals_reachable(const Layout& layout) {
  std::vector<char> seen(static_cast<std::size_t>(layout.width() * layout.height()), 0);
  auto idx = [&](Cell c) { return static_cast<std::size_t>(c.y * layout.width() + c.x); };
  std::deque<Cell> queue{layout.agent_start()};
  seen[idx(layout.agent_start())] = 1;
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    for (int d = 0; d < 4; ++d) {
      const Cell n = ahead(c, static_cast<Direction>(d));
      if (layout.in_bounds(n) && !seen[idx(n)]) {
        seen[idx(n)] = 1;
        queue.push_back(n);
      }
    }
  }
  for (int color = 0; color < 3; ++color) {
    const auto g = layout.goal(color);
    if (g && !seen[idx(*g)]) return false;
  }
  return true;
}

Layout random_layout(RandomStream& stream, int lava_min, int lava_max, int width, int height,
                     std::size_t max_attempts) {
  const int cells = width * height;
  if (lava_min < 0 || lava_max < lava_min) throw std::invalid_argument("random_layout: bad lava range");
  if (lava_max + 4 > cells) {
    throw BudgetExceededError("random_layout: " + std::to_string(lava_max) +
                              " lava tiles leave no room for 3 goals and the agent");
  }
  std::vector<int> order(static_cast<std::size_t>(cells));
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    const int lava = lava_min + static_cast<int>(stream.uniform_index(
                                    static_cast<std::uint64_t>(lava_max - lava_min + 1)));
    std::iota(order.begin(), order.end(), 0);
    // Partial Fisher-Yates: the first lava + 4 entries are a uniform draw of distinct cells.
    for (int i = 0; i < lava + 4; ++i) {
      const auto j = i + static_cast<int>(stream.uniform_index(static_cast<std::uint64_t>(cells - i)));
      std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }
    auto cell_of = [&](int i) {
      const int id = order[static_cast<std::size_t>(i)];
      return Cell{id % width, id / width};
    };
    Layout layout(width, height);
    const auto dir = static_cast<Direction>(stream.uniform_index(4));
    layout.set_agent(cell_of(0), dir);
    for (int c = 0; c < 3; ++c) layout.set(cell_of(1 + c), kGoalTiles[c]);
    for (int i = 0; i < lava; ++i) layout.set(cell_of(4 + i), Tile::lava);
    if (goals_reachable(layout)) return layout;
  }
  throw BudgetExceededError("random_layout: no reachable layout after " +
                            std::to_string(max_attempts) + " attempts");
}

Context RandomizationSpace::sample(RandomStream& stream) const {
  Context ctx{"random", random_layout(stream, lava_min, lava_max, width, height, max_attempts), {}};
  const WeightVector w = sample_simplex(stream, 3);
  ctx.weights.w = {w[0], w[1], w[2]};
  return ctx;
}

// ---------------------------------------------------------------------------
// Builtin contexts

namespace {

Context make_context(std::string name, std::initializer_list<std::string_view> rows, Cell agent,
                     Direction dir, std::array<double, 3> weights) {
  const std::vector<std::string_view> r(rows);
  Context ctx{std::move(name), Layout::from_rows(r, agent, dir), GoalWeights{weights}};
  ctx.validate();
  return ctx;
}

}  // namespace

std::vector<Context> builtin_eval_contexts() {
  constexpr double third = 1.0 / 3.0;
  std::vector<Context> out;
  out.push_back(make_context("Snake",
                             {"...........",
                              "LLLLLLLLL..",
                              "...........",
                              "..LLLLLLLLL",
                              "....G......",
                              "LLLLLLLLL..",
                              "...........",
                              "..LLLLLLLLL",
                              "Y..........",
                              "LLLLLLLLL..",
                              "..........B"},
                             {0, 0}, Direction::east, {0.20, 0.30, 0.50}));
  out.push_back(make_context("Room",
                             {"...........",
                              ".LLLLLLLLL.",
                              ".L.......L.",
                              ".L..G....L.",
                              ".L.......L.",
                              ".L...Y...L.",
                              ".L.......L.",
                              ".L.....B.L.",
                              ".L.......L.",
                              ".LLLL.LLLL.",
                              "..........."},
                             {5, 10}, Direction::north, {0.50, 0.30, 0.20}));
  out.push_back(make_context("Smiley",
                             {"...........",
                              "...LLLLL...",
                              "..L.....L..",
                              ".L..L.L..L.",
                              ".L.......L.",
                              ".L...G...L.",
                              ".L.L...L.L.",
                              ".L..LLL..L.",
                              "..L.....L..",
                              "...LLLLL...",
                              "Y.........B"},
                             {5, 10}, Direction::north, {0.40, 0.40, 0.20}));
  out.push_back(make_context("Maze",
                             {".L.........",
                              ".L.LLLLLLL.",
                              ".L.L.....L.",
                              ".L.L.LLL.L.",
                              "...L.LGL.L.",
                              "LLLL.L.L.L.",
                              ".....L.L...",
                              ".LLLLL.LLLL",
                              ".L.........",
                              ".L.LLLLLLL.",
                              "Y..L......B"},
                             {0, 0}, Direction::south, {0.05, 0.05, 0.90}));
  out.push_back(make_context("CheckerBoard",
                             {"..........B",
                              "...........",
                              "...L.L.L...",
                              "..L.L.L.L..",
                              "...L.L.L...",
                              "..L.LGL.L..",
                              "...L.L.L...",
                              "..L.L.L.L..",
                              "...L.L.L...",
                              "...........",
                              "Y.........."},
                             {0, 0}, Direction::east, {0.30, 0.10, 0.60}));
  out.push_back(make_context("Corridor",
                             {"G..........",
                              "...........",
                              "...........",
                              "...........",
                              "LLLLLLLLLL.",
                              "Y..........",
                              "LLLLLLLLLL.",
                              "...........",
                              "...........",
                              "...........",
                              "B.........."},
                             {5, 5}, Direction::east, {0.60, 0.10, 0.30}));
  out.push_back(make_context("Islands",
                             {"LLLLLLLLLLL",
                              "L...LLL...L",
                              "L.G.LLL.Y.L",
                              "L...LLL...L",
                              "LLLLLLLLLLL",
                              "LLLL...LLLL",
                              "LLLL...LLLL",
                              "LLLL...LLLL",
                              "LLLLLLLLLLL",
                              "LLLLLLL...L",
                              "LLLLLLL.B.L"},
                             {5, 6}, Direction::north, {third, third, third}));
  out.push_back(make_context("Labyrinth",
                             {"..........B",
                              ".LLLL.LLLL.",
                              ".L.......L.",
                              ".L.LLLLL.L.",
                              ".L.L...L.L.",
                              ".L.L.G.L.L.",
                              ".L.L...L.L.",
                              ".L.LL.LL.L.",
                              ".L.......L.",
                              ".LLLLLLLLL.",
                              "Y.........."},
                             {0, 0}, Direction::east, {0.50, 0.05, 0.45}));
  return out;
}

std::vector<Context> micro_suite() {
  std::vector<Context> out;
  out.push_back(make_context("micro-detour",
                             {"Y....",
                              "LLLL.",
                              "G....",
                              ".LLLL",
                              "....B"},
                             {0, 4}, Direction::east, {0.30, 0.10, 0.60}));
  out.push_back(make_context("micro-terrace",
                             {"LL.L.",
                              "....L",
                              "..L..",
                              "L.G..",
                              "YL..B"},
                             {3, 3}, Direction::east, {0.10, 0.20, 0.70}));
  out.push_back(make_context("micro-ridge",
                             {".G...",
                              ".....",
                              "...BL",
                              "..LLL",
                              "...YL"},
                             {0, 3}, Direction::east, {0.30, 0.40, 0.30}));
  out.push_back(make_context("micro-scatter",
                             {"..L..",
                              "..LGL",
                              ".L...",
                              "....L",
                              "B.L.Y"},
                             {0, 0}, Direction::north, {0.10, 0.65, 0.25}));
  out.push_back(make_context("micro-shelf",
                             {"LLLLB",
                              "....L",
                              ".....",
                              ".GLL.",
                              "...YL"},
                             {0, 4}, Direction::south, {0.75, 0.05, 0.20}));
  return out;
}

std::optional<Context> find_builtin(std::string_view name) {
  for (auto& c : builtin_eval_contexts()) {
    if (c.name == name) return c;
  }
  for (auto& c : micro_suite()) {
    if (c.name == name) return c;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Serialization and rendering

char direction_code(Direction d) {
  constexpr char codes[] = {'E', 'S', 'W', 'N'};
  return codes[static_cast<int>(d)];
}

Direction direction_from_code(char c) {
  switch (c) {
    case 'E': return Direction::east;
    case 'S': return Direction::south;
    case 'W': return Direction::west;
    case 'N': return Direction::north;
    default: throw FormatError(std::string("unknown direction '") + c + "'");
  }
}

nlohmann::json context_to_json(const Context& ctx) {
  nlohmann::json j;
  if (!ctx.name.empty()) j["name"] = ctx.name;
  j["tiles"] = ctx.layout.rows();
  j["agent"] = {{"x", ctx.layout.agent_start().x},
                {"y", ctx.layout.agent_start().y},
                {"dir", std::string(1, direction_code(ctx.layout.agent_dir()))}};
  j["weights"] = ctx.weights.w;
  return j;
}

Context context_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw FormatError("context: expected a JSON object");
  for (const char* key : {"tiles", "agent", "weights"}) {
    if (!j.contains(key)) throw FormatError(std::string("context: missing field '") + key + "'");
  }
  const auto& tiles = j.at("tiles");
  if (!tiles.is_array() || tiles.empty()) throw FormatError("context.tiles: expected an array of rows");
  std::vector<std::string> rows;
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    if (!tiles[i].is_string()) throw FormatError("context.tiles[" + std::to_string(i) + "]: not a string");
    rows.push_back(tiles[i].get<std::string>());
  }
  const auto& agent = j.at("agent");
  if (!agent.is_object() || !agent.contains("x") || !agent.contains("y") || !agent.contains("dir") ||
      !agent["x"].is_number_integer() || !agent["y"].is_number_integer() || !agent["dir"].is_string() ||
      agent["dir"].get<std::string>().size() != 1) {
    throw FormatError("context.agent: expected {\"x\": int, \"y\": int, \"dir\": \"N|E|S|W\"}");
  }
  const auto& weights = j.at("weights");
  if (!weights.is_array() || weights.size() != 3 ||
      !std::all_of(weights.begin(), weights.end(), [](const auto& w) { return w.is_number(); })) {
    throw FormatError("context.weights: expected [green, yellow, blue]");
  }
  const std::vector<std::string_view> views(rows.begin(), rows.end());
  Context ctx{j.value("name", std::string{}),
              Layout::from_rows(views, {agent["x"].get<int>(), agent["y"].get<int>()},
                                direction_from_code(agent["dir"].get<std::string>()[0])),
              GoalWeights{{weights[0].get<double>(), weights[1].get<double>(), weights[2].get<double>()}}};
  try {
    ctx.validate();
  } catch (const EnvironmentError& e) {
    throw FormatError(std::string("context: ") + e.what());
  }
  return ctx;
}

std::string render(const Context& ctx, const std::optional<AgentState>& agent) {
  const AgentState a = agent.value_or(initial_state(ctx));
  constexpr char arrows[] = {'>', 'v', '<', '^'};
  std::ostringstream os;
  for (int y = 0; y < ctx.layout.height(); ++y) {
    for (int x = 0; x < ctx.layout.width(); ++x) {
      const Cell c{x, y};
      if (c == a.pos) {
        os << arrows[static_cast<int>(a.dir)];
        continue;
      }
      const Tile t = ctx.layout.at(c);
      const int color = goal_color(t);
      // Collected goals are drawn in lower case.
      char code = tile_code(t);
      if (color >= 0 && (a.collected & (1u << color))) code = static_cast<char>(code - 'A' + 'a');
      os << code;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace morlgen::lavagrid
