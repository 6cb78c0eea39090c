#include "morlgen/agents.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace morlgen::agents {

// ---------------------------------------------------------------------------
// WeightGrid

namespace {

void compositions(std::size_t remaining, std::size_t parts, std::vector<std::size_t>& prefix,
                  std::vector<std::vector<std::size_t>>& out) {
  if (parts == 1) {
    prefix.push_back(remaining);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (std::size_t i = remaining + 1; i-- > 0;) {
    prefix.push_back(i);
    compositions(remaining - i, parts - 1, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

WeightGrid WeightGrid::simplex(std::size_t k, std::size_t m) {
  if (k == 0 || m == 0) throw std::invalid_argument("WeightGrid: k and m must be positive");
  std::vector<std::vector<std::size_t>> parts;
  std::vector<std::size_t> prefix;
  compositions(m, k, prefix, parts);
  std::vector<WeightVector> weights;
  weights.reserve(parts.size());
  for (const auto& p : parts) {
    std::vector<double> w(k);
    for (std::size_t i = 0; i < k; ++i) w[i] = static_cast<double>(p[i]) / static_cast<double>(m);
    weights.emplace_back(std::move(w));
  }
  WeightGrid grid(std::move(weights));
  grid.resolution_ = m;
  return grid;
}

WeightGrid::WeightGrid(std::vector<WeightVector> weights) : weights_(std::move(weights)) {
  std::set<std::vector<double>> seen;
  for (const auto& w : weights_) {
    if (w.size() != weights_.front().size()) throw DimensionError("WeightGrid: mixed weight dimensions");
    if (!seen.emplace(w.values().begin(), w.values().end()).second) {
      throw std::invalid_argument("WeightGrid: duplicate weight");
    }
  }
}

// ---------------------------------------------------------------------------
// QConfig / TabularQ

double QConfig::epsilon(std::size_t episode, std::size_t episodes) const {
  const double span = anneal_fraction * static_cast<double>(episodes);
  if (span <= 0.0) return epsilon_end;
  const double t = std::min(1.0, static_cast<double>(episode) / span);
  return epsilon_start + t * (epsilon_end - epsilon_start);
}

void QConfig::validate() const {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("QConfig: alpha must lie in (0, 1]");
  if (!unit(epsilon_start) || !unit(epsilon_end)) throw std::invalid_argument("QConfig: epsilon must lie in [0, 1]");
  if (!unit(anneal_fraction)) throw std::invalid_argument("QConfig: anneal_fraction must lie in [0, 1]");
}

TabularQ::TabularQ(std::string digest_kind, std::size_t digest_count, std::size_t weight_count,
                   std::size_t action_count, QConfig config)
    : digest_kind_(std::move(digest_kind)),
      digests_(digest_count),
      weights_(weight_count),
      actions_(action_count),
      config_(config) {
  if (digests_ == 0 || weights_ == 0 || actions_ == 0) {
    throw std::invalid_argument("TabularQ: every dimension must be positive");
  }
  config_.validate();
  q_.assign(digests_ * weights_ * actions_, 0.0);
}

Action TabularQ::greedy(std::size_t digest, std::size_t weight) const {
  const double* row = q_.data() + offset(digest, weight);
  Action best = 0;
  for (Action a = 1; a < actions_; ++a) {
    if (row[a] > row[best]) best = a;
  }
  return best;
}

double TabularQ::max_value(std::size_t digest, std::size_t weight) const {
  const double* row = q_.data() + offset(digest, weight);
  return *std::max_element(row, row + actions_);
}

std::size_t TabularQ::nonzero_count() const {
  return static_cast<std::size_t>(std::count_if(q_.begin(), q_.end(), [](double v) { return v != 0.0; }));
}

// ---------------------------------------------------------------------------
// ContextTaggedArchive

bool ContextTaggedArchive::insert(const std::string& context_id, const ValueVector& value, std::string policy) {
  auto& list = entries_[context_id];
  if (!list.empty() && list.front().value.size() != value.size()) {
    throw DimensionError("archive: dimension mismatch within context '" + context_id + "'");
  }
  for (const auto& e : list) {
    if (e.value == value || dominates(e.value, value)) return false;
  }
  std::erase_if(list, [&](const Entry& e) { return dominates(value, e.value); });
  list.push_back({value, std::move(policy)});
  return true;
}

std::vector<std::string> ContextTaggedArchive::contexts() const {
  std::vector<std::string> out;
  for (const auto& [id, list] : entries_) {
    if (!list.empty()) out.push_back(id);
  }
  return out;
}

std::span<const ContextTaggedArchive::Entry> ContextTaggedArchive::entries(const std::string& context_id) const {
  auto it = entries_.find(context_id);
  if (it == entries_.end()) return {};
  return it->second;
}

ParetoFront ContextTaggedArchive::front(const std::string& context_id) const {
  std::vector<ValueVector> pts;
  for (const auto& e : entries(context_id)) pts.push_back(e.value);
  return ParetoFront(std::move(pts));
}

// ---------------------------------------------------------------------------
// LavaGrid digests

std::size_t PositionDigest::operator()(const lavagrid::Observation& obs) const {
  const auto cell = static_cast<std::size_t>(obs.position.y * width + obs.position.x);
  return (cell * 4 + static_cast<std::size_t>(obs.dir)) * 8 + obs.collected;
}

namespace {

constexpr std::array<lavagrid::Cell, 4> kHeading{{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};

int sign(int v) { return (v > 0) - (v < 0); }

std::size_t weight_order_code(const std::array<double, 3>& w) {
  std::array<int, 3> idx{0, 1, 2};
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return w[a] > w[b]; });
  constexpr std::array<std::array<int, 3>, 6> perms{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  for (std::size_t i = 0; i < perms.size(); ++i) {
    if (perms[i] == idx) return i;
  }
  return 0;
}

}  // namespace

std::size_t EgocentricDigest::operator()(const lavagrid::Observation& obs) const {
  using lavagrid::Tile;
  const auto& ctx = *obs.context;
  const auto& layout = ctx.layout;
  const int d = static_cast<int>(obs.dir);
  const auto fwd = kHeading[d];
  const auto right = kHeading[(d + 1) % 4];
  std::size_t code = 0;
  for (int color = 0; color < 3; ++color) {
    std::size_t g = 0;
    const auto cell = layout.goal(color);
    if (cell && !(obs.collected & (1u << color))) {
      const int dx = cell->x - obs.position.x;
      const int dy = cell->y - obs.position.y;
      const int sf = sign(dx * fwd.x + dy * fwd.y);
      const int sl = sign(dx * right.x + dy * right.y);
      const int c = (sf + 1) * 3 + (sl + 1);  // 4 is the agent's own cell
      g = c < 4 ? static_cast<std::size_t>(c) + 1 : static_cast<std::size_t>(c);
    }
    code = code * 9 + g;
  }
  code = code * 6 + weight_order_code(ctx.weights.w);
  const lavagrid::Cell ahead{obs.position.x + fwd.x, obs.position.y + fwd.y};
  std::size_t front = 0;
  if (layout.in_bounds(ahead)) front = layout.at(ahead) == Tile::lava ? 2 : 1;
  return code * 3 + front;
}

// ---------------------------------------------------------------------------
// Training and evaluation

namespace {

void check_budget(const TrainingBudget& b) {
  if (b.episodes == 0) throw std::invalid_argument("training budget: episodes must be positive");
  if (b.horizon == 0) throw std::invalid_argument("training budget: horizon must be positive");
  if (b.grid_resolution == 0) throw std::invalid_argument("training budget: grid resolution must be positive");
  if (!(b.gamma >= 0.0 && b.gamma < 1.0)) throw std::invalid_argument("training budget: gamma must lie in [0, 1)");
  b.q.validate();
}

template <class Digest>
struct DigestPolicy {
  const TabularQ* q;
  Digest digest;
  std::size_t weight;
  Action operator()(const lavagrid::Observation& obs) const { return q->greedy(digest(obs), weight); }
};

}  // namespace

TabularQ train_specialist(const lavagrid::Context& context, const TrainingBudget& budget, RandomStream& stream) {
  check_budget(budget);
  context.validate();
  const auto grid = WeightGrid::simplex(lavagrid::kNumObjectives, budget.grid_resolution);
  const PositionDigest digest{context.layout.width(), context.layout.height()};
  TabularQ q(std::string(kPositionDigest), digest.size(), grid.size(), lavagrid::kActionCount, budget.q);
  lavagrid::Env env(budget.horizon);
  train_scalarized_q(q, env, [&](RandomStream&) -> const lavagrid::Context& { return context; }, digest, grid,
                     budget.episodes, budget.gamma, stream);
  return q;
}

TabularQ train_generalist(const lavagrid::RandomizationSpace& space, const TrainingBudget& budget,
                          RandomStream& stream) {
  check_budget(budget);
  const auto grid = WeightGrid::simplex(lavagrid::kNumObjectives, budget.grid_resolution);
  const EgocentricDigest digest{};
  TabularQ q(std::string(kEgocentricDigest), digest.size(), grid.size(), lavagrid::kActionCount, budget.q);
  lavagrid::Env env(budget.horizon);
  train_scalarized_q(q, env, [&](RandomStream& s) { return domain_randomization_sampler(space, s); }, digest,
                     grid, budget.episodes, budget.gamma, stream);
  return q;
}

ValueVector greedy_value_vector(const TabularQ& q, std::size_t weight, const lavagrid::Context& context,
                                double gamma, std::size_t horizon, RandomStream& stream) {
  if (weight >= q.weight_count()) throw std::out_of_range("greedy_value_vector: weight index out of range");
  lavagrid::Env env(horizon);
  if (q.digest_kind() == kPositionDigest) {
    const PositionDigest digest{context.layout.width(), context.layout.height()};
    if (digest.size() != q.digest_count()) {
      throw DimensionError("greedy_value_vector: table was trained on a grid of another size");
    }
    return rollout(env, DigestPolicy<PositionDigest>{&q, digest, weight}, context, gamma, stream, horizon);
  }
  if (q.digest_kind() == kEgocentricDigest) {
    return rollout(env, DigestPolicy<EgocentricDigest>{&q, {}, weight}, context, gamma, stream, horizon);
  }
  throw std::invalid_argument("greedy_value_vector: unknown digest kind '" + q.digest_kind() + "'");
}

AgentFront build_front(const TabularQ& q, const WeightGrid& grid, const lavagrid::Context& context, double gamma,
                       std::size_t horizon, std::size_t max_weights) {
  if (grid.size() != q.weight_count()) throw DimensionError("build_front: grid does not match the table");
  const std::size_t n = std::min(grid.size(), max_weights);
  RandomStream unused(0, 0);
  std::vector<ValueVector> values;
  values.reserve(n);
  for (std::size_t w = 0; w < n; ++w) values.push_back(greedy_value_vector(q, w, context, gamma, horizon, unused));
  // Each weight answers with the best policy of the evaluated family for it
  // (ties to the lowest index), so no point is beaten on its own weight.
  std::vector<ValueVector> chosen;
  std::vector<std::size_t> owner;
  chosen.reserve(n);
  for (std::size_t w = 0; w < n; ++w) {
    std::size_t best = 0;
    double best_u = linear_utility(values[0], grid[w]);
    for (std::size_t p = 1; p < n; ++p) {
      const double u = linear_utility(values[p], grid[w]);
      if (u > best_u) {
        best_u = u;
        best = p;
      }
    }
    chosen.push_back(values[best]);
    owner.push_back(w);
  }
  AgentFront out;
  std::vector<ValueVector> kept;
  for (auto i : pareto_filter_indices(chosen)) {
    kept.push_back(chosen[i]);
    out.weight_index.push_back(owner[i]);
  }
  out.front = ParetoFront(std::move(kept));
  return out;
}

ParetoFront random_policy_front(const lavagrid::Context& context, std::size_t n, double gamma, std::size_t horizon,
                                RandomStream& stream) {
  if (n == 0) throw std::invalid_argument("random_policy_front: n must be positive");
  lavagrid::Env env(horizon);
  std::vector<ValueVector> values;
  values.reserve(n);
  auto policy = [&](const lavagrid::Observation&) -> Action { return stream.uniform_index(lavagrid::kActionCount); };
  for (std::size_t i = 0; i < n; ++i) values.push_back(rollout(env, policy, context, gamma, stream, horizon));
  return pareto_filter(values);
}

// ---------------------------------------------------------------------------
// Snapshots

nlohmann::json snapshot_to_json(const TabularQ& q, const nlohmann::json& metadata) {
  nlohmann::json j;
  j["schema"] = kSnapshotSchema;
  j["digest"] = q.digest_kind();
  j["shape"] = {q.digest_count(), q.weight_count(), q.action_count()};
  const auto& c = q.config();
  j["hyperparameters"] = {{"alpha", c.alpha},
                          {"epsilon_start", c.epsilon_start},
                          {"epsilon_end", c.epsilon_end},
                          {"anneal_fraction", c.anneal_fraction},
                          {"share_experience", c.share_experience}};
  j["metadata"] = metadata;
  auto rows = nlohmann::json::array();
  const auto raw = q.raw();
  const std::size_t width = q.action_count();
  for (std::size_t s = 0; s < q.digest_count(); ++s) {
    for (std::size_t w = 0; w < q.weight_count(); ++w) {
      const auto row = raw.subspan((s * q.weight_count() + w) * width, width);
      if (std::all_of(row.begin(), row.end(), [](double v) { return v == 0.0; })) continue;
      rows.push_back({s, w, std::vector<double>(row.begin(), row.end())});
    }
  }
  j["rows"] = std::move(rows);
  return j;
}

TabularQ snapshot_from_json(const nlohmann::json& j, nlohmann::json* metadata) {
  try {
    if (!j.is_object()) throw FormatError("snapshot: expected a JSON object");
    if (j.value("schema", std::string()) != kSnapshotSchema) {
      throw FormatError("snapshot: unsupported schema (expected " + std::string(kSnapshotSchema) + ")");
    }
    const auto& shape = j.at("shape");
    if (!shape.is_array() || shape.size() != 3) throw FormatError("snapshot.shape: expected three sizes");
    const auto& h = j.at("hyperparameters");
    QConfig c;
    c.alpha = h.at("alpha").get<double>();
    c.epsilon_start = h.at("epsilon_start").get<double>();
    c.epsilon_end = h.at("epsilon_end").get<double>();
    c.anneal_fraction = h.at("anneal_fraction").get<double>();
    c.share_experience = h.at("share_experience").get<bool>();
    TabularQ q(j.at("digest").get<std::string>(), shape[0].get<std::size_t>(), shape[1].get<std::size_t>(),
               shape[2].get<std::size_t>(), c);
    const auto& rows = j.at("rows");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      const auto s = r.at(0).get<std::size_t>();
      const auto w = r.at(1).get<std::size_t>();
      const auto values = r.at(2).get<std::vector<double>>();
      if (s >= q.digest_count() || w >= q.weight_count() || values.size() != q.action_count()) {
        throw FormatError("snapshot.rows[" + std::to_string(i) + "]: index or width out of range");
      }
      for (std::size_t a = 0; a < values.size(); ++a) {
        if (!std::isfinite(values[a])) throw FormatError("snapshot.rows[" + std::to_string(i) + "]: non-finite value");
        q.set(s, w, a, values[a]);
      }
    }
    if (metadata) *metadata = j.value("metadata", nlohmann::json::object());
    return q;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("snapshot: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("snapshot: ") + e.what());
  }
}

}  // namespace morlgen::agents
