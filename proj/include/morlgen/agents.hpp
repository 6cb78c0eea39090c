#pragma once

// Desk-scale baselines: weight-conditioned tabular Q-learning on linearly
// scalarized rewards, a uniform random policy, and a Pareto archive that
// keeps dominance checks inside each context.

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "morlgen/errors.hpp"
#include "morlgen/lavagrid.hpp"
#include "morlgen/momdp.hpp"
#include "morlgen/pareto.hpp"
#include "morlgen/random.hpp"

namespace morlgen::agents {

/// All compositions of m into k parts, divided by m; lexicographically
/// descending in the first weight. Count is C(m+k-1, k-1).
class WeightGrid {
 public:
  static WeightGrid simplex(std::size_t k, std::size_t m);
  /// Entries must share a dimension and be distinct.
  explicit WeightGrid(std::vector<WeightVector> weights);

  std::size_t size() const noexcept { return weights_.size(); }
  bool empty() const noexcept { return weights_.empty(); }
  std::size_t dim() const noexcept { return weights_.empty() ? 0 : weights_.front().size(); }
  /// Resolution m for simplex grids, 0 for explicit lists.
  std::size_t resolution() const noexcept { return resolution_; }
  const WeightVector& operator[](std::size_t i) const { return weights_[i]; }
  const std::vector<WeightVector>& weights() const noexcept { return weights_; }

 private:
  std::vector<WeightVector> weights_;
  std::size_t resolution_ = 0;
};

struct QConfig {
  double alpha = 0.1;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  /// Fraction of the episodes over which epsilon is annealed linearly.
  double anneal_fraction = 0.8;
  /// Apply every transition to the tables of all grid weights (off-policy),
  /// not only to the weight that drove the behaviour policy.
  bool share_experience = true;

  double epsilon(std::size_t episode, std::size_t episodes) const;
  void validate() const;

  friend bool operator==(const QConfig&, const QConfig&) = default;
};

/// Dense action-value table indexed by (observation digest, weight index, action).
class TabularQ {
 public:
  TabularQ(std::string digest_kind, std::size_t digest_count, std::size_t weight_count,
           std::size_t action_count, QConfig config = {});

  const std::string& digest_kind() const noexcept { return digest_kind_; }
  std::size_t digest_count() const noexcept { return digests_; }
  std::size_t weight_count() const noexcept { return weights_; }
  std::size_t action_count() const noexcept { return actions_; }
  const QConfig& config() const noexcept { return config_; }

  double value(std::size_t digest, std::size_t weight, Action a) const { return q_[offset(digest, weight) + a]; }
  void set(std::size_t digest, std::size_t weight, Action a, double v) { q_[offset(digest, weight) + a] = v; }
  /// Greedy action; ties go to the lowest index.
  Action greedy(std::size_t digest, std::size_t weight) const;
  double max_value(std::size_t digest, std::size_t weight) const;

  /// Q(s,a) += alpha * (target - Q(s,a)).
  void update(std::size_t digest, std::size_t weight, Action a, double target) {
    double& q = q_[offset(digest, weight) + a];
    q += config_.alpha * (target - q);
  }

  std::size_t nonzero_count() const;
  std::span<const double> raw() const noexcept { return q_; }

  friend bool operator==(const TabularQ&, const TabularQ&) = default;

 private:
  std::size_t offset(std::size_t digest, std::size_t weight) const {
    return (digest * weights_ + weight) * actions_;
  }

  std::string digest_kind_;
  std::size_t digests_;
  std::size_t weights_;
  std::size_t actions_;
  QConfig config_;
  std::vector<double> q_;
};

/// Maps observations to table rows in [0, size()).
template <class D, class Obs>
concept ObservationDigest = requires(const D& d, const Obs& obs) {
  { d(obs) } -> std::convertible_to<std::size_t>;
  { d.size() } -> std::convertible_to<std::size_t>;
};

/// One-step TD on w^T r for every episode. `next_context(stream)` supplies
/// the episode's context (fixed for specialists, freshly sampled for
/// generalists). The behaviour weight index is drawn uniformly per episode.
/// Truncated transitions bootstrap from the next state; terminal ones do not.
template <Environment Env, class ContextSource, class Digest>
  requires ObservationDigest<Digest, typename Env::observation_type>
void train_scalarized_q(TabularQ& q, Env& env, ContextSource&& next_context, const Digest& digest,
                        const WeightGrid& grid, std::size_t episodes, double gamma,
                        RandomStream& stream) {
  if (grid.empty()) throw EmptyInputError("train_scalarized_q: empty weight grid");
  if (episodes == 0) throw std::invalid_argument("train_scalarized_q: episodes must be positive");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("train_scalarized_q: gamma must lie in [0, 1)");
  if (q.weight_count() != grid.size() || q.action_count() != env.action_count() ||
      q.digest_count() != digest.size()) {
    throw DimensionError("train_scalarized_q: table shape does not match grid, actions or digest");
  }
  if (grid.dim() != env.num_objectives()) throw DimensionError("train_scalarized_q: weight dimension mismatch");

  const std::size_t n_actions = env.action_count();
  const std::size_t k = grid.dim();
  std::vector<std::size_t> all(grid.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

  for (std::size_t ep = 0; ep < episodes; ++ep) {
    const auto context = next_context(stream);
    const std::size_t w_behaviour = stream.uniform_index(grid.size());
    const double eps = q.config().epsilon(ep, episodes);
    auto obs = env.reset(context, stream);
    std::size_t s = digest(obs);
    while (true) {
      Action a;
      if (stream.uniform() < eps) {
        a = stream.uniform_index(n_actions);
      } else {
        a = q.greedy(s, w_behaviour);
      }
      auto tr = env.step(a);
      const std::size_t s2 = digest(tr.next_observation);
      const std::size_t one[] = {w_behaviour};
      std::span<const std::size_t> targets =
          q.config().share_experience ? std::span<const std::size_t>(all) : std::span<const std::size_t>(one);
      for (std::size_t w : targets) {
        double r = 0.0;
        for (std::size_t i = 0; i < k; ++i) r += grid[w][i] * tr.reward[i];
        const double target = tr.terminal ? r : r + gamma * q.max_value(s2, w);
        q.update(s, w, a, target);
      }
      if (tr.terminal || tr.truncated) break;
      s = s2;
      obs = std::move(tr.next_observation);
    }
  }
}

/// Pareto archive keyed by context id; dominance is checked only within a context.
class ContextTaggedArchive {
 public:
  struct Entry {
    ValueVector value;
    std::string policy;
  };

  /// Inserted iff no entry of the same context weakly dominates `value`;
  /// entries of that context dominated by `value` are evicted.
  bool insert(const std::string& context_id, const ValueVector& value, std::string policy);

  std::vector<std::string> contexts() const;
  std::span<const Entry> entries(const std::string& context_id) const;
  ParetoFront front(const std::string& context_id) const;

 private:
  std::map<std::string, std::vector<Entry>> entries_;
};

// ---------------------------------------------------------------------------
// LavaGrid instantiation

inline constexpr std::string_view kPositionDigest = "position";
inline constexpr std::string_view kEgocentricDigest = "egocentric";

/// (cell, orientation, collected mask): lossless for one fixed context.
struct PositionDigest {
  int width;
  int height;
  std::size_t size() const { return static_cast<std::size_t>(width * height) * 4 * 8; }
  std::size_t operator()(const lavagrid::Observation& obs) const;
};

/// Layout-independent features for generalists: for each goal, collected or
/// the sign of its forward/lateral offset in the agent frame; the order of
/// the goal weights; what lies on the cell ahead (wall, free, lava).
struct EgocentricDigest {
  std::size_t size() const { return 9 * 9 * 9 * 6 * 3; }
  std::size_t operator()(const lavagrid::Observation& obs) const;
};

struct TrainingBudget {
  std::size_t episodes = 20000;
  std::size_t horizon = lavagrid::kStepLimit;
  double gamma = lavagrid::kDiscount;
  std::size_t grid_resolution = 10;
  QConfig q{};
};

/// Table trained on one fixed context with the position digest.
TabularQ train_specialist(const lavagrid::Context& context, const TrainingBudget& budget,
                          RandomStream& stream);
/// Table trained with a fresh context from `space` every episode (egocentric digest).
TabularQ train_generalist(const lavagrid::RandomizationSpace& space, const TrainingBudget& budget,
                          RandomStream& stream);

/// Discounted vector return of the greedy policy for grid weight `weight`.
ValueVector greedy_value_vector(const TabularQ& q, std::size_t weight, const lavagrid::Context& context,
                                double gamma, std::size_t horizon, RandomStream& stream);

struct AgentFront {
  ParetoFront front;
  /// Smallest grid weight answered with front[i].
  std::vector<std::size_t> weight_index;
};

/// Greedy value vectors for the first `max_weights` grid weights. Each weight
/// then takes the family member with the highest utility for it, and the
/// chosen vectors are Pareto-filtered.
AgentFront build_front(const TabularQ& q, const WeightGrid& grid, const lavagrid::Context& context,
                       double gamma, std::size_t horizon, std::size_t max_weights = SIZE_MAX);

/// `n` uniform-random-action rollouts, Pareto-filtered.
ParetoFront random_policy_front(const lavagrid::Context& context, std::size_t n, double gamma,
                                std::size_t horizon, RandomStream& stream);

/// Versioned snapshot: shape, hyperparameters, training metadata and the
/// nonzero table entries.
inline constexpr std::string_view kSnapshotSchema = "morlgen.tabular-q/1";
nlohmann::json snapshot_to_json(const TabularQ& q, const nlohmann::json& metadata);
/// Throws FormatError on schema or shape problems. `metadata` receives the
/// stored metadata object when non-null.
TabularQ snapshot_from_json(const nlohmann::json& j, nlohmann::json* metadata = nullptr);

}  // namespace morlgen::agents
