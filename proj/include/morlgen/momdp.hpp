#pragma once

// Contextual multi-objective MDP contract, discounted vector rollouts and the
// domain-randomization entry point.

#include <concepts>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "morlgen/errors.hpp"
#include "morlgen/pareto.hpp"
#include "morlgen/random.hpp"

namespace morlgen {

using Action = std::size_t;

template <class Observation>
struct Transition {
  Observation next_observation;
  ValueVector reward;
  bool terminal = false;
  /// Step limit reached without terminating. Never set together with terminal.
  bool truncated = false;
};

/// An environment instance runs one episode at a time. Once a step reports
/// terminal or truncated, further steps throw EnvironmentError until reset.
template <class E>
concept Environment = requires(E& env, const E& cenv, const typename E::context_type& ctx,
                               RandomStream& stream, Action a) {
  typename E::observation_type;
  { env.reset(ctx, stream) } -> std::same_as<typename E::observation_type>;
  { env.step(a) } -> std::same_as<Transition<typename E::observation_type>>;
  { cenv.num_objectives() } -> std::convertible_to<std::size_t>;
  { cenv.action_count() } -> std::convertible_to<std::size_t>;
};

/// A context parameter space that can be sampled.
template <class S>
concept ContextSpace = requires(const S& space, RandomStream& stream) {
  typename S::context_type;
  { space.sample(stream) } -> std::same_as<typename S::context_type>;
};

struct EpisodeResult {
  ValueVector returns;
  std::size_t steps = 0;
  bool terminal = false;
  bool truncated = false;
};

/// Runs one episode and accumulates sum_t gamma^t r_{t+1}. The episode ends on
/// terminal, environment truncation or after max_steps steps (no bootstrapping).
template <Environment Env, class Policy>
EpisodeResult rollout_episode(Env& env, Policy&& policy, const typename Env::context_type& context,
                              double gamma, RandomStream& stream, std::size_t max_steps) {
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("rollout: gamma must lie in [0, 1)");
  }
  if (max_steps == 0) throw std::invalid_argument("rollout: max_steps must be positive");
  auto obs = env.reset(context, stream);
  EpisodeResult result{ValueVector::zeros(env.num_objectives())};
  double discount = 1.0;
  while (result.steps < max_steps) {
    const Action a = policy(obs);
    if (a >= env.action_count()) {
      throw EnvironmentError("rollout: policy chose action " + std::to_string(a) + " of " +
                             std::to_string(env.action_count()));
    }
    auto tr = env.step(a);
    result.returns.add_scaled(tr.reward, discount);
    discount *= gamma;
    ++result.steps;
    if (tr.terminal || tr.truncated) {
      result.terminal = tr.terminal;
      result.truncated = tr.truncated;
      return result;
    }
    obs = std::move(tr.next_observation);
  }
  result.truncated = true;
  return result;
}

template <Environment Env, class Policy>
ValueVector rollout(Env& env, Policy&& policy, const typename Env::context_type& context,
                    double gamma, RandomStream& stream, std::size_t max_steps) {
  return rollout_episode(env, std::forward<Policy>(policy), context, gamma, stream, max_steps).returns;
}

/// One context drawn uniformly from the space.
template <ContextSpace Space>
typename Space::context_type domain_randomization_sampler(const Space& space, RandomStream& stream) {
  return space.sample(stream);
}

}  // namespace morlgen
