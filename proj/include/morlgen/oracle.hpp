#pragma once

// Exact optimal fronts for LavaGrid contexts.
//
// pareto_backward_induction runs set-valued dynamic programming over the
// time-expanded state (cell, orientation, collected goals, t). Every stored
// point keeps a back-pointer (action, successor index), so each front point
// comes with the action sequence that realizes it. enumerate_returns is an
// independent brute-force check for short horizons.

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "morlgen/lavagrid.hpp"
#include "morlgen/pareto.hpp"

namespace morlgen::oracle {

inline constexpr std::size_t kUnlimitedCap = std::numeric_limits<std::size_t>::max();
inline constexpr std::size_t kMaxEnumerationHorizon = 14;

struct OracleFront {
  ParetoFront front;
  /// witnesses[i] realizes front[i].
  std::vector<std::vector<Action>> witnesses;
  /// Some per-state set exceeded the cap and was epsilon-thinned.
  bool approximate = false;
  /// Largest additive epsilon used by any thinning step (0 when exact).
  double epsilon = 0.0;
  /// Largest per-state set encountered before thinning.
  std::size_t largest_set = 0;
};

/// Finite-horizon Pareto front from the context's initial state. Sets larger
/// than `cap` are thinned by additive epsilon-dominance with the smallest
/// epsilon (among pairwise dominance gaps) that fits the cap.
/// `threads` parallelizes within a time layer and never changes the result.
OracleFront pareto_backward_induction(const lavagrid::Context& context, double gamma,
                                      std::size_t horizon, std::size_t cap = kUnlimitedCap,
                                      std::size_t threads = 1);

/// Pareto filter over the returns of every action sequence, each run until
/// the episode terminates or `horizon` steps elapse.
ParetoFront enumerate_returns(const lavagrid::Context& context, double gamma, std::size_t horizon);

/// Discounted return of an action sequence, simulated through lavagrid::Env.
ValueVector replay(const lavagrid::Context& context, std::span<const Action> actions, double gamma);

/// Witnesses as strings over {L, R, F}.
std::string witness_string(std::span<const Action> actions);
std::vector<Action> parse_witness(const std::string& text);

/// Sidecar document: context, parameters, exactness flag and witness strings
/// aligned with the rows of the front CSV.
nlohmann::json witness_sidecar(const lavagrid::Context& context, const OracleFront& result,
                               double gamma, std::size_t horizon, std::size_t cap);

}  // namespace morlgen::oracle
