#pragma once

// Fallback front estimate for contexts where backward induction is too large
// to run exactly: train a specialist and keep its nondominated greedy returns.

#include "morlgen/agents.hpp"
#include "morlgen/lavagrid.hpp"
#include "morlgen/pareto.hpp"
#include "morlgen/random.hpp"

namespace morlgen::oracle {

/// Throws std::invalid_argument for a zero budget and BudgetExceededError
/// if training yields no point.
ParetoFront specialist_front(const lavagrid::Context& context, const agents::TrainingBudget& budget,
                             RandomStream& stream);

}  // namespace morlgen::oracle
