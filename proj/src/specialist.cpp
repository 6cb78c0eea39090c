#include "morlgen/specialist.hpp"

namespace morlgen::oracle {

ParetoFront specialist_front(const lavagrid::Context& context, const agents::TrainingBudget& budget,
                             RandomStream& stream) {
  const auto q = agents::train_specialist(context, budget, stream);
  const auto grid = agents::WeightGrid::simplex(lavagrid::kNumObjectives, budget.grid_resolution);
  auto result = agents::build_front(q, grid, context, budget.gamma, budget.horizon);
  if (result.front.empty()) throw BudgetExceededError("specialist_front: training produced no point");
  return std::move(result.front);
}

}  // namespace morlgen::oracle
