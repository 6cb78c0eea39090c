#pragma once

#include <cstddef>
#include <span>

#include "morlgen/pareto.hpp"
#include "morlgen/random.hpp"

namespace morlgen {

/// Uniform draw from the (k-1)-simplex by sorted uniform spacings.
WeightVector sample_simplex(RandomStream& stream, std::size_t k);

/// Interquartile mean: sort, drop floor(n/4) scores from each end, average the rest.
double iqm(std::span<const double> scores);

/// Mean shortfall max(0, target - score).
double optimality_gap(std::span<const double> scores, double target = 1.0);

}  // namespace morlgen
