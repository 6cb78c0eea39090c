#pragma once

// Vector-valued return geometry: dominance, nondominated filtering,
// hypervolume, normalized hypervolume and the generalization ratios built
// on top of them. All objectives are maximized.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include "morlgen/errors.hpp"

namespace morlgen {

/// Per-objective discounted return. At least two finite components.
class ValueVector {
 public:
  explicit ValueVector(std::vector<double> values);
  ValueVector(std::initializer_list<double> values);

  static ValueVector zeros(std::size_t k);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

  /// this += scale * other, componentwise.
  void add_scaled(const ValueVector& other, double scale);

  friend bool operator==(const ValueVector&, const ValueVector&) = default;
  friend auto operator<=>(const ValueVector& a, const ValueVector& b) {
    return a.values_ <=> b.values_;
  }

 private:
  std::vector<double> values_;
};

/// Linear-utility weights on the unit simplex (sum 1 within 1e-9, all >= 0).
class WeightVector {
 public:
  static constexpr double kSumTolerance = 1e-9;

  explicit WeightVector(std::vector<double> weights);
  WeightVector(std::initializer_list<double> weights);

  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  std::span<const double> values() const noexcept { return weights_; }

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  std::vector<double> weights_;
};

/// Mutually nondominated, duplicate-free set of equal-dimension points.
/// Points are stored in descending lexicographic order, so two fronts with
/// the same point set compare equal.
class ParetoFront {
 public:
  ParetoFront() = default;
  /// Throws DimensionError on mixed dimensions and std::invalid_argument if
  /// the points are not an antichain.
  explicit ParetoFront(std::vector<ValueVector> points);

  bool empty() const noexcept { return points_.empty(); }
  std::size_t size() const noexcept { return points_.size(); }
  /// Objective count; 0 for the empty front.
  std::size_t dim() const noexcept { return points_.empty() ? 0 : points_.front().size(); }
  const std::vector<ValueVector>& points() const noexcept { return points_; }
  const ValueVector& operator[](std::size_t i) const { return points_[i]; }
  auto begin() const noexcept { return points_.begin(); }
  auto end() const noexcept { return points_.end(); }

  friend bool operator==(const ParetoFront&, const ParetoFront&) = default;

 private:
  struct Trusted {};
  ParetoFront(Trusted, std::vector<ValueVector> points) : points_(std::move(points)) {}
  friend ParetoFront pareto_filter(std::span<const ValueVector> points);

  std::vector<ValueVector> points_;
};

/// Normalization box taken from a reference front. Requires max_i > min_i.
class FrontBounds {
 public:
  FrontBounds(ValueVector v_min, ValueVector v_max);

  const ValueVector& v_min() const noexcept { return min_; }
  const ValueVector& v_max() const noexcept { return max_; }

 private:
  ValueVector min_;
  ValueVector max_;
};

/// Elementwise min/max of a nonempty front.
FrontBounds bounds_of(const ParetoFront& front);

/// a >= b everywhere and a > b somewhere.
bool dominates(const ValueVector& a, const ValueVector& b);

/// Indices of the nondominated inputs, one per distinct point (the first
/// occurrence), ordered like the resulting front.
std::vector<std::size_t> pareto_filter_indices(std::span<const ValueVector> points);

ParetoFront pareto_filter(std::span<const ValueVector> points);

struct MonteCarloOptions {
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 0;
};

struct HypervolumeResult {
  double value = 0.0;
  /// True when computed by Monte Carlo (more than kMaxExactObjectives objectives).
  bool estimated = false;
  double standard_error = 0.0;
};

inline constexpr std::size_t kMaxExactObjectives = 6;

/// Lebesgue measure of the union of boxes [ref, v]. Points that do not
/// strictly exceed ref in every objective contribute nothing.
HypervolumeResult hypervolume(const ParetoFront& front, const ValueVector& ref,
                              const MonteCarloOptions& mc = {});

/// Exact hypervolume; throws std::invalid_argument above kMaxExactObjectives.
double hypervolume_exact(const ParetoFront& front, const ValueVector& ref);

/// Hypervolume of the front min-max normalized by bounds and clamped to
/// [0,1]^k, measured from the origin.
double hv_norm(const ParetoFront& front, const FrontBounds& bounds);

/// hv_norm(approx) / hv_norm(optimal), both normalized by bounds_of(optimal).
/// Throws UndefinedRatioError when the optimal front has zero normalized volume.
double nhgr(const ParetoFront& approx, const ParetoFront& optimal);

double linear_utility(const ValueVector& v, const WeightVector& w);

/// Mean over weights of the best linear utility attainable on the front.
double eum(const ParetoFront& front, std::span<const WeightVector> weights);

struct EugrResult {
  double ratio = 0.0;
  /// The optimal front's expected utility is negative, so larger ratios are worse.
  bool negative_reference = false;
};

/// eum(approx) / eum(optimal) on raw (unnormalized) fronts.
EugrResult eugr(const ParetoFront& approx, const ParetoFront& optimal,
                std::span<const WeightVector> weights);

}  // namespace morlgen
