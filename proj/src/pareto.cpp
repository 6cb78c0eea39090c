#include "morlgen/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "morlgen/random.hpp"

namespace morlgen {

namespace {

void check_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument(std::string(what) + ": non-finite component");
    }
  }
}

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension " + std::to_string(a) + " vs " +
                         std::to_string(b));
  }
}

bool descending_lex(const ValueVector& a, const ValueVector& b) { return b < a; }

}  // namespace

ValueVector::ValueVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) {
    throw DimensionError("ValueVector needs at least 2 objectives");
  }
  check_finite(values_, "ValueVector");
}

ValueVector::ValueVector(std::initializer_list<double> values)
    : ValueVector(std::vector<double>(values)) {}

ValueVector ValueVector::zeros(std::size_t k) { return ValueVector(std::vector<double>(k, 0.0)); }

void ValueVector::add_scaled(const ValueVector& other, double scale) {
  require_same_dim(size(), other.size(), "add_scaled");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    values_[i] += scale * other.values_[i];
  }
  check_finite(values_, "ValueVector");
}

WeightVector::WeightVector(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) {
    throw DimensionError("WeightVector needs at least 1 component");
  }
  check_finite(weights_, "WeightVector");
  double sum = 0.0;
  for (double w : weights_) {
    if (w < 0.0) {
      throw std::invalid_argument("WeightVector: negative component");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw std::invalid_argument("WeightVector: components sum to " + std::to_string(sum));
  }
}

WeightVector::WeightVector(std::initializer_list<double> weights)
    : WeightVector(std::vector<double>(weights)) {}

ParetoFront::ParetoFront(std::vector<ValueVector> points) : points_(std::move(points)) {
  for (const auto& p : points_) {
    require_same_dim(p.size(), points_.front().size(), "ParetoFront");
  }
  std::sort(points_.begin(), points_.end(), descending_lex);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (i > 0 && points_[i] == points_[i - 1]) {
      throw std::invalid_argument("ParetoFront: duplicate point");
    }
    // Descending lexicographic order: only earlier points can dominate.
    for (std::size_t j = 0; j < i; ++j) {
      if (dominates(points_[j], points_[i])) {
        throw std::invalid_argument("ParetoFront: point " + std::to_string(i) + " is dominated");
      }
    }
  }
}

FrontBounds::FrontBounds(ValueVector v_min, ValueVector v_max)
    : min_(std::move(v_min)), max_(std::move(v_max)) {
  require_same_dim(min_.size(), max_.size(), "FrontBounds");
  for (std::size_t i = 0; i < min_.size(); ++i) {
    if (!(max_[i] > min_[i])) {
      throw DegenerateRangeError("FrontBounds: objective " + std::to_string(i) +
                                 " has an empty range");
    }
  }
}

FrontBounds bounds_of(const ParetoFront& front) {
  if (front.empty()) {
    throw EmptyInputError("bounds_of: empty front");
  }
  const std::size_t k = front.dim();
  std::vector<double> lo(front[0].values().begin(), front[0].values().end());
  std::vector<double> hi = lo;
  for (const auto& p : front) {
    for (std::size_t i = 0; i < k; ++i) {
      lo[i] = std::min(lo[i], p[i]);
      hi[i] = std::max(hi[i], p[i]);
    }
  }
  return FrontBounds(ValueVector(std::move(lo)), ValueVector(std::move(hi)));
}

bool dominates(const ValueVector& a, const ValueVector& b) {
  require_same_dim(a.size(), b.size(), "dominates");
  bool strict = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return false;
    if (a[i] > b[i]) strict = true;
  }
  return strict;
}

std::vector<std::size_t> pareto_filter_indices(std::span<const ValueVector> points) {
  for (const auto& p : points) {
    require_same_dim(p.size(), points.front().size(), "pareto_filter");
  }
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Stable: among duplicates the first occurrence leads.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return descending_lex(points[a], points[b]);
  });
  std::vector<std::size_t> kept;
  for (std::size_t idx : order) {
    const ValueVector& p = points[idx];
    if (!kept.empty() && points[kept.back()] == p) continue;
    bool dominated = false;
    for (std::size_t q : kept) {
      if (dominates(points[q], p)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) kept.push_back(idx);
  }
  return kept;
}

ParetoFront pareto_filter(std::span<const ValueVector> points) {
  std::vector<ValueVector> kept;
  for (std::size_t idx : pareto_filter_indices(points)) kept.push_back(points[idx]);
  return ParetoFront(ParetoFront::Trusted{}, std::move(kept));
}

// ---------------------------------------------------------------------------
// Hypervolume

namespace {

using PointRef = const double*;

double hv_2d(std::vector<PointRef> pts, const double* ref) {
  std::sort(pts.begin(), pts.end(), [](PointRef a, PointRef b) {
    return a[1] != b[1] ? a[1] > b[1] : a[0] > b[0];
  });
  double area = 0.0;
  double reach = ref[0];
  for (PointRef p : pts) {
    if (p[0] > reach) {
      area += (p[0] - reach) * (p[1] - ref[1]);
      reach = p[0];
    }
  }
  return area;
}

bool weakly_dominates_prefix(PointRef a, PointRef b, std::size_t d) {
  for (std::size_t i = 0; i < d; ++i) {
    if (a[i] < b[i]) return false;
  }
  return true;
}

// Slices along objective d-1 from the top down; each slab's cross-section is
// the (d-1)-dimensional volume of the points at or above it.
double hv_slice(std::vector<PointRef> pts, std::size_t d, const double* ref) {
  if (pts.empty()) return 0.0;
  if (d == 1) {
    double best = ref[0];
    for (PointRef p : pts) best = std::max(best, p[0]);
    return best - ref[0];
  }
  if (d == 2) return hv_2d(std::move(pts), ref);

  const std::size_t axis = d - 1;
  std::sort(pts.begin(), pts.end(), [axis](PointRef a, PointRef b) { return a[axis] > b[axis]; });
  std::vector<PointRef> slab;
  double volume = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    PointRef p = pts[i];
    const bool redundant = std::any_of(slab.begin(), slab.end(), [&](PointRef q) {
      return weakly_dominates_prefix(q, p, axis);
    });
    if (!redundant) {
      std::erase_if(slab, [&](PointRef q) { return weakly_dominates_prefix(p, q, axis); });
      slab.push_back(p);
    }
    const double next = i + 1 < pts.size() ? pts[i + 1][axis] : ref[axis];
    const double height = p[axis] - next;
    if (height > 0.0) volume += height * hv_slice(slab, axis, ref);
  }
  return volume;
}

// Points strictly above ref in every objective; others bound no volume.
std::vector<PointRef> contributing(const std::vector<std::vector<double>>& pts,
                                   std::span<const double> ref) {
  std::vector<PointRef> out;
  for (const auto& p : pts) {
    bool inside = true;
    for (std::size_t i = 0; i < ref.size(); ++i) {
      if (!(p[i] > ref[i])) {
        inside = false;
        break;
      }
    }
    if (inside) out.push_back(p.data());
  }
  return out;
}

HypervolumeResult hv_points(const std::vector<std::vector<double>>& pts, std::span<const double> ref,
                            const MonteCarloOptions& mc) {
  const std::size_t k = ref.size();
  std::vector<PointRef> live = contributing(pts, ref);
  if (live.empty()) return {};
  if (k <= kMaxExactObjectives) {
    return {hv_slice(std::move(live), k, ref.data()), false, 0.0};
  }
  if (mc.samples == 0) {
    throw std::invalid_argument("hypervolume: Monte Carlo estimate needs samples > 0");
  }
  std::vector<double> upper(ref.begin(), ref.end());
  for (PointRef p : live) {
    for (std::size_t i = 0; i < k; ++i) upper[i] = std::max(upper[i], p[i]);
  }
  double box = 1.0;
  for (std::size_t i = 0; i < k; ++i) box *= upper[i] - ref[i];
  RandomStream rng(mc.seed, name_tag("hypervolume/monte-carlo"));
  std::vector<double> x(k);
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < mc.samples; ++s) {
    for (std::size_t i = 0; i < k; ++i) x[i] = ref[i] + rng.uniform() * (upper[i] - ref[i]);
    for (PointRef p : live) {
      if (weakly_dominates_prefix(p, x.data(), k)) {
        ++hits;
        break;
      }
    }
  }
  const double n = static_cast<double>(mc.samples);
  const double frac = static_cast<double>(hits) / n;
  return {box * frac, true, box * std::sqrt(frac * (1.0 - frac) / n)};
}

std::vector<std::vector<double>> raw_points(const ParetoFront& front) {
  std::vector<std::vector<double>> out;
  out.reserve(front.size());
  for (const auto& p : front) out.emplace_back(p.values().begin(), p.values().end());
  return out;
}

}  // namespace

HypervolumeResult hypervolume(const ParetoFront& front, const ValueVector& ref,
                              const MonteCarloOptions& mc) {
  if (!front.empty()) require_same_dim(front.dim(), ref.size(), "hypervolume");
  return hv_points(raw_points(front), ref.values(), mc);
}

double hypervolume_exact(const ParetoFront& front, const ValueVector& ref) {
  if (ref.size() > kMaxExactObjectives) {
    throw std::invalid_argument("hypervolume_exact: more than " +
                                std::to_string(kMaxExactObjectives) + " objectives");
  }
  return hypervolume(front, ref).value;
}

double hv_norm(const ParetoFront& front, const FrontBounds& bounds) {
  const std::size_t k = bounds.v_min().size();
  if (front.empty()) return 0.0;
  require_same_dim(front.dim(), k, "hv_norm");
  std::vector<std::vector<double>> scaled;
  scaled.reserve(front.size());
  for (const auto& p : front) {
    std::vector<double> q(k);
    for (std::size_t i = 0; i < k; ++i) {
      const double lo = bounds.v_min()[i];
      const double hi = bounds.v_max()[i];
      q[i] = std::clamp((p[i] - lo) / (hi - lo), 0.0, 1.0);
    }
    scaled.push_back(std::move(q));
  }
  const std::vector<double> origin(k, 0.0);
  return hv_points(scaled, origin, {}).value;
}

double nhgr(const ParetoFront& approx, const ParetoFront& optimal) {
  if (optimal.empty()) {
    throw EmptyInputError("nhgr: empty optimal front");
  }
  const FrontBounds bounds = bounds_of(optimal);
  const double denom = hv_norm(optimal, bounds);
  if (!(denom > 0.0)) {
    throw UndefinedRatioError("nhgr: optimal front has zero normalized hypervolume");
  }
  return std::min(1.0, hv_norm(approx, bounds) / denom);
}

double linear_utility(const ValueVector& v, const WeightVector& w) {
  require_same_dim(v.size(), w.size(), "linear_utility");
  double u = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) u += w[i] * v[i];
  return u;
}

double eum(const ParetoFront& front, std::span<const WeightVector> weights) {
  if (front.empty()) throw EmptyInputError("eum: empty front");
  if (weights.empty()) throw EmptyInputError("eum: empty weight list");
  double total = 0.0;
  for (const auto& w : weights) {
    double best = linear_utility(front[0], w);
    for (const auto& v : front) best = std::max(best, linear_utility(v, w));
    total += best;
  }
  return total / static_cast<double>(weights.size());
}

EugrResult eugr(const ParetoFront& approx, const ParetoFront& optimal,
                std::span<const WeightVector> weights) {
  const double denom = eum(optimal, weights);
  if (denom == 0.0) {
    throw UndefinedRatioError("eugr: optimal front has zero expected utility");
  }
  return {eum(approx, weights) / denom, denom < 0.0};
}

}  // namespace morlgen
