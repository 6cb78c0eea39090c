#include "morlgen/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace morlgen {

namespace {

void check_sample(std::span<const double> scores, const char* what) {
  if (scores.empty()) throw EmptyInputError(std::string(what) + ": empty score sample");
  for (double s : scores) {
    if (!std::isfinite(s)) throw std::invalid_argument(std::string(what) + ": non-finite score");
  }
}

}  // namespace

WeightVector sample_simplex(RandomStream& stream, std::size_t k) {
  if (k == 0) throw std::invalid_argument("sample_simplex: k must be positive");
  std::vector<double> cuts(k - 1);
  for (double& c : cuts) c = stream.uniform();
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> w(k);
  double prev = 0.0;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    w[i] = cuts[i] - prev;
    prev = cuts[i];
  }
  w[k - 1] = 1.0 - prev;
  double sum = 0.0;
  for (double x : w) sum += x;
  for (double& x : w) x /= sum;
  return WeightVector(std::move(w));
}

double iqm(std::span<const double> scores) {
  check_sample(scores, "iqm");
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t trim = sorted.size() / 4;
  double sum = 0.0;
  for (std::size_t i = trim; i < sorted.size() - trim; ++i) sum += sorted[i];
  return sum / static_cast<double>(sorted.size() - 2 * trim);
}

double optimality_gap(std::span<const double> scores, double target) {
  check_sample(scores, "optimality_gap");
  double sum = 0.0;
  for (double s : scores) sum += std::max(0.0, target - s);
  return sum / static_cast<double>(scores.size());
}

}  // namespace morlgen
