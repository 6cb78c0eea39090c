#pragma once

// Helpers shared by the unit tests: random fronts and small independent
// reference implementations used as oracles.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <deque>
#include <string>

#include "morlgen/lavagrid.hpp"
#include "morlgen/momdp.hpp"
#include "morlgen/pareto.hpp"

namespace testing_support {

inline std::vector<morlgen::ValueVector> random_points(std::mt19937_64& rng, std::size_t n, std::size_t k,
                                                       double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<morlgen::ValueVector> pts;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(k);
    for (auto& x : v) x = u(rng);
    pts.emplace_back(std::move(v));
  }
  return pts;
}

/// Nondominated subset by the O(n^2) definition.
inline std::vector<morlgen::ValueVector> brute_force_filter(const std::vector<morlgen::ValueVector>& pts) {
  std::vector<morlgen::ValueVector> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
      if (j == i) continue;
      bool ge = true, gt = false;
      for (std::size_t d = 0; d < pts[i].size(); ++d) {
        ge = ge && pts[j][d] >= pts[i][d];
        gt = gt || pts[j][d] > pts[i][d];
      }
      dominated = ge && gt;
    }
    if (!dominated && std::find(out.begin(), out.end(), pts[i]) == out.end()) out.push_back(pts[i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// 2-D hypervolume by sorting on the first objective and summing rectangles.
inline double sweep_hv_2d(std::vector<morlgen::ValueVector> pts, double r0, double r1) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a[0] > b[0]; });
  double best1 = r1;
  double area = 0.0;
  for (const auto& p : pts) {
    if (p[0] <= r0) break;
    if (p[1] > best1) {
      area += (p[0] - r0) * (p[1] - best1);
      best1 = p[1];
    }
  }
  return area;
}

struct McEstimate {
  double value;
  double standard_error;
};

/// Uniform sampling of the bounding box [ref, max]; independent of the library.
inline McEstimate monte_carlo_hv(const std::vector<morlgen::ValueVector>& pts, const std::vector<double>& ref,
                                 std::uint64_t samples, std::uint64_t seed) {
  const std::size_t k = ref.size();
  std::vector<double> hi(ref);
  for (const auto& p : pts)
    for (std::size_t d = 0; d < k; ++d) hi[d] = std::max(hi[d], p[d]);
  double box = 1.0;
  for (std::size_t d = 0; d < k; ++d) box *= hi[d] - ref[d];
  if (box <= 0.0) return {0.0, 0.0};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(k);
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    for (std::size_t d = 0; d < k; ++d) x[d] = ref[d] + u(rng) * (hi[d] - ref[d]);
    for (const auto& p : pts) {
      bool inside = true;
      for (std::size_t d = 0; d < k && inside; ++d) inside = x[d] <= p[d];
      if (inside) {
        ++hits;
        break;
      }
    }
  }
  const double frac = static_cast<double>(hits) / static_cast<double>(samples);
  return {frac * box, box * std::sqrt(frac * (1.0 - frac) / static_cast<double>(samples))};
}

/// Exact hypervolume by coordinate compression: sums every grid cell whose
/// upper corner is dominated. O((n+1)^k * n), fine for small fronts.
inline double grid_hv(const std::vector<morlgen::ValueVector>& pts, const std::vector<double>& ref) {
  const std::size_t k = ref.size();
  std::vector<std::vector<double>> cuts(k);
  for (std::size_t d = 0; d < k; ++d) {
    cuts[d].push_back(ref[d]);
    for (const auto& p : pts)
      if (p[d] > ref[d]) cuts[d].push_back(p[d]);
    std::sort(cuts[d].begin(), cuts[d].end());
    cuts[d].erase(std::unique(cuts[d].begin(), cuts[d].end()), cuts[d].end());
    if (cuts[d].size() < 2) return 0.0;
  }
  std::vector<std::size_t> idx(k, 0);
  std::vector<double> upper(k);
  double total = 0.0;
  while (true) {
    double vol = 1.0;
    for (std::size_t d = 0; d < k; ++d) {
      upper[d] = cuts[d][idx[d] + 1];
      vol *= upper[d] - cuts[d][idx[d]];
    }
    for (const auto& p : pts) {
      bool inside = true;
      for (std::size_t d = 0; d < k && inside; ++d) inside = upper[d] <= p[d];
      if (inside) {
        total += vol;
        break;
      }
    }
    std::size_t d = 0;
    while (d < k && ++idx[d] + 1 >= cuts[d].size()) idx[d++] = 0;
    if (d == k) break;
  }
  return total;
}

/// Breadth-first search over 4-neighbour moves from the agent start; every
/// in-bounds cell is passable. True when all goal tiles are reached.
inline bool bfs_all_goals_reachable(const morlgen::lavagrid::Layout& layout) {
  const int w = layout.width(), h = layout.height();
  std::vector<char> seen(static_cast<std::size_t>(w * h), 0);
  std::deque<std::pair<int, int>> queue{{layout.agent_start().x, layout.agent_start().y}};
  seen[layout.agent_start().y * w + layout.agent_start().x] = 1;
  while (!queue.empty()) {
    auto [x, y] = queue.front();
    queue.pop_front();
    const int dx[] = {1, -1, 0, 0}, dy[] = {0, 0, 1, -1};
    for (int d = 0; d < 4; ++d) {
      const int nx = x + dx[d], ny = y + dy[d];
      if (nx < 0 || ny < 0 || nx >= w || ny >= h || seen[ny * w + nx]) continue;
      seen[ny * w + nx] = 1;
      queue.emplace_back(nx, ny);
    }
  }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const auto t = layout.at({x, y});
      if (t != morlgen::lavagrid::Tile::empty && t != morlgen::lavagrid::Tile::lava && !seen[y * w + x]) return false;
    }
  return true;
}

/// Nondominated returns of every action sequence of length <= horizon, each
/// replayed from scratch through the environment.
inline std::vector<morlgen::ValueVector> env_brute_force_front(const morlgen::lavagrid::Context& ctx, double gamma,
                                                               std::size_t horizon) {
  std::vector<morlgen::ValueVector> returns;
  std::size_t total = 1;
  for (std::size_t i = 0; i < horizon; ++i) total *= 3;
  morlgen::RandomStream stream(0, 0);
  for (std::size_t code = 0; code < total; ++code) {
    morlgen::lavagrid::Env env(horizon);
    env.reset(ctx, stream);
    std::vector<double> g(3, 0.0);
    double discount = 1.0;
    std::size_t c = code;
    while (env.active()) {
      const auto tr = env.step(static_cast<morlgen::Action>(c % 3));
      c /= 3;
      for (std::size_t d = 0; d < 3; ++d) g[d] += discount * tr.reward[d];
      discount *= gamma;
    }
    returns.emplace_back(g);
  }
  std::sort(returns.begin(), returns.end());
  returns.erase(std::unique(returns.begin(), returns.end()), returns.end());
  return brute_force_filter(returns);
}

/// Componentwise comparison of two sorted point lists.
inline bool same_points(std::vector<morlgen::ValueVector> a, std::vector<morlgen::ValueVector> b, double tol) {
  if (a.size() != b.size()) return false;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size()) return false;
    for (std::size_t d = 0; d < a[i].size(); ++d)
      if (std::abs(a[i][d] - b[i][d]) > tol) return false;
  }
  return true;
}

}  // namespace testing_support
