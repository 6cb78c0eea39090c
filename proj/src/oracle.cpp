#include "morlgen/oracle.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>

#include "morlgen/front_io.hpp"
#include "morlgen/parallel.hpp"

namespace morlgen::oracle {

using lavagrid::AgentState;
using lavagrid::Context;

namespace {

using Vec3 = std::array<double, 3>;

// Back-pointer packed as action (2 bits) | successor index (30 bits).
using BackPtr = std::uint32_t;
constexpr std::uint32_t kIndexBits = 30;
constexpr std::uint32_t kIndexMask = (1u << kIndexBits) - 1;

BackPtr pack(Action a, std::size_t idx) {
  if (idx > kIndexMask) throw std::length_error("oracle: per-state front too large to index");
  return static_cast<BackPtr>((a << kIndexBits) | idx);
}
Action action_of(BackPtr p) { return p >> kIndexBits; }
std::size_t index_of(BackPtr p) { return p & kIndexMask; }

bool lex_greater(const Vec3& a, const Vec3& b) { return b < a; }

bool dominates3(const Vec3& a, const Vec3& b) {
  return a[0] >= b[0] && a[1] >= b[1] && a[2] >= b[2] && (a[0] > b[0] || a[1] > b[1] || a[2] > b[2]);
}

// Dense id for (cell, orientation, collected mask).
struct StateCodec {
  int width;
  int height;

  std::size_t count() const { return static_cast<std::size_t>(width * height) * 4 * 8; }
  std::uint32_t encode(const AgentState& s) const {
    return static_cast<std::uint32_t>(((s.collected * height + s.pos.y) * width + s.pos.x) * 4 +
                                      static_cast<int>(s.dir));
  }
  AgentState decode(std::uint32_t id) const {
    AgentState s;
    s.dir = static_cast<lavagrid::Direction>(id % 4);
    id /= 4;
    s.pos.x = static_cast<int>(id % static_cast<std::uint32_t>(width));
    id /= static_cast<std::uint32_t>(width);
    s.pos.y = static_cast<int>(id % static_cast<std::uint32_t>(height));
    s.collected = static_cast<std::uint8_t>(id / static_cast<std::uint32_t>(height));
    return s;
  }
};

struct Candidate {
  Vec3 value;
  BackPtr origin;
};

// Set of one layer: per reachable state, a slice of `points`/`back`.
struct Layer {
  std::vector<std::uint32_t> states;  // sorted state ids
  std::vector<std::size_t> offsets;   // states.size() + 1
  std::vector<Vec3> points;
  std::vector<BackPtr> back;

  std::size_t position(std::uint32_t id) const {
    const auto it = std::lower_bound(states.begin(), states.end(), id);
    return static_cast<std::size_t>(it - states.begin());
  }
};

// Greedy additive-epsilon thinning in descending lexicographic order.
std::size_t thin_count(const std::vector<Candidate>& pts, double eps, std::size_t stop_above,
                       std::vector<std::size_t>* kept_out) {
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec3& p = pts[i].value;
    bool covered = false;
    for (std::size_t q : kept) {
      const Vec3& v = pts[q].value;
      if (v[0] + eps >= p[0] && v[1] + eps >= p[1] && v[2] + eps >= p[2]) {
        covered = true;
        break;
      }
    }
    if (!covered) {
      kept.push_back(i);
      if (kept.size() > stop_above) return kept.size();
    }
  }
  const std::size_t n = kept.size();
  if (kept_out) *kept_out = std::move(kept);
  return n;
}

// Returns the epsilon used (0 when no thinning was needed).
double thin_to_cap(std::vector<Candidate>& pts, std::size_t cap) {
  if (pts.size() <= cap) return 0.0;
  std::vector<double> gaps;
  gaps.reserve(pts.size() * (pts.size() - 1) / 2);
  for (std::size_t j = 1; j < pts.size(); ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      const Vec3& a = pts[i].value;
      const Vec3& b = pts[j].value;
      gaps.push_back(std::max({b[0] - a[0], b[1] - a[1], b[2] - a[2]}));
    }
  }
  std::sort(gaps.begin(), gaps.end());
  gaps.erase(std::unique(gaps.begin(), gaps.end()), gaps.end());
  std::size_t lo = 0;
  std::size_t hi = gaps.size() - 1;  // the largest gap leaves a single point
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (thin_count(pts, gaps[mid], cap, nullptr) <= cap) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  std::vector<std::size_t> kept;
  thin_count(pts, gaps[lo], pts.size(), &kept);
  std::vector<Candidate> out;
  out.reserve(kept.size());
  for (std::size_t i : kept) out.push_back(pts[i]);
  pts = std::move(out);
  return gaps[lo];
}

// Sort, drop exact duplicates (first origin wins) and dominated candidates.
void filter_candidates(std::vector<Candidate>& cands) {
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Candidate& a, const Candidate& b) { return lex_greater(a.value, b.value); });
  std::vector<Candidate> kept;
  for (const Candidate& c : cands) {
    if (!kept.empty() && kept.back().value == c.value) continue;
    bool dominated = false;
    for (const Candidate& k : kept) {
      if (dominates3(k.value, c.value)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) kept.push_back(c);
  }
  cands = std::move(kept);
}

}  // namespace

OracleFront pareto_backward_induction(const Context& context, double gamma, std::size_t horizon,
                                      std::size_t cap, std::size_t threads) {
  context.validate();
  if (horizon == 0) throw std::invalid_argument("pareto_backward_induction: horizon must be positive");
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("pareto_backward_induction: gamma must lie in [0, 1)");
  }
  if (cap == 0) throw std::invalid_argument("pareto_backward_induction: cap must be positive");

  const StateCodec codec{context.layout.width(), context.layout.height()};
  const AgentState start = lavagrid::initial_state(context);

  // Forward pass: reachable, non-terminal states per time step.
  std::vector<Layer> layers(horizon + 1);
  layers[0].states = {codec.encode(start)};
  std::vector<char> mark(codec.count(), 0);
  for (std::size_t t = 0; t < horizon; ++t) {
    std::vector<std::uint32_t> next;
    for (std::uint32_t id : layers[t].states) {
      const AgentState s = codec.decode(id);
      for (Action a = 0; a < lavagrid::kActionCount; ++a) {
        const auto out = lavagrid::apply_move(context, s, a);
        if (out.all_collected) continue;
        const std::uint32_t nid = codec.encode(out.next);
        if (!mark[nid]) {
          mark[nid] = 1;
          next.push_back(nid);
        }
      }
    }
    for (std::uint32_t id : next) mark[id] = 0;
    std::sort(next.begin(), next.end());
    layers[t + 1].states = std::move(next);
  }

  // Last layer: the horizon ends the episode with nothing further.
  {
    Layer& last = layers[horizon];
    last.offsets.resize(last.states.size() + 1);
    for (std::size_t i = 0; i <= last.states.size(); ++i) last.offsets[i] = i;
    last.points.assign(last.states.size(), Vec3{0.0, 0.0, 0.0});
  }

  OracleFront result;
  for (std::size_t t = horizon; t-- > 0;) {
    Layer& layer = layers[t];
    const Layer& succ = layers[t + 1];
    const std::size_t n = layer.states.size();
    std::vector<std::vector<Candidate>> sets(n);
    std::vector<double> eps(n, 0.0);
    std::vector<std::size_t> sizes(n, 0);

    parallel_for(n, threads, [&](std::size_t i) {
      const AgentState s = codec.decode(layer.states[i]);
      std::vector<Candidate>& cands = sets[i];
      for (Action a = 0; a < lavagrid::kActionCount; ++a) {
        const auto out = lavagrid::apply_move(context, s, a);
        const Vec3 r{out.reward[0], out.reward[1], out.reward[2]};
        if (out.all_collected) {
          cands.push_back({r, pack(a, 0)});
          continue;
        }
        const std::size_t pos = succ.position(codec.encode(out.next));
        for (std::size_t j = succ.offsets[pos]; j < succ.offsets[pos + 1]; ++j) {
          const Vec3& v = succ.points[j];
          cands.push_back({{r[0] + gamma * v[0], r[1] + gamma * v[1], r[2] + gamma * v[2]},
                           pack(a, j - succ.offsets[pos])});
        }
      }
      filter_candidates(cands);
      sizes[i] = cands.size();
      eps[i] = thin_to_cap(cands, cap);
    });

    layer.offsets.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
      layer.offsets[i + 1] = layer.offsets[i] + sets[i].size();
      result.largest_set = std::max(result.largest_set, sizes[i]);
      if (sizes[i] > sets[i].size()) {
        result.approximate = true;
        result.epsilon = std::max(result.epsilon, eps[i]);
      }
    }
    layer.points.reserve(layer.offsets[n]);
    layer.back.reserve(layer.offsets[n]);
    for (auto& set : sets) {
      for (const Candidate& c : set) {
        layer.points.push_back(c.value);
        layer.back.push_back(c.origin);
      }
    }
    // Successor values are no longer needed; back-pointers are.
    if (t + 1 < horizon) {
      layers[t + 1].points.clear();
      layers[t + 1].points.shrink_to_fit();
    }
  }

  // Root front and witnesses by following back-pointers.
  const Layer& root = layers[0];
  std::vector<ValueVector> points;
  for (std::size_t j = 0; j < root.offsets[1]; ++j) {
    const Vec3& v = root.points[j];
    points.push_back(ValueVector({v[0], v[1], v[2]}));
    std::vector<Action> witness;
    AgentState s = start;
    std::size_t idx = j;
    for (std::size_t t = 0; t < horizon; ++t) {
      const Layer& layer = layers[t];
      const std::size_t pos = layer.position(codec.encode(s));
      const BackPtr bp = layer.back[layer.offsets[pos] + idx];
      const Action a = action_of(bp);
      witness.push_back(a);
      const auto out = lavagrid::apply_move(context, s, a);
      if (out.all_collected) break;
      s = out.next;
      idx = index_of(bp);
    }
    result.witnesses.push_back(std::move(witness));
  }
  // Root points are already antichain-sorted; the front keeps that order.
  result.front = ParetoFront(points);
  if (!std::equal(points.begin(), points.end(), result.front.begin())) {
    throw std::logic_error("pareto_backward_induction: root order mismatch");
  }
  return result;
}

// ---------------------------------------------------------------------------
// Brute-force enumeration

namespace {

void enumerate(const lavagrid::Env& env, const Vec3& ret, double discount, double gamma,
               std::size_t depth, std::size_t horizon, std::vector<Vec3>& leaves) {
  if (depth == horizon) {
    leaves.push_back(ret);
    return;
  }
  for (Action a = 0; a < lavagrid::kActionCount; ++a) {
    lavagrid::Env branch = env;
    const auto tr = branch.step(a);
    const Vec3 next{ret[0] + discount * tr.reward[0], ret[1] + discount * tr.reward[1],
                    ret[2] + discount * tr.reward[2]};
    if (tr.terminal) {
      leaves.push_back(next);
    } else {
      enumerate(branch, next, discount * gamma, gamma, depth + 1, horizon, leaves);
    }
  }
}

}  // namespace

ParetoFront enumerate_returns(const Context& context, double gamma, std::size_t horizon) {
  if (horizon > kMaxEnumerationHorizon) {
    throw std::invalid_argument("enumerate_returns: horizon " + std::to_string(horizon) +
                                " exceeds " + std::to_string(kMaxEnumerationHorizon));
  }
  context.validate();
  if (horizon == 0) return pareto_filter(std::vector<ValueVector>{ValueVector::zeros(3)});
  lavagrid::Env env(horizon);
  RandomStream unused(0, 0);
  env.reset(context, unused);
  std::vector<Vec3> leaves;
  enumerate(env, {0.0, 0.0, 0.0}, 1.0, gamma, 0, horizon, leaves);
  std::sort(leaves.begin(), leaves.end());
  leaves.erase(std::unique(leaves.begin(), leaves.end()), leaves.end());
  std::vector<ValueVector> points;
  points.reserve(leaves.size());
  for (const Vec3& v : leaves) points.push_back(ValueVector({v[0], v[1], v[2]}));
  return pareto_filter(points);
}

ValueVector replay(const Context& context, std::span<const Action> actions, double gamma) {
  lavagrid::Env env(std::max<std::size_t>(actions.size(), 1));
  RandomStream unused(0, 0);
  env.reset(context, unused);
  std::vector<std::array<double, 3>> rewards;
  rewards.reserve(actions.size());
  for (Action a : actions) {
    const auto tr = env.step(a);
    rewards.push_back({tr.reward[0], tr.reward[1], tr.reward[2]});
  }
  // Folded from the end, r + gamma * v, the same arithmetic as the backups,
  // so a witness reproduces its front point bit for bit.
  std::array<double, 3> v{0.0, 0.0, 0.0};
  for (auto it = rewards.rbegin(); it != rewards.rend(); ++it)
    for (std::size_t d = 0; d < 3; ++d) v[d] = (*it)[d] + gamma * v[d];
  return ValueVector({v[0], v[1], v[2]});
}

std::string witness_string(std::span<const Action> actions) {
  std::string s;
  s.reserve(actions.size());
  for (Action a : actions) {
    switch (a) {
      case lavagrid::turn_left: s.push_back('L'); break;
      case lavagrid::turn_right: s.push_back('R'); break;
      case lavagrid::forward: s.push_back('F'); break;
      default: throw std::invalid_argument("witness_string: bad action");
    }
  }
  return s;
}

std::vector<Action> parse_witness(const std::string& text) {
  std::vector<Action> out;
  for (char c : text) {
    switch (c) {
      case 'L': out.push_back(lavagrid::turn_left); break;
      case 'R': out.push_back(lavagrid::turn_right); break;
      case 'F': out.push_back(lavagrid::forward); break;
      default: throw FormatError(std::string("witness: unknown action code '") + c + "'");
    }
  }
  return out;
}

nlohmann::json witness_sidecar(const Context& context, const OracleFront& result, double gamma,
                               std::size_t horizon, std::size_t cap) {
  nlohmann::json j;
  j["schema"] = "morlgen.oracle-witnesses/1";
  j["context"] = lavagrid::context_to_json(context);
  j["gamma"] = gamma;
  j["horizon"] = horizon;
  j["cap"] = cap == kUnlimitedCap ? nlohmann::json(nullptr) : nlohmann::json(cap);
  j["approximate"] = result.approximate;
  j["epsilon"] = result.epsilon;
  j["largest_set"] = result.largest_set;
  auto w = nlohmann::json::array();
  for (const auto& seq : result.witnesses) w.push_back(witness_string(seq));
  j["witnesses"] = w;
  j["front"] = front_to_json(result.front);
  return j;
}

}  // namespace morlgen::oracle
