#include "morlgen/harness.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "morlgen/aggregate.hpp"
#include "morlgen/front_io.hpp"
#include "morlgen/oracle.hpp"
#include "morlgen/parallel.hpp"
#include "morlgen/specialist.hpp"

namespace morlgen::harness {

using nlohmann::json;

std::string_view to_string(AgentKind k) {
  switch (k) {
    case AgentKind::generalist: return "generalist";
    case AgentKind::specialist: return "specialist";
    case AgentKind::random: return "random";
  }
  return "?";
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::oracle_exact: return "oracle-exact";
    case Provenance::oracle_eps_pruned: return "oracle-eps-pruned";
    case Provenance::specialist: return "specialist";
  }
  return "?";
}

namespace {

Provenance provenance_from(const std::string& s) {
  for (auto p : {Provenance::oracle_exact, Provenance::oracle_eps_pruned, Provenance::specialist}) {
    if (to_string(p) == s) return p;
  }
  throw FormatError("unknown provenance '" + s + "'");
}

AgentKind agent_from(const std::string& s) {
  for (auto k : {AgentKind::generalist, AgentKind::specialist, AgentKind::random}) {
    if (to_string(k) == s) return k;
  }
  throw FormatError("config.agent: expected generalist, specialist or random, got '" + s + "'");
}

/// File-name-safe version of a context name.
std::string file_stem(std::string_view name) {
  std::string out;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                    c == '_' || c == '.';
    out += ok ? c : '_';
  }
  return out;
}

void check_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw FormatError(std::string(where) + ": unknown field '" + key + "'");
    }
  }
}

template <class T>
void read_field(const json& j, std::string_view where, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw FormatError(std::string(where) + "." + key + ": wrong type");
  }
}

json weights_to_json(std::span<const WeightVector> ws) {
  json out = json::array();
  for (const auto& w : ws) out.push_back(std::vector<double>(w.values().begin(), w.values().end()));
  return out;
}

std::vector<double> component_min(const ParetoFront& front) {
  std::vector<double> lo(front.dim(), 0.0);
  for (std::size_t i = 0; i < front.dim(); ++i) {
    lo[i] = front[0][i];
    for (const auto& p : front) lo[i] = std::min(lo[i], p[i]);
  }
  return lo;
}

}  // namespace

// ---------------------------------------------------------------------------
// JSON and file helpers

json parse_json(std::string_view text, std::string_view source) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string what = e.what();
    if (auto pos = what.find("; "); pos != std::string::npos) what = what.substr(pos + 2);
    throw FormatError(std::string(source) + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what);
  }
}

void write_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// EvalConfig

void EvalConfig::validate() const {
  if (domain != "lavagrid") throw std::invalid_argument("config: unsupported domain '" + domain + "'");
  if (contexts.empty()) throw std::invalid_argument("config: at least one context is required");
  if (seeds.empty()) throw std::invalid_argument("config: at least one seed is required");
  std::set<std::string> names;
  for (const auto& c : contexts) {
    if (c.name.empty()) throw std::invalid_argument("config: every context needs a name");
    if (!names.insert(c.name).second) throw std::invalid_argument("config: duplicate context '" + c.name + "'");
    c.validate();
  }
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw std::invalid_argument("config: duplicate seed");
  }
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("config: gamma must lie in [0, 1)");
  if (horizon == 0) throw std::invalid_argument("config: horizon must be positive");
  if (episodes_per_evaluation == 0) throw std::invalid_argument("config: episodes_per_evaluation must be positive");
  if (eum_weight_samples == 0) throw std::invalid_argument("config: eum_weight_samples must be positive");
  if (training.episodes == 0) throw std::invalid_argument("config: training.episodes must be positive");
  if (training.grid_resolution == 0) throw std::invalid_argument("config: training.grid_resolution must be positive");
  training.q.validate();
  if (oracle_cap == 0) throw std::invalid_argument("config: oracle.cap must be positive");
  if (randomization.width < 2 || randomization.height < 2) {
    throw std::invalid_argument("config: randomization grid must be at least 2x2");
  }
  if (randomization.lava_min < 0 || randomization.lava_max < randomization.lava_min) {
    throw std::invalid_argument("config: randomization lava range is invalid");
  }
}

std::size_t EvalConfig::sweep_size() const {
  const auto grid = agents::WeightGrid::simplex(lavagrid::kNumObjectives, training.grid_resolution).size();
  std::size_t n = front_weights == 0 ? grid : std::min(front_weights, grid);
  return std::min(n, episodes_per_evaluation);
}

json EvalConfig::to_json() const {
  json j;
  j["schema"] = kConfigSchema;
  j["domain"] = domain;
  j["agent"] = to_string(agent);
  j["contexts"] = json::array();
  for (const auto& c : contexts) j["contexts"].push_back(lavagrid::context_to_json(c));
  j["seeds"] = seeds;
  j["gamma"] = gamma;
  j["horizon"] = horizon;
  j["episodes_per_evaluation"] = episodes_per_evaluation;
  j["eum_weight_samples"] = eum_weight_samples;
  j["front_weights"] = front_weights;
  j["training"] = {{"episodes", training.episodes},
                   {"grid_resolution", training.grid_resolution},
                   {"alpha", training.q.alpha},
                   {"epsilon_start", training.q.epsilon_start},
                   {"epsilon_end", training.q.epsilon_end},
                   {"anneal_fraction", training.q.anneal_fraction},
                   {"share_experience", training.q.share_experience}};
  j["randomization"] = {{"width", randomization.width},
                        {"height", randomization.height},
                        {"lava_min", randomization.lava_min},
                        {"lava_max", randomization.lava_max},
                        {"max_attempts", randomization.max_attempts}};
  j["oracle"] = {{"cap", oracle_cap}, {"specialist_fallback", specialist_fallback}};
  return j;
}

EvalConfig EvalConfig::from_json(const json& j) {
  if (!j.is_object()) throw FormatError("config: expected a JSON object");
  check_keys(j, "config",
             {"schema", "domain", "agent", "contexts", "seeds", "gamma", "horizon", "episodes_per_evaluation",
              "eum_weight_samples", "front_weights", "training", "randomization", "oracle"});
  if (j.contains("schema") && j["schema"] != kConfigSchema) {
    throw FormatError("config.schema: expected " + std::string(kConfigSchema));
  }
  EvalConfig c;
  read_field(j, "config", "domain", c.domain);
  if (j.contains("agent")) {
    if (!j["agent"].is_string()) throw FormatError("config.agent: expected a string");
    c.agent = agent_from(j["agent"].get<std::string>());
  }
  if (!j.contains("contexts") || !j["contexts"].is_array()) {
    throw FormatError("config.contexts: expected an array of names or context objects");
  }
  const auto& ctxs = j["contexts"];
  for (std::size_t i = 0; i < ctxs.size(); ++i) {
    const auto& item = ctxs[i];
    const std::string where = "config.contexts[" + std::to_string(i) + "]";
    if (item.is_string()) {
      const auto name = item.get<std::string>();
      if (name == "micro-suite") {
        for (auto& m : lavagrid::micro_suite()) c.contexts.push_back(std::move(m));
      } else if (name == "builtin") {
        for (auto& m : lavagrid::builtin_eval_contexts()) c.contexts.push_back(std::move(m));
      } else if (auto found = lavagrid::find_builtin(name)) {
        c.contexts.push_back(std::move(*found));
      } else {
        throw FormatError(where + ": unknown builtin context '" + name + "'");
      }
    } else {
      try {
        auto ctx = lavagrid::context_from_json(item);
        if (ctx.name.empty()) ctx.name = "context-" + std::to_string(i);
        c.contexts.push_back(std::move(ctx));
      } catch (const std::exception& e) {
        throw FormatError(where + ": " + e.what());
      }
    }
  }
  read_field(j, "config", "seeds", c.seeds);
  read_field(j, "config", "gamma", c.gamma);
  read_field(j, "config", "horizon", c.horizon);
  read_field(j, "config", "episodes_per_evaluation", c.episodes_per_evaluation);
  read_field(j, "config", "eum_weight_samples", c.eum_weight_samples);
  read_field(j, "config", "front_weights", c.front_weights);
  if (j.contains("training")) {
    const auto& t = j["training"];
    if (!t.is_object()) throw FormatError("config.training: expected an object");
    check_keys(t, "config.training",
               {"episodes", "grid_resolution", "alpha", "epsilon_start", "epsilon_end", "anneal_fraction",
                "share_experience"});
    read_field(t, "config.training", "episodes", c.training.episodes);
    read_field(t, "config.training", "grid_resolution", c.training.grid_resolution);
    read_field(t, "config.training", "alpha", c.training.q.alpha);
    read_field(t, "config.training", "epsilon_start", c.training.q.epsilon_start);
    read_field(t, "config.training", "epsilon_end", c.training.q.epsilon_end);
    read_field(t, "config.training", "anneal_fraction", c.training.q.anneal_fraction);
    read_field(t, "config.training", "share_experience", c.training.q.share_experience);
  }
  if (j.contains("randomization")) {
    const auto& r = j["randomization"];
    if (!r.is_object()) throw FormatError("config.randomization: expected an object");
    check_keys(r, "config.randomization", {"width", "height", "lava_min", "lava_max", "max_attempts"});
    read_field(r, "config.randomization", "width", c.randomization.width);
    read_field(r, "config.randomization", "height", c.randomization.height);
    read_field(r, "config.randomization", "lava_min", c.randomization.lava_min);
    read_field(r, "config.randomization", "lava_max", c.randomization.lava_max);
    read_field(r, "config.randomization", "max_attempts", c.randomization.max_attempts);
  }
  if (j.contains("oracle")) {
    const auto& o = j["oracle"];
    if (!o.is_object()) throw FormatError("config.oracle: expected an object");
    check_keys(o, "config.oracle", {"cap", "specialist_fallback"});
    read_field(o, "config.oracle", "cap", c.oracle_cap);
    read_field(o, "config.oracle", "specialist_fallback", c.specialist_fallback);
  }
  c.training.gamma = c.gamma;
  c.training.horizon = c.horizon;
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  } catch (const EnvironmentError& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  return c;
}

EvalConfig EvalConfig::load(const std::filesystem::path& path) {
  return from_json(parse_json(read_file(path), path.string()));
}

// ---------------------------------------------------------------------------
// Reference fronts

namespace {

RandomStream reference_stream(const lavagrid::Context& ctx) {
  return RandomStream(0, stream_tag(name_tag("reference"), name_tag(ctx.name)));
}

double safe_hv_norm(const ParetoFront& front) {
  if (front.empty()) return 0.0;
  try {
    return hv_norm(front, bounds_of(front));
  } catch (const DegenerateRangeError&) {
    return 0.0;
  }
}

}  // namespace

std::vector<ReferenceFront> make_reference_fronts(const EvalConfig& config, std::size_t threads) {
  std::vector<ReferenceFront> out(config.contexts.size());
  parallel_for(out.size(), threads, [&](std::size_t i) {
    const auto& ctx = config.contexts[i];
    auto exact = oracle::pareto_backward_induction(ctx, config.gamma, config.horizon, config.oracle_cap);
    ReferenceFront ref{ctx.name, std::move(exact.front), Provenance::oracle_exact, exact.epsilon, 0.0};
    if (exact.approximate) {
      ref.provenance = Provenance::oracle_eps_pruned;
      if (config.specialist_fallback) {
        auto stream = reference_stream(ctx);
        const auto spec = oracle::specialist_front(ctx, config.training, stream);
        std::vector<ValueVector> merged(ref.front.begin(), ref.front.end());
        merged.insert(merged.end(), spec.begin(), spec.end());
        const auto united = pareto_filter(merged);
        const bool uses_specialist = std::any_of(united.begin(), united.end(), [&](const ValueVector& v) {
          return std::find(ref.front.begin(), ref.front.end(), v) == ref.front.end();
        });
        ref.front = united;
        if (uses_specialist) ref.provenance = Provenance::specialist;
      }
    }
    if (ref.front.empty()) throw std::runtime_error("no reference front obtainable for '" + ctx.name + "'");
    ref.hv_norm = safe_hv_norm(ref.front);
    out[i] = std::move(ref);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Cells and aggregates

Aggregates aggregate_cells(const std::vector<Cell>& cells) {
  std::vector<double> n;
  std::vector<double> e;
  for (const auto& c : cells) {
    if (c.excluded) continue;
    n.push_back(c.nhgr);
    e.push_back(c.eugr);
  }
  Aggregates a;
  a.cells = n.size();
  if (n.empty()) return a;
  a.nhgr_iqm = iqm(n);
  a.nhgr_gap = optimality_gap(n);
  a.eugr_iqm = iqm(e);
  a.eugr_gap = optimality_gap(e);
  return a;
}

bool EvalReport::approximate_reference() const {
  return std::any_of(references.begin(), references.end(),
                     [](const ReferenceFront& r) { return r.provenance != Provenance::oracle_exact; });
}

namespace {

struct AgentOutput {
  ParetoFront front;
  std::vector<std::size_t> weight_index;
};

void score_cell(Cell& cell, const ReferenceFront& ref, std::span<const WeightVector> weights) {
  cell.provenance = ref.provenance;
  cell.excluded = ref.hv_norm <= 0.0;
  cell.eum = eum(cell.front, weights);
  cell.hypervolume = hypervolume_exact(cell.front, ValueVector(component_min(ref.front)));
  if (cell.excluded) return;
  cell.nhgr = nhgr(cell.front, ref.front);
  try {
    const auto g = eugr(cell.front, ref.front, weights);
    cell.eugr = g.ratio;
    cell.eugr_negative_reference = g.negative_reference;
  } catch (const UndefinedRatioError&) {
    cell.excluded = true;
    cell.nhgr = 0.0;
  }
}

std::vector<WeightVector> eum_weights_for(const EvalConfig& config, std::uint64_t seed) {
  RandomStream stream(seed, name_tag("eum-weights"));
  std::vector<WeightVector> ws;
  ws.reserve(config.eum_weight_samples);
  for (std::size_t i = 0; i < config.eum_weight_samples; ++i) {
    ws.push_back(sample_simplex(stream, lavagrid::kNumObjectives));
  }
  return ws;
}

RandomStream generalist_stream(std::uint64_t seed) { return RandomStream(seed, name_tag("train/generalist")); }

RandomStream specialist_stream(std::uint64_t seed, const std::string& ctx) {
  return RandomStream(seed, stream_tag(name_tag("train/specialist"), name_tag(ctx)));
}

RandomStream random_stream(std::uint64_t seed, const std::string& ctx) {
  return RandomStream(seed, stream_tag(name_tag("random-policy"), name_tag(ctx)));
}

json snapshot_metadata(const EvalConfig& config, std::uint64_t seed, const RandomStream& stream,
                       std::string_view kind, std::string_view context) {
  json m;
  m["software_version"] = kSoftwareVersion;
  m["agent"] = kind;
  m["seed"] = seed;
  if (!context.empty()) m["context"] = context;
  m["episodes"] = config.training.episodes;
  m["gamma"] = config.gamma;
  m["horizon"] = config.horizon;
  m["grid_resolution"] = config.training.grid_resolution;
  m["rng"] = {{"generator", RandomStream::kGeneratorName},
              {"version", RandomStream::kGeneratorVersion},
              {"base_seed", stream.base_seed()},
              {"stream_id", stream.stream_id()}};
  return m;
}

agents::TabularQ load_table(const std::filesystem::path& path, const EvalConfig& config) {
  if (!std::filesystem::exists(path)) throw MissingSnapshotError("missing snapshot " + path.string());
  auto q = agents::snapshot_from_json(parse_json(read_file(path), path.string()));
  const auto grid = agents::WeightGrid::simplex(lavagrid::kNumObjectives, config.training.grid_resolution);
  if (q.weight_count() != grid.size()) {
    throw FormatError(path.string() + ": weight grid does not match the configuration");
  }
  return q;
}

agents::TabularQ generalist_table(const EvalConfig& config, std::uint64_t seed, const EvalOptions& options) {
  if (options.snapshots) return load_table(*options.snapshots / generalist_snapshot_name(seed), config);
  auto stream = generalist_stream(seed);
  return agents::train_generalist(config.randomization, config.training, stream);
}

agents::TabularQ specialist_table(const EvalConfig& config, std::uint64_t seed, const lavagrid::Context& ctx,
                                  const EvalOptions& options) {
  if (options.snapshots) return load_table(*options.snapshots / specialist_snapshot_name(seed, ctx.name), config);
  auto stream = specialist_stream(seed, ctx.name);
  return agents::train_specialist(ctx, config.training, stream);
}

void check_random_snapshot(const EvalConfig& config, std::uint64_t seed, const EvalOptions& options) {
  (void)config;
  if (!options.snapshots) return;
  const auto path = *options.snapshots / random_snapshot_name(seed);
  if (!std::filesystem::exists(path)) throw MissingSnapshotError("missing snapshot " + path.string());
  const auto j = parse_json(read_file(path), path.string());
  if (j.value("agent", std::string()) != "random" || j.value("seed", std::uint64_t{0}) != seed) {
    throw FormatError(path.string() + ": not a random-policy snapshot for seed " + std::to_string(seed));
  }
}

AgentOutput front_from_table(const agents::TabularQ& q, const EvalConfig& config, const lavagrid::Context& ctx) {
  const auto grid = agents::WeightGrid::simplex(lavagrid::kNumObjectives, config.training.grid_resolution);
  auto r = agents::build_front(q, grid, ctx, config.gamma, config.horizon, config.sweep_size());
  return {std::move(r.front), std::move(r.weight_index)};
}

/// Shared evaluation driver. `agent_front(seed_pos, ctx_pos)` produces the
/// cell's front; it is called concurrently for distinct cells.
template <class AgentFn>
EvalReport run_protocol(const EvalConfig& config, const EvalOptions& options, std::string label,
                        AgentFn&& agent_front) {
  config.validate();
  EvalReport report;
  report.config = config;
  report.agent = options.self_test ? "oracle" : std::move(label);
  report.references = make_reference_fronts(config, options.threads);
  for (auto seed : config.seeds) report.eum_weights.push_back(eum_weights_for(config, seed));

  const std::size_t nc = config.contexts.size();
  report.cells.resize(config.seeds.size() * nc);
  parallel_for(report.cells.size(), options.threads, [&](std::size_t idx) {
    const std::size_t si = idx / nc;
    const std::size_t ci = idx % nc;
    Cell& cell = report.cells[idx];
    cell.seed = config.seeds[si];
    cell.context = config.contexts[ci].name;
    if (options.self_test) {
      cell.front = report.references[ci].front;
    } else {
      auto out = agent_front(si, ci);
      cell.front = std::move(out.front);
      cell.weight_index = std::move(out.weight_index);
    }
    score_cell(cell, report.references[ci], report.eum_weights[si]);
  });
  for (const auto& r : report.references) {
    if (r.hv_norm <= 0.0) report.excluded_contexts.push_back(r.context);
  }
  report.aggregates = aggregate_cells(report.cells);
  return report;
}

}  // namespace

EvalReport evaluate_generalist(const EvalConfig& config, const EvalOptions& options) {
  config.validate();
  std::vector<std::optional<agents::TabularQ>> tables(config.seeds.size());
  if (!options.self_test) {
    parallel_for(tables.size(), options.threads,
                 [&](std::size_t i) { tables[i] = generalist_table(config, config.seeds[i], options); });
  }
  return run_protocol(config, options, "generalist", [&](std::size_t si, std::size_t ci) {
    return front_from_table(*tables[si], config, config.contexts[ci]);
  });
}

EvalReport evaluate_specialists(const EvalConfig& config, const EvalOptions& options) {
  return run_protocol(config, options, "specialist", [&](std::size_t si, std::size_t ci) {
    const auto& ctx = config.contexts[ci];
    const auto q = specialist_table(config, config.seeds[si], ctx, options);
    return front_from_table(q, config, ctx);
  });
}

EvalReport evaluate_random(const EvalConfig& config, const EvalOptions& options) {
  config.validate();
  if (!options.self_test) {
    for (auto seed : config.seeds) check_random_snapshot(config, seed, options);
  }
  return run_protocol(config, options, "random", [&](std::size_t si, std::size_t ci) {
    const auto& ctx = config.contexts[ci];
    auto stream = random_stream(config.seeds[si], ctx.name);
    return AgentOutput{agents::random_policy_front(ctx, config.sweep_size(), config.gamma, config.horizon, stream), {}};
  });
}

EvalReport evaluate(const EvalConfig& config, const EvalOptions& options) {
  switch (config.agent) {
    case AgentKind::generalist: return evaluate_generalist(config, options);
    case AgentKind::specialist: return evaluate_specialists(config, options);
    case AgentKind::random: return evaluate_random(config, options);
  }
  throw std::logic_error("evaluate: unknown agent kind");
}

// ---------------------------------------------------------------------------
// Snapshots

std::string generalist_snapshot_name(std::uint64_t seed) {
  return "generalist-seed" + std::to_string(seed) + ".json";
}

std::string specialist_snapshot_name(std::uint64_t seed, std::string_view context) {
  return "specialist-seed" + std::to_string(seed) + "-" + file_stem(context) + ".json";
}

std::string random_snapshot_name(std::uint64_t seed) { return "random-seed" + std::to_string(seed) + ".json"; }

std::vector<std::string> train_and_save(const EvalConfig& config, const std::filesystem::path& dir,
                                        std::size_t threads) {
  config.validate();
  std::filesystem::create_directories(dir);
  std::vector<std::string> names;
  switch (config.agent) {
    case AgentKind::generalist: {
      for (auto seed : config.seeds) names.push_back(generalist_snapshot_name(seed));
      parallel_for(config.seeds.size(), threads, [&](std::size_t i) {
        const auto seed = config.seeds[i];
        auto stream = generalist_stream(seed);
        const auto meta = snapshot_metadata(config, seed, stream, "generalist", "");
        const auto q = agents::train_generalist(config.randomization, config.training, stream);
        write_file(dir / names[i], agents::snapshot_to_json(q, meta).dump() + "\n");
      });
      break;
    }
    case AgentKind::specialist: {
      const std::size_t nc = config.contexts.size();
      for (auto seed : config.seeds) {
        for (const auto& c : config.contexts) names.push_back(specialist_snapshot_name(seed, c.name));
      }
      parallel_for(names.size(), threads, [&](std::size_t idx) {
        const auto seed = config.seeds[idx / nc];
        const auto& ctx = config.contexts[idx % nc];
        auto stream = specialist_stream(seed, ctx.name);
        const auto meta = snapshot_metadata(config, seed, stream, "specialist", ctx.name);
        const auto q = agents::train_specialist(ctx, config.training, stream);
        write_file(dir / names[idx], agents::snapshot_to_json(q, meta).dump() + "\n");
      });
      break;
    }
    case AgentKind::random: {
      for (auto seed : config.seeds) {
        names.push_back(random_snapshot_name(seed));
        json j = {{"schema", "morlgen.random-policy/1"},
                  {"agent", "random"},
                  {"seed", seed},
                  {"software_version", kSoftwareVersion},
                  {"rng", {{"generator", RandomStream::kGeneratorName}, {"version", RandomStream::kGeneratorVersion}}}};
        write_file(dir / names.back(), j.dump(2) + "\n");
      }
      break;
    }
  }
  return names;
}

// ---------------------------------------------------------------------------
// Report serialization

json EvalReport::to_json() const {
  json j;
  j["schema"] = kReportSchema;
  j["software_version"] = kSoftwareVersion;
  j["agent"] = agent;
  j["optimal_front_definition"] =
      "finite-horizon Pareto front over " + std::to_string(config.horizon) + " steps, discount applied per step";
  j["config"] = config.to_json();
  j["rng"] = {{"generator", RandomStream::kGeneratorName}, {"version", RandomStream::kGeneratorVersion}};
  j["raw_hypervolume_reference"] = "component-wise minimum of the reference front";
  j["references"] = json::array();
  for (const auto& r : references) {
    j["references"].push_back({{"context", r.context},
                               {"provenance", to_string(r.provenance)},
                               {"epsilon", r.epsilon},
                               {"hv_norm", r.hv_norm},
                               {"front", front_to_json(r.front)}});
  }
  j["eum_weights"] = json::array();
  for (std::size_t i = 0; i < eum_weights.size(); ++i) {
    j["eum_weights"].push_back({{"seed", config.seeds.at(i)}, {"weights", weights_to_json(eum_weights[i])}});
  }
  j["cells"] = json::array();
  for (const auto& c : cells) {
    json cj = {{"seed", c.seed},
               {"context", c.context},
               {"provenance", to_string(c.provenance)},
               {"excluded", c.excluded},
               {"eum", c.eum},
               {"hypervolume", c.hypervolume},
               {"front", front_to_json(c.front)},
               {"weight_index", c.weight_index}};
    if (!c.excluded) {
      cj["nhgr"] = c.nhgr;
      cj["eugr"] = c.eugr;
      cj["eugr_negative_reference"] = c.eugr_negative_reference;
    }
    j["cells"].push_back(std::move(cj));
  }
  j["excluded_contexts"] = excluded_contexts;
  j["aggregates"] = {{"cells", aggregates.cells},
                     {"nhgr", {{"iqm", aggregates.nhgr_iqm}, {"optimality_gap", aggregates.nhgr_gap}}},
                     {"eugr", {{"iqm", aggregates.eugr_iqm}, {"optimality_gap", aggregates.eugr_gap}}}};
  return j;
}

EvalReport EvalReport::from_json(const json& j) {
  if (!j.is_object() || !j.contains("schema") || j["schema"] != kReportSchema) {
    throw FormatError("report: schema mismatch (expected " + std::string(kReportSchema) + ")");
  }
  try {
    EvalReport r;
    r.config = EvalConfig::from_json(j.at("config"));
    r.agent = j.at("agent").get<std::string>();
    for (const auto& rj : j.at("references")) {
      ReferenceFront ref;
      ref.context = rj.at("context").get<std::string>();
      ref.provenance = provenance_from(rj.at("provenance").get<std::string>());
      ref.epsilon = rj.at("epsilon").get<double>();
      ref.hv_norm = rj.at("hv_norm").get<double>();
      ref.front = front_from_json(rj.at("front"));
      r.references.push_back(std::move(ref));
    }
    for (const auto& wj : j.at("eum_weights")) {
      std::vector<WeightVector> ws;
      for (const auto& w : wj.at("weights")) ws.emplace_back(w.get<std::vector<double>>());
      r.eum_weights.push_back(std::move(ws));
    }
    for (const auto& cj : j.at("cells")) {
      Cell c;
      c.seed = cj.at("seed").get<std::uint64_t>();
      c.context = cj.at("context").get<std::string>();
      c.provenance = provenance_from(cj.at("provenance").get<std::string>());
      c.excluded = cj.at("excluded").get<bool>();
      c.eum = cj.at("eum").get<double>();
      c.hypervolume = cj.at("hypervolume").get<double>();
      c.front = front_from_json(cj.at("front"));
      c.weight_index = cj.at("weight_index").get<std::vector<std::size_t>>();
      if (!c.excluded) {
        c.nhgr = cj.at("nhgr").get<double>();
        c.eugr = cj.at("eugr").get<double>();
        c.eugr_negative_reference = cj.at("eugr_negative_reference").get<bool>();
      }
      r.cells.push_back(std::move(c));
    }
    r.excluded_contexts = j.at("excluded_contexts").get<std::vector<std::string>>();
    const auto& a = j.at("aggregates");
    r.aggregates.cells = a.at("cells").get<std::size_t>();
    r.aggregates.nhgr_iqm = a.at("nhgr").at("iqm").get<double>();
    r.aggregates.nhgr_gap = a.at("nhgr").at("optimality_gap").get<double>();
    r.aggregates.eugr_iqm = a.at("eugr").at("iqm").get<double>();
    r.aggregates.eugr_gap = a.at("eugr").at("optimality_gap").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("report: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("report: ") + e.what());
  }
}

std::string EvalReport::to_csv() const {
  std::ostringstream out;
  out << "seed,context,metric,value,provenance\n";
  for (const auto& c : cells) {
    const auto prov = to_string(c.provenance);
    auto row = [&](std::string_view metric, double v) {
      out << c.seed << ',' << c.context << ',' << metric << ',' << format_double(v) << ',' << prov << '\n';
    };
    if (!c.excluded) {
      row("nhgr", c.nhgr);
      row("eugr", c.eugr);
    }
    row("eum", c.eum);
    row("hypervolume", c.hypervolume);
  }
  auto agg = [&](std::string_view metric, double v) {
    out << "all,all," << metric << ',' << format_double(v) << ",aggregate\n";
  };
  agg("nhgr_iqm", aggregates.nhgr_iqm);
  agg("nhgr_optimality_gap", aggregates.nhgr_gap);
  agg("eugr_iqm", aggregates.eugr_iqm);
  agg("eugr_optimality_gap", aggregates.eugr_gap);
  return out.str();
}

void write_report(const EvalReport& report, const std::filesystem::path& dir) {
  write_file(dir / "report.json", report.to_json().dump(2) + "\n");
  write_file(dir / "report.csv", report.to_csv());
  for (const auto& r : report.references) {
    std::ostringstream s;
    write_front_csv(s, r.front);
    write_file(dir / "references" / (file_stem(r.context) + ".csv"), s.str());
  }
  for (const auto& c : report.cells) {
    std::ostringstream s;
    write_front_csv(s, c.front);
    write_file(dir / "fronts" / ("seed-" + std::to_string(c.seed)) / (file_stem(c.context) + ".csv"), s.str());
  }
}

}  // namespace morlgen::harness
