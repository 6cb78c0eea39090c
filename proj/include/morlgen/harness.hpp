#pragma once

// Evaluation protocol: reference fronts per context, agent fronts per
// (seed, context), NHGR / EUGR / EUM / raw hypervolume per cell, and IQM and
// optimality-gap aggregates. Everything written here is a function of the
// configuration alone; thread count never leaks into results.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "morlgen/agents.hpp"
#include "morlgen/lavagrid.hpp"
#include "morlgen/pareto.hpp"

namespace morlgen::harness {

inline constexpr std::string_view kSoftwareVersion = "morlgen 0.1.0";
inline constexpr std::string_view kConfigSchema = "morlgen.eval-config/1";
inline constexpr std::string_view kReportSchema = "morlgen.eval-report/1";

enum class AgentKind { generalist, specialist, random };
std::string_view to_string(AgentKind k);

struct EvalConfig {
  std::string domain = "lavagrid";
  AgentKind agent = AgentKind::generalist;
  std::vector<lavagrid::Context> contexts;
  std::vector<std::uint64_t> seeds;
  double gamma = lavagrid::kDiscount;
  std::size_t horizon = lavagrid::kStepLimit;
  /// Caps the number of greedy rollouts (grid weights) per cell.
  std::size_t episodes_per_evaluation = 100;
  /// Weights sampled per seed for EUM / EUGR.
  std::size_t eum_weight_samples = 100;
  /// Grid weights forming an agent front; 0 means the whole grid.
  std::size_t front_weights = 0;
  agents::TrainingBudget training{};
  lavagrid::RandomizationSpace randomization{};
  std::size_t oracle_cap = 16;
  /// Union an approximate oracle front with a specialist front.
  bool specialist_fallback = true;

  /// Throws std::invalid_argument on violated invariants.
  void validate() const;
  /// Number of grid weights actually evaluated per cell.
  std::size_t sweep_size() const;

  nlohmann::json to_json() const;
  /// Missing fields take defaults; contexts accept builtin names, the
  /// group "micro-suite" and inline context objects. Throws FormatError.
  static EvalConfig from_json(const nlohmann::json& j);
  static EvalConfig load(const std::filesystem::path& path);
};

enum class Provenance { oracle_exact, oracle_eps_pruned, specialist };
std::string_view to_string(Provenance p);

struct ReferenceFront {
  std::string context;
  ParetoFront front;
  Provenance provenance = Provenance::oracle_exact;
  double epsilon = 0.0;
  /// hv_norm of the front against its own bounds; 0 when degenerate.
  double hv_norm = 0.0;
};

/// Oracle first; when the cap binds and the fallback is enabled, the
/// Pareto filter of the union of the epsilon front and a specialist front.
std::vector<ReferenceFront> make_reference_fronts(const EvalConfig& config, std::size_t threads = 1);

struct Cell {
  std::uint64_t seed = 0;
  std::string context;
  ParetoFront front;
  /// Generating grid index per front point (empty for the random baseline).
  std::vector<std::size_t> weight_index;
  Provenance provenance = Provenance::oracle_exact;
  bool excluded = false;  // reference front has zero normalized hypervolume
  double nhgr = 0.0;
  double eugr = 0.0;
  bool eugr_negative_reference = false;
  double eum = 0.0;
  double hypervolume = 0.0;
};

struct Aggregates {
  std::size_t cells = 0;
  double nhgr_iqm = 0.0;
  double nhgr_gap = 0.0;
  double eugr_iqm = 0.0;
  double eugr_gap = 0.0;
};

struct EvalReport {
  EvalConfig config;
  /// Label of the evaluated agent; "oracle" in self-test mode.
  std::string agent;
  std::vector<ReferenceFront> references;
  /// One weight set per seed, in seed order.
  std::vector<std::vector<WeightVector>> eum_weights;
  /// Ordered by (seed position, context position).
  std::vector<Cell> cells;
  std::vector<std::string> excluded_contexts;
  Aggregates aggregates;

  bool approximate_reference() const;

  nlohmann::json to_json() const;
  static EvalReport from_json(const nlohmann::json& j);
  /// Rows: seed,context,metric,value,provenance.
  std::string to_csv() const;
};

/// IQM and optimality gap over the non-excluded cells.
Aggregates aggregate_cells(const std::vector<Cell>& cells);

struct EvalOptions {
  std::size_t threads = 1;
  /// Load trained tables from here instead of training in-process.
  std::optional<std::filesystem::path> snapshots;
  /// Substitute the reference front for the agent front.
  bool self_test = false;
};

EvalReport evaluate_generalist(const EvalConfig& config, const EvalOptions& options = {});
EvalReport evaluate_specialists(const EvalConfig& config, const EvalOptions& options = {});
EvalReport evaluate_random(const EvalConfig& config, const EvalOptions& options = {});
/// Dispatches on config.agent.
EvalReport evaluate(const EvalConfig& config, const EvalOptions& options = {});

// Snapshot files, one per trained table.
std::string generalist_snapshot_name(std::uint64_t seed);
std::string specialist_snapshot_name(std::uint64_t seed, std::string_view context);
std::string random_snapshot_name(std::uint64_t seed);

/// Trains what the config's agent kind needs and writes the snapshots into
/// `dir`. Returns the written file names in deterministic order.
std::vector<std::string> train_and_save(const EvalConfig& config, const std::filesystem::path& dir,
                                        std::size_t threads = 1);

/// Writes report.json, report.csv, references/<context>.csv and
/// fronts/seed-<seed>/<context>.csv.
void write_report(const EvalReport& report, const std::filesystem::path& dir);

/// A snapshot required by the evaluation is absent.
struct MissingSnapshotError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parses JSON text; syntax errors become FormatError("<source>:<line>:<column>: ...").
nlohmann::json parse_json(std::string_view text, std::string_view source);

/// Writes text to a file, replacing it, throwing std::runtime_error on failure.
void write_file(const std::filesystem::path& path, std::string_view text);
std::string read_file(const std::filesystem::path& path);

}  // namespace morlgen::harness
