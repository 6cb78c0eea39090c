#pragma once

// Command-line pipeline: oracle, train, eval and report subcommands. Every
// subcommand writes manifest.json into its output directory before results.

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "json.hpp"
#include "morlgen/harness.hpp"

namespace morlgen::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitApproximate = 3;

inline constexpr std::string_view kManifestSchema = "morlgen.run-manifest/1";

struct RunManifest {
  std::string subcommand;
  std::string config_path;
  std::string output_dir;
  std::optional<std::uint64_t> base_seed;
  nlohmann::json extra = nlohmann::json::object();

  nlohmann::json to_json() const;
  void write(const std::filesystem::path& dir) const;
};

struct OracleArgs {
  std::string context;  // builtin name or context JSON file
  double gamma = lavagrid::kDiscount;
  std::size_t horizon = lavagrid::kStepLimit;
  std::size_t cap = 16;
  std::filesystem::path out;
  std::size_t parallel = 0;
};

struct TrainArgs {
  std::filesystem::path config;
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;
  std::size_t parallel = 0;
};

struct EvalArgs {
  std::filesystem::path config;
  std::optional<std::filesystem::path> snapshots;
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;
  std::size_t parallel = 0;
  bool self_test = false;
};

int cmd_oracle(const OracleArgs& args, std::ostream& out, std::ostream& err);
int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err);
int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err);
int cmd_report(const std::filesystem::path& report, std::ostream& out, std::ostream& err);

/// Plain-text table of HV / EUM / NHGR / EUGR per context plus aggregates
/// recomputed from the cells.
std::string render_report(const harness::EvalReport& report);
/// Two-row IQM / optimality-gap summary.
std::string render_summary(const harness::Aggregates& a);

/// Parses argv and dispatches. Returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace morlgen::cli
