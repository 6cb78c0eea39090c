#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "morlgen/cli.hpp"
#include "morlgen/front_io.hpp"
#include "morlgen/oracle.hpp"
#include "support.hpp"

using namespace morlgen;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "morlgen");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("morlgen-cli-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const std::string& agent, std::size_t episodes) {
  json j{{"schema", harness::kConfigSchema},
         {"agent", agent},
         {"contexts", {"micro-detour", "micro-ridge"}},
         {"seeds", {0, 1}},
         {"horizon", 32},
         {"training", {{"episodes", episodes}}},
         {"randomization", {{"width", 5}, {"height", 5}, {"lava_min", 0}, {"lava_max", 8}}},
         {"oracle", {{"cap", 1000000}}}};
  const auto p = dir / ("config-" + agent + ".json");
  harness::write_file(p, j.dump(2));
  return p;
}

std::string slurp_tree(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename() != "manifest.json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string all;
  for (const auto& f : files) all += fs::relative(f, dir).string() + "\n" + harness::read_file(f);
  return all;
}

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(run_cli({"--help"}).code == 0);
  CHECK(run_cli({"oracle", "--help"}).code == 0);
  CHECK(run_cli({}).code == cli::kExitInput);
  CHECK(run_cli({"frobnicate"}).code == cli::kExitInput);
  CHECK(run_cli({"oracle", "--context", "Maze"}).code == cli::kExitInput);
}

TEST_CASE("oracle: builtin manifest echoes the context weights") {
  const auto dir = scratch("maze");
  const auto r = run_cli({"oracle", "--context", "Maze", "--cap", "2", "--out", dir.string()});
  CHECK(r.code == cli::kExitApproximate);
  CHECK(fs::exists(dir / "front.csv"));
  CHECK(fs::exists(dir / "witnesses.json"));
  const auto manifest = json::parse(harness::read_file(dir / "manifest.json"));
  CHECK(manifest["subcommand"] == "oracle");
  CHECK(manifest["context"]["weights"] == json::array({0.05, 0.05, 0.90}));
  CHECK(manifest["software_version"] == harness::kSoftwareVersion);
  const auto sidecar = json::parse(harness::read_file(dir / "witnesses.json"));
  CHECK(sidecar["approximate"] == true);
}

TEST_CASE("oracle: micro context front equals enumeration") {
  const auto dir = scratch("micro-oracle");
  const auto r = run_cli({"oracle", "--context", "micro-ridge", "--horizon", "12", "--cap", "1000000", "--out",
                          dir.string()});
  CHECK(r.code == cli::kExitOk);
  const auto written = load_front_csv(dir / "front.csv");
  const auto ctx = *lavagrid::find_builtin("micro-ridge");
  const auto expected = oracle::enumerate_returns(ctx, lavagrid::kDiscount, 12);
  CHECK(testing_support::same_points(written.points(), expected.points(), 1e-9));
}

TEST_CASE("oracle: context files and their errors") {
  const auto dir = scratch("ctx-file");
  const auto ctx_path = dir / "ctx.json";
  harness::write_file(ctx_path, lavagrid::context_to_json(*lavagrid::find_builtin("micro-detour")).dump(2));
  CHECK(run_cli({"oracle", "--context", ctx_path.string(), "--horizon", "10", "--out", (dir / "a").string()}).code ==
        cli::kExitOk);
  CHECK(run_cli({"oracle", "--context", (dir / "missing.json").string(), "--out", (dir / "b").string()}).code ==
        cli::kExitInput);
  harness::write_file(dir / "bad.json", "{\n  \"name\": \"x\",\n  \"tiles\": [\n");
  const auto r = run_cli({"oracle", "--context", (dir / "bad.json").string(), "--out", (dir / "c").string()});
  CHECK(r.code == cli::kExitInput);
  CHECK(r.err.find("bad.json:") != std::string::npos);
}

TEST_CASE("train: zero episodes and bad schema are input errors") {
  const auto dir = scratch("train-errors");
  const auto cfg = write_config(dir, "specialist", 0);
  CHECK(run_cli({"train", "--config", cfg.string(), "--out", (dir / "o").string()}).code == cli::kExitInput);
  harness::write_file(dir / "wrong.json", R"({"schema": "other/9", "contexts": ["Maze"], "seeds": [0]})");
  CHECK(run_cli({"train", "--config", (dir / "wrong.json").string(), "--out", (dir / "p").string()}).code ==
        cli::kExitInput);
}

TEST_CASE("train: smoke config is quick and reproducible") {
  const auto dir = scratch("train");
  const auto cfg = write_config(dir, "specialist", 500);
  const auto t0 = std::chrono::steady_clock::now();
  CHECK(run_cli({"train", "--config", cfg.string(), "--out", (dir / "a").string()}).code == cli::kExitOk);
  CHECK(std::chrono::steady_clock::now() - t0 < std::chrono::seconds(10));
  CHECK(run_cli({"train", "--config", cfg.string(), "--out", (dir / "b").string(), "--parallel", "2"}).code ==
        cli::kExitOk);
  CHECK(slurp_tree(dir / "a") == slurp_tree(dir / "b"));
  CHECK(fs::exists(dir / "a" / "manifest.json"));
}

TEST_CASE("eval: snapshots, missing snapshot, self-test, idempotence, report") {
  const auto dir = scratch("eval");
  const auto cfg = write_config(dir, "specialist", 1000);
  REQUIRE(run_cli({"train", "--config", cfg.string(), "--out", (dir / "snap").string()}).code == cli::kExitOk);
  const auto a = run_cli({"eval", "--config", cfg.string(), "--snapshots", (dir / "snap").string(), "--out",
                          (dir / "a").string()});
  CHECK(a.code == cli::kExitOk);
  CHECK(a.out.find("NHGR") != std::string::npos);
  const auto b = run_cli({"eval", "--config", cfg.string(), "--out", (dir / "b").string(), "--parallel", "3"});
  CHECK(b.code == cli::kExitOk);
  CHECK(slurp_tree(dir / "a") == slurp_tree(dir / "b"));
  CHECK(harness::read_file(dir / "a" / "report.json") == harness::read_file(dir / "b" / "report.json"));

  const auto self = run_cli({"eval", "--config", cfg.string(), "--out", (dir / "self").string(), "--self-test"});
  CHECK(self.code == cli::kExitOk);
  CHECK(self.out.find("1.000") != std::string::npos);
  CHECK(self.out.find("0.000") != std::string::npos);

  fs::remove(dir / "snap" / harness::specialist_snapshot_name(1, "micro-ridge"));
  CHECK(run_cli({"eval", "--config", cfg.string(), "--snapshots", (dir / "snap").string(), "--out",
                 (dir / "c").string()})
            .code == cli::kExitInput);

  const auto rep = run_cli({"report", (dir / "a" / "report.json").string()});
  CHECK(rep.code == cli::kExitOk);
  for (const char* col : {"HV", "EUM", "NHGR", "EUGR"}) CHECK(rep.out.find(col) != std::string::npos);

  // aggregates printed by report equal those recomputed from the cells
  const auto report = harness::EvalReport::from_json(json::parse(harness::read_file(dir / "a" / "report.json")));
  const auto again = harness::aggregate_cells(report.cells);
  CHECK(again.nhgr_iqm == report.aggregates.nhgr_iqm);
  CHECK(again.nhgr_gap == report.aggregates.nhgr_gap);
  CHECK(rep.out.find(cli::render_summary(again)) != std::string::npos);
}

TEST_CASE("report: truncated JSON, schema mismatch and tampered aggregates") {
  const auto dir = scratch("report");
  const auto cfg = write_config(dir, "random", 1);
  REQUIRE(run_cli({"eval", "--config", cfg.string(), "--out", (dir / "a").string()}).code == cli::kExitOk);
  const auto text = harness::read_file(dir / "a" / "report.json");
  harness::write_file(dir / "truncated.json", text.substr(0, text.size() / 2));
  CHECK(run_cli({"report", (dir / "truncated.json").string()}).code == cli::kExitInput);
  auto j = json::parse(text);
  j["schema"] = "morlgen.eval-report/99";
  harness::write_file(dir / "schema.json", j.dump());
  CHECK(run_cli({"report", (dir / "schema.json").string()}).code == cli::kExitInput);
  j = json::parse(text);
  j["aggregates"]["nhgr"]["iqm"] = 0.5;
  harness::write_file(dir / "tampered.json", j.dump());
  CHECK(run_cli({"report", (dir / "tampered.json").string()}).code == cli::kExitInput);
  CHECK(run_cli({"report", (dir / "nope.json").string()}).code == cli::kExitInput);
}
