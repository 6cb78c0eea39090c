#include <algorithm>
#include <filesystem>
#include <vector>

#include "doctest.h"
#include "morlgen/harness.hpp"
#include "morlgen/oracle.hpp"
#include "morlgen/specialist.hpp"

using namespace morlgen;
using namespace morlgen::harness;
using nlohmann::json;

namespace {

json micro_config(const std::string& agent, std::size_t episodes) {
  return json{{"schema", kConfigSchema},
              {"agent", agent},
              {"contexts", {"micro-suite"}},
              {"seeds", {0, 1}},
              {"horizon", 32},
              {"training", {{"episodes", episodes}}},
              {"randomization", {{"width", 5}, {"height", 5}, {"lava_min", 0}, {"lava_max", 8}}},
              {"oracle", {{"cap", 1000000}}}};
}

// Sorted-sample trimmed mean dropping floor(n/4) from each end.
double iqm_oracle(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t cut = v.size() / 4;
  double s = 0.0;
  std::size_t n = 0;
  for (std::size_t i = cut; i + cut < v.size(); ++i, ++n) s += v[i];
  return s / static_cast<double>(n);
}

double gap_oracle(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x < 1.0 ? 1.0 - x : 0.0;
  return s / static_cast<double>(v.size());
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("morlgen-test-" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("config parsing: defaults, groups, round-trip") {
  const auto c = EvalConfig::from_json(micro_config("specialist", 1000));
  CHECK(c.agent == AgentKind::specialist);
  CHECK(c.contexts.size() == 5);
  CHECK(c.seeds == std::vector<std::uint64_t>{0, 1});
  CHECK(c.episodes_per_evaluation == 100);
  CHECK(c.eum_weight_samples == 100);
  CHECK(c.gamma == lavagrid::kDiscount);
  CHECK(c.training.horizon == 32);
  CHECK(c.sweep_size() == 66);
  const auto again = EvalConfig::from_json(c.to_json());
  CHECK(again.to_json() == c.to_json());

  const auto b = EvalConfig::from_json(json{{"contexts", {"builtin", "micro-detour"}}, {"seeds", {3}}});
  CHECK(b.contexts.size() == 9);
  CHECK(b.agent == AgentKind::generalist);
}

TEST_CASE("shipped configs parse and validate") {
  std::size_t n = 0;
  for (const auto& e : std::filesystem::directory_iterator(MORLGEN_CONFIG_DIR)) {
    if (e.path().extension() != ".json") continue;
    INFO(e.path().string());
    const auto c = EvalConfig::load(e.path());
    CHECK_NOTHROW(c.validate());
    ++n;
  }
  CHECK(n >= 4);
  const auto b = EvalConfig::load(std::filesystem::path(MORLGEN_CONFIG_DIR) / "builtin-generalist.json");
  CHECK(b.contexts.size() == 8);
  CHECK(b.horizon == lavagrid::kStepLimit);
}

TEST_CASE("config errors name the offending field") {
  auto expect_error = [](const json& j, const std::string& fragment) {
    try {
      EvalConfig::from_json(j).validate();
      FAIL("no error for " << j.dump());
    } catch (const std::exception& e) {
      CHECK_MESSAGE(std::string(e.what()).find(fragment) != std::string::npos, e.what());
    }
  };
  auto j = micro_config("specialist", 10);
  j["bogus"] = 1;
  expect_error(j, "bogus");
  j = micro_config("specialist", 10);
  j["agent"] = "oracle";
  expect_error(j, "agent");
  j = micro_config("specialist", 10);
  j["contexts"] = json::array({"Atlantis"});
  expect_error(j, "Atlantis");
  j = micro_config("specialist", 10);
  j["seeds"] = "zero";
  expect_error(j, "seeds");
  j = micro_config("specialist", 10);
  j["training"]["alpha"] = "fast";
  expect_error(j, "alpha");
  j = micro_config("specialist", 0);
  expect_error(j, "episodes");
  j = micro_config("specialist", 10);
  j["contexts"] = json::array();
  expect_error(j, "context");
  j = micro_config("specialist", 10);
  j["seeds"] = json::array();
  expect_error(j, "seed");
}

TEST_CASE("parse_json reports line and column") {
  try {
    parse_json("{\n  \"a\": 1,\n  \"b\": \n}", "cfg.json");
    FAIL("expected a parse error");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("cfg.json:4:") != std::string::npos);
  }
}

TEST_CASE("micro references are exact") {
  const auto c = EvalConfig::from_json(micro_config("specialist", 10));
  const auto refs = make_reference_fronts(c);
  REQUIRE(refs.size() == 5);
  for (const auto& r : refs) {
    CHECK(r.provenance == Provenance::oracle_exact);
    CHECK(r.epsilon == 0.0);
    CHECK(r.hv_norm > 0.0);
  }
}

TEST_CASE("capped reference falls back to a union that dominates both inputs") {
  auto j = micro_config("specialist", 3000);
  j["contexts"] = json::array({"micro-shelf"});
  j["oracle"]["cap"] = 4;
  const auto c = EvalConfig::from_json(j);
  const auto refs = make_reference_fronts(c);
  REQUIRE(refs.size() == 1);
  CHECK(refs[0].provenance != Provenance::oracle_exact);
  const auto ctx = c.contexts[0];
  const auto eps = oracle::pareto_backward_induction(ctx, c.gamma, c.horizon, 4);
  RandomStream stream(0, stream_tag(name_tag("reference"), name_tag(ctx.name)));
  const auto spec = oracle::specialist_front(ctx, c.training, stream);
  const ValueVector ref{-1000, -1000, -1000};
  const double hv_union = hypervolume_exact(refs[0].front, ref);
  CHECK(hv_union >= hypervolume_exact(eps.front, ref) - 1e-9);
  CHECK(hv_union >= hypervolume_exact(spec, ref) - 1e-9);
  CHECK(refs[0].epsilon == eps.epsilon);

  j["oracle"]["specialist_fallback"] = false;
  const auto pruned = make_reference_fronts(EvalConfig::from_json(j));
  CHECK(pruned[0].provenance == Provenance::oracle_eps_pruned);
  CHECK(pruned[0].front == eps.front);
}

TEST_CASE("11x11 context under a tight cap is flagged") {
  json j{{"contexts", {"Maze"}}, {"seeds", {0}}, {"oracle", {{"cap", 2}, {"specialist_fallback", false}}}};
  const auto refs = make_reference_fronts(EvalConfig::from_json(j));
  CHECK(refs[0].provenance == Provenance::oracle_eps_pruned);
  CHECK(refs[0].epsilon > 0.0);
}

TEST_CASE("self-test: every cell scores 1 and the gap is 0") {
  EvalOptions opt;
  opt.self_test = true;
  const auto r = evaluate(EvalConfig::from_json(micro_config("specialist", 10)), opt);
  CHECK(r.agent == "oracle");
  REQUIRE(r.cells.size() == 10);
  for (const auto& cell : r.cells) {
    CHECK(cell.nhgr == 1.0);
    CHECK(cell.eugr == doctest::Approx(1.0));
  }
  CHECK(r.aggregates.nhgr_iqm == 1.0);
  CHECK(r.aggregates.nhgr_gap == 0.0);
}

TEST_CASE("reports: determinism, threads, aggregate recomputation, CSV") {
  const auto c = EvalConfig::from_json(micro_config("specialist", 1500));
  const auto a = evaluate(c);
  EvalOptions threaded;
  threaded.threads = 3;
  const auto b = evaluate(c, threaded);
  CHECK(a.to_json().dump(2) == b.to_json().dump(2));
  CHECK(a.to_csv() == b.to_csv());

  std::vector<double> nhgr_cells, eugr_cells;
  for (const auto& cell : a.cells) {
    CHECK(cell.nhgr >= 0.0);
    CHECK(cell.nhgr <= 1.0);
    CHECK(cell.provenance == Provenance::oracle_exact);
    if (cell.excluded) continue;
    nhgr_cells.push_back(cell.nhgr);
    eugr_cells.push_back(cell.eugr);
  }
  CHECK(a.aggregates.cells == nhgr_cells.size());
  CHECK(a.aggregates.nhgr_iqm == iqm_oracle(nhgr_cells));
  CHECK(a.aggregates.nhgr_gap == gap_oracle(nhgr_cells));
  CHECK(a.aggregates.eugr_iqm == iqm_oracle(eugr_cells));
  CHECK(a.aggregates.eugr_gap == gap_oracle(eugr_cells));
  const bool all_one = std::all_of(nhgr_cells.begin(), nhgr_cells.end(), [](double x) { return x == 1.0; });
  CHECK((a.aggregates.nhgr_gap == 0.0) == all_one);

  // the JSON form reproduces the report
  const auto back = EvalReport::from_json(json::parse(a.to_json().dump()));
  CHECK(back.to_json() == a.to_json());
  const auto csv = a.to_csv();
  CHECK(csv.rfind("seed,context,metric,value,provenance\n", 0) == 0);
  CHECK(csv.find("0,micro-detour,nhgr,") != std::string::npos);

  // every cell's scores follow from its stored front
  const auto& cell = a.cells.front();
  const auto& ref = a.references.front();
  CHECK(cell.nhgr == nhgr(cell.front, ref.front));
  CHECK(cell.eum == eum(cell.front, a.eum_weights.front()));
  CHECK(cell.eugr == eugr(cell.front, ref.front, a.eum_weights.front()).ratio);
  CHECK(cell.hypervolume == hypervolume_exact(cell.front, bounds_of(ref.front).v_min()));
}

TEST_CASE("empty context list is rejected") {
  EvalConfig c;
  c.seeds = {0};
  CHECK_THROWS_AS(evaluate_specialists(c), std::invalid_argument);
  CHECK_THROWS_AS(evaluate_generalist(c), std::invalid_argument);
}

TEST_CASE("random baseline scores below the specialist") {
  const auto spec = evaluate(EvalConfig::from_json(micro_config("specialist", 20000)));
  const auto rnd = evaluate(EvalConfig::from_json(micro_config("random", 1)));
  REQUIRE(spec.cells.size() == rnd.cells.size());
  CHECK(rnd.aggregates.nhgr_iqm < spec.aggregates.nhgr_iqm);
  CHECK(rnd.aggregates.nhgr_gap > spec.aggregates.nhgr_gap);
  CHECK(spec.agent == "specialist");
  CHECK(rnd.agent == "random");
}

TEST_CASE("snapshots: saved tables reproduce the in-process report; missing ones are reported") {
  const auto c = EvalConfig::from_json(micro_config("specialist", 800));
  const auto dir = scratch("snapshots");
  const auto names = train_and_save(c, dir);
  CHECK(names.size() == 10);
  CHECK(std::filesystem::exists(dir / specialist_snapshot_name(1, "micro-shelf")));
  EvalOptions opt;
  opt.snapshots = dir;
  CHECK(evaluate(c, opt).to_json() == evaluate(c).to_json());
  std::filesystem::remove(dir / specialist_snapshot_name(0, "micro-ridge"));
  CHECK_THROWS_AS(evaluate(c, opt), MissingSnapshotError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("write_report lays out the results directory") {
  const auto c = EvalConfig::from_json(micro_config("random", 1));
  const auto r = evaluate(c);
  const auto dir = scratch("report");
  write_report(r, dir);
  CHECK(std::filesystem::exists(dir / "report.json"));
  CHECK(std::filesystem::exists(dir / "report.csv"));
  CHECK(std::filesystem::exists(dir / "references" / "micro-detour.csv"));
  CHECK(std::filesystem::exists(dir / "fronts" / "seed-1" / "micro-shelf.csv"));
  CHECK(read_file(dir / "report.json") == r.to_json().dump(2) + "\n");
  std::filesystem::remove_all(dir);
}
