#include "morlgen/cli.hpp"

#include <cstdio>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "morlgen/front_io.hpp"
#include "morlgen/oracle.hpp"
#include "morlgen/parallel.hpp"

namespace morlgen::cli {

using nlohmann::json;

json RunManifest::to_json() const {
  json j;
  j["schema"] = kManifestSchema;
  j["subcommand"] = subcommand;
  j["config"] = config_path;
  j["output_dir"] = output_dir;
  j["base_seed"] = base_seed ? json(*base_seed) : json(nullptr);
  j["software_version"] = harness::kSoftwareVersion;
  for (const auto& [k, v] : extra.items()) j[k] = v;
  return j;
}

void RunManifest::write(const std::filesystem::path& dir) const {
  harness::write_file(dir / "manifest.json", to_json().dump(2) + "\n");
}

namespace {

std::string fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string lpad(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

lavagrid::Context resolve_context(const std::string& spec) {
  if (auto c = lavagrid::find_builtin(spec)) return *c;
  if (!std::filesystem::exists(spec)) {
    throw FormatError("'" + spec + "' is neither a builtin context nor a readable file");
  }
  const auto j = harness::parse_json(harness::read_file(spec), spec);
  auto ctx = lavagrid::context_from_json(j);
  if (ctx.name.empty()) ctx.name = std::filesystem::path(spec).stem().string();
  return ctx;
}

harness::EvalConfig load_config(const std::filesystem::path& path, const std::optional<std::uint64_t>& seed) {
  if (!std::filesystem::exists(path)) throw FormatError("config file not found: " + path.string());
  auto config = harness::EvalConfig::load(path);
  if (seed) config.seeds = {*seed};
  return config;
}

/// Maps library exceptions onto exit codes.
template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const harness::MissingSnapshotError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const EnvironmentError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitInput;
}

}  // namespace

int cmd_oracle(const OracleArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (args.out.empty()) throw std::invalid_argument("oracle: --out is required");
    const auto ctx = resolve_context(args.context);
    ctx.validate();
    RunManifest manifest{"oracle", args.context, args.out.string(), std::nullopt};
    manifest.extra["context"] = lavagrid::context_to_json(ctx);
    manifest.extra["gamma"] = args.gamma;
    manifest.extra["horizon"] = args.horizon;
    manifest.extra["cap"] = args.cap;
    manifest.write(args.out);

    const auto result =
        oracle::pareto_backward_induction(ctx, args.gamma, args.horizon, args.cap, resolve_threads(args.parallel));
    std::ostringstream csv;
    write_front_csv(csv, result.front);
    harness::write_file(args.out / "front.csv", csv.str());
    const auto sidecar = oracle::witness_sidecar(ctx, result, args.gamma, args.horizon, args.cap);
    harness::write_file(args.out / "witnesses.json", sidecar.dump(2) + "\n");
    out << ctx.name << ": " << result.front.size() << " points"
        << (result.approximate ? ", epsilon-pruned (epsilon " + format_double(result.epsilon) + ")" : ", exact")
        << "\n";
    return result.approximate ? kExitApproximate : kExitOk;
  });
}

int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (args.out.empty()) throw std::invalid_argument("train: --out is required");
    const auto config = load_config(args.config, args.seed);
    RunManifest manifest{"train", args.config.string(), args.out.string(), config.seeds.front()};
    manifest.extra["eval_config"] = config.to_json();
    manifest.write(args.out);
    const auto names = harness::train_and_save(config, args.out, resolve_threads(args.parallel));
    for (const auto& n : names) out << "wrote " << (args.out / n).string() << "\n";
    return kExitOk;
  });
}

int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (args.out.empty()) throw std::invalid_argument("eval: --out is required");
    const auto config = load_config(args.config, args.seed);
    if (args.snapshots && !std::filesystem::is_directory(*args.snapshots)) {
      throw harness::MissingSnapshotError("snapshot directory not found: " + args.snapshots->string());
    }
    RunManifest manifest{"eval", args.config.string(), args.out.string(), config.seeds.front()};
    manifest.extra["eval_config"] = config.to_json();
    manifest.extra["self_test"] = args.self_test;
    manifest.extra["snapshots"] = args.snapshots ? json(args.snapshots->string()) : json(nullptr);
    manifest.write(args.out);

    harness::EvalOptions options;
    options.threads = resolve_threads(args.parallel);
    options.snapshots = args.snapshots;
    options.self_test = args.self_test;
    const auto report = harness::evaluate(config, options);
    harness::write_report(report, args.out);
    out << render_summary(report.aggregates);
    if (!report.excluded_contexts.empty()) {
      out << "excluded (zero normalized hypervolume):";
      for (const auto& c : report.excluded_contexts) out << ' ' << c;
      out << "\n";
    }
    return report.approximate_reference() ? kExitApproximate : kExitOk;
  });
}

std::string render_summary(const harness::Aggregates& a) {
  std::ostringstream s;
  s << pad("metric", 8) << lpad("IQM", 8) << lpad("gap", 8) << "   (" << a.cells << " cells)\n";
  s << pad("NHGR", 8) << lpad(fixed(a.nhgr_iqm), 8) << lpad(fixed(a.nhgr_gap), 8) << "\n";
  s << pad("EUGR", 8) << lpad(fixed(a.eugr_iqm), 8) << lpad(fixed(a.eugr_gap), 8) << "\n";
  return s.str();
}

std::string render_report(const harness::EvalReport& report) {
  struct Sums {
    std::size_t n = 0;
    std::size_t scored = 0;
    double hv = 0, eum = 0, nhgr = 0, eugr = 0;
    std::string provenance;
  };
  std::vector<std::string> order;
  std::map<std::string, Sums> rows;
  for (const auto& c : report.cells) {
    auto [it, fresh] = rows.try_emplace(c.context);
    if (fresh) order.push_back(c.context);
    auto& r = it->second;
    r.provenance = std::string(harness::to_string(c.provenance));
    ++r.n;
    r.hv += c.hypervolume;
    r.eum += c.eum;
    if (!c.excluded) {
      ++r.scored;
      r.nhgr += c.nhgr;
      r.eugr += c.eugr;
    }
  }
  std::ostringstream s;
  s << "agent: " << report.agent << "   seeds: " << report.config.seeds.size()
    << "   horizon: " << report.config.horizon << " (finite-horizon reference fronts)\n\n";
  s << pad("context", 16) << lpad("HV", 12) << lpad("EUM", 10) << lpad("NHGR", 8) << lpad("EUGR", 8) << "  reference\n";
  for (const auto& name : order) {
    const auto& r = rows[name];
    const double n = static_cast<double>(r.n);
    s << pad(name, 16) << lpad(fixed(r.hv / n, 2), 12) << lpad(fixed(r.eum / n, 2), 10);
    if (r.scored > 0) {
      const double m = static_cast<double>(r.scored);
      s << lpad(fixed(r.nhgr / m), 8) << lpad(fixed(r.eugr / m), 8);
    } else {
      s << lpad("n/a", 8) << lpad("n/a", 8);
    }
    s << "  " << r.provenance << "\n";
  }
  s << "\n(per-context values are means over seeds)\n\n";
  s << render_summary(harness::aggregate_cells(report.cells));
  if (!report.excluded_contexts.empty()) {
    s << "excluded (zero normalized hypervolume):";
    for (const auto& c : report.excluded_contexts) s << ' ' << c;
    s << "\n";
  }
  return s.str();
}

int cmd_report(const std::filesystem::path& path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!std::filesystem::exists(path)) throw FormatError("report not found: " + path.string());
    const auto report = harness::EvalReport::from_json(harness::parse_json(harness::read_file(path), path.string()));
    const auto recomputed = harness::aggregate_cells(report.cells);
    const auto& a = report.aggregates;
    if (recomputed.cells != a.cells || recomputed.nhgr_iqm != a.nhgr_iqm || recomputed.nhgr_gap != a.nhgr_gap ||
        recomputed.eugr_iqm != a.eugr_iqm || recomputed.eugr_gap != a.eugr_gap) {
      throw FormatError("report: stored aggregates do not match the cells");
    }
    out << render_report(report);
    return kExitOk;
  });
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generalization metrics, exact fronts and baselines for multi-objective RL"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(harness::kSoftwareVersion));

  OracleArgs oracle_args;
  std::string oracle_out;
  auto* oracle = app.add_subcommand("oracle", "Exact (or epsilon-pruned) Pareto front of one context");
  oracle->add_option("--context", oracle_args.context, "Builtin context name or context JSON file")->required();
  oracle->add_option("--gamma", oracle_args.gamma, "Discount factor")->capture_default_str();
  oracle->add_option("--horizon", oracle_args.horizon, "Episode horizon in steps")->capture_default_str();
  oracle->add_option("--cap", oracle_args.cap, "Largest per-state set before epsilon thinning")->capture_default_str();
  oracle->add_option("--out", oracle_out, "Output directory")->required();
  oracle->add_option("--parallel", oracle_args.parallel, "Worker threads (0 = logical cores)")->capture_default_str();

  TrainArgs train_args;
  std::string train_config, train_out;
  std::uint64_t train_seed = 0;
  auto* train = app.add_subcommand("train", "Train the configured agents and write snapshots");
  train->add_option("--config", train_config, "Evaluation config JSON")->required();
  train->add_option("--out", train_out, "Snapshot directory")->required();
  auto* train_seed_opt = train->add_option("--seed", train_seed, "Use this single seed instead of the config's");
  train->add_option("--parallel", train_args.parallel, "Worker threads (0 = logical cores)")->capture_default_str();

  EvalArgs eval_args;
  std::string eval_config, eval_out, eval_snapshots;
  std::uint64_t eval_seed = 0;
  auto* eval = app.add_subcommand("eval", "Run the evaluation protocol and write the report");
  eval->add_option("--config", eval_config, "Evaluation config JSON")->required();
  eval->add_option("--out", eval_out, "Report directory")->required();
  auto* snap_opt = eval->add_option("--snapshots", eval_snapshots, "Directory written by 'train' (default: train in-process)");
  auto* eval_seed_opt = eval->add_option("--seed", eval_seed, "Use this single seed instead of the config's");
  eval->add_option("--parallel", eval_args.parallel, "Worker threads (0 = logical cores)")->capture_default_str();
  eval->add_flag("--self-test", eval_args.self_test, "Score the reference fronts themselves (expects NHGR 1, gap 0)");

  std::string report_path;
  auto* report = app.add_subcommand("report", "Render a report.json as a metric table");
  report->add_option("report", report_path, "Path to report.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    std::ostringstream o, er;
    app.exit(e, o, er);
    out << o.str() << er.str();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    app.exit(e, o, er);
    err << er.str() << o.str();
    return kExitInput;
  }

  if (oracle->parsed()) {
    oracle_args.out = oracle_out;
    return cmd_oracle(oracle_args, out, err);
  }
  if (train->parsed()) {
    train_args.config = train_config;
    train_args.out = train_out;
    if (*train_seed_opt) train_args.seed = train_seed;
    return cmd_train(train_args, out, err);
  }
  if (eval->parsed()) {
    eval_args.config = eval_config;
    eval_args.out = eval_out;
    if (*snap_opt) eval_args.snapshots = eval_snapshots;
    if (*eval_seed_opt) eval_args.seed = eval_seed;
    return cmd_eval(eval_args, out, err);
  }
  return cmd_report(report_path, out, err);
}

}  // namespace morlgen::cli
