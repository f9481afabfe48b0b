// causal-boot: command-line front end.
//
// Exit codes: 0 success, 1 usage or input error, 2 unidentifiable query,
// 3 zero-support error, 4 experiment finished with failed cells.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "causal_boot/bootstrap.hpp"
#include "causal_boot/errors.hpp"
#include "causal_boot/graph.hpp"
#include "causal_boot/harness.hpp"
#include "causal_boot/identify.hpp"
#include "causal_boot/simulate.hpp"

namespace cb = causal_boot;

namespace {

constexpr int kExitError = 1;
constexpr int kExitUnidentifiable = 2;
constexpr int kExitZeroSupport = 3;
constexpr int kExitFailedCells = 4;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw cb::Error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

cb::NodeSet names(const std::string& list) {
  cb::NodeSet out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.insert(item);
  }
  return out;
}

struct DsepArgs {
  std::string graph, a, b, given;
};

int run_dsep(const DsepArgs& args) {
  const auto g = cb::parse_graph(slurp(args.graph));
  std::cout << (cb::d_separated(g, names(args.a), names(args.b), names(args.given)) ? "true" : "false") << '\n';
  return 0;
}

struct IdentifyArgs {
  std::string graph, outcome, intervention;
};

int run_identify(const IdentifyArgs& args) {
  const auto g = cb::parse_graph(slurp(args.graph));
  const auto result = cb::identify(g, names(args.outcome), names(args.intervention));
  if (const auto* id = std::get_if<cb::Identified>(&result)) {
    std::cout << cb::estimand_to_text(id->estimand) << '\n';
    return 0;
  }
  std::cout << "UNIDENTIFIABLE: " << std::get<cb::Unidentifiable>(result).witness << '\n';
  return kExitUnidentifiable;
}

struct BootstrapArgs {
  std::string scenario, method = "cb", in, out, kernel = "delta";
  std::uint64_t seed = 0;
  double smoothing = 0.0;
};

int run_bootstrap(const BootstrapArgs& args) {
  const auto scenario = cb::parse_scenario(args.scenario);
  const auto method = cb::parse_method(args.method);
  if (method != cb::Method::CB && method != cb::Method::DA)
    throw cb::InvalidArgument("bootstrap supports --method cb or da");
  const cb::Dataset data = cb::read_csv_file(args.in);
  const cb::ResampleConfig config{args.seed, cb::parse_kernel(args.kernel), std::nullopt};
  cb::Dataset result;
  if (method == cb::Method::CB) {
    const auto id = cb::identify(cb::scenario_graph(scenario), {"X"}, {"Y"});
    if (const auto* failure = std::get_if<cb::Unidentifiable>(&id)) {
      std::cerr << "UNIDENTIFIABLE: " << failure->witness << '\n';
      return kExitUnidentifiable;
    }
    result = cb::cb_resample(data, cb::cb_weights(data, scenario, args.smoothing), config);
  } else {
    result = cb::da_resample(data, config);
  }
  cb::write_csv_file(args.out, result, false, false);
  return 0;
}

struct SimulateArgs {
  std::string scenario = "a", regime = "conf", out;
  std::size_t n = 1000;
  double qc = 0.95;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> overrides;
};

int run_simulate(const SimulateArgs& args) {
  const auto scenario = cb::parse_scenario(args.scenario);
  cb::SimConfig config = cb::default_sim_config(scenario);
  config.n = args.n;
  config.qc = args.qc;
  if (auto dim = args.overrides.find("dim"); dim != args.overrides.end())
    cb::apply_sim_override(config, "dim", dim->second);
  for (const auto& [key, value] : args.overrides)
    if (key != "dim") cb::apply_sim_override(config, key, value);
  const cb::Dataset data = cb::simulate(config, cb::parse_regime(args.regime), args.seed);
  if (args.out.empty() || args.out == "-") {
    cb::write_csv(std::cout, data);
  } else {
    cb::write_csv_file(args.out, data);
  }
  return 0;
}

struct RunArgs {
  std::string spec, out;
};

int run_experiment(const RunArgs& args) {
  const cb::ExperimentSpec spec = cb::read_experiment_spec(args.spec);
  const auto rows = cb::run_experiment(spec);
  std::filesystem::create_directories(args.out);
  const std::filesystem::path dir(args.out);
  cb::write_results_file((dir / "results.csv").string(), rows);
  cb::write_summary_file((dir / "summary.csv").string(), cb::summarize(rows));
  {
    std::ofstream resolved(dir / "spec.resolved.txt", std::ios::binary);
    resolved << cb::resolved_text(spec);
    if (!resolved) throw cb::Error("cannot write spec.resolved.txt");
  }
  const auto failed = std::count_if(rows.begin(), rows.end(), [](const cb::ResultRow& r) { return !r.ok(); });
  if (failed > 0) {
    std::cerr << failed << " of " << rows.size() << " rows failed\n";
    return kExitFailedCells;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Causal identification and causal-bootstrap resampling"};
  app.require_subcommand(1);

  DsepArgs dsep;
  auto* dsep_cmd = app.add_subcommand("dsep", "Test d-separation of A and B given a conditioning set");
  dsep_cmd->add_option("--graph", dsep.graph, "Graph DSL file")->required();
  dsep_cmd->add_option("--a", dsep.a, "Comma-separated node names")->required();
  dsep_cmd->add_option("--b", dsep.b, "Comma-separated node names")->required();
  dsep_cmd->add_option("--given", dsep.given, "Comma-separated node names");

  IdentifyArgs ident;
  auto* identify_cmd = app.add_subcommand("identify", "Identify P(outcome | do(intervention))");
  identify_cmd->add_option("--graph", ident.graph, "Graph DSL file")->required();
  identify_cmd->add_option("--outcome", ident.outcome, "Outcome variables")->required();
  identify_cmd->add_option("--do", ident.intervention, "Intervened variables")->required();

  BootstrapArgs boot;
  auto* boot_cmd = app.add_subcommand("bootstrap", "Resample a confounded CSV");
  boot_cmd->add_option("--scenario", boot.scenario, "Acquisition scenario a-e")->required();
  boot_cmd->add_option("--method", boot.method, "cb or da")->capture_default_str();
  boot_cmd->add_option("--in", boot.in, "Input CSV")->required();
  boot_cmd->add_option("--out", boot.out, "Output CSV")->required();
  boot_cmd->add_option("--seed", boot.seed, "Resampling seed")->capture_default_str();
  boot_cmd->add_option("--smoothing", boot.smoothing, "Pseudo-count for the conditional tables")->capture_default_str();
  boot_cmd->add_option("--kernel", boot.kernel, "delta, gaussian or gaussian:<h>")->capture_default_str();

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Sample a dataset from a scenario's structural model");
  sim_cmd->add_option("--scenario", sim.scenario, "Acquisition scenario a-e")->capture_default_str();
  sim_cmd->add_option("--regime", sim.regime, "conf, unconf, revconf or unseen")->capture_default_str();
  sim_cmd->add_option("--n", sim.n, "Sample size")->capture_default_str();
  sim_cmd->add_option("--qc", sim.qc, "Confounding strength")->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed, "Generator seed")->capture_default_str();
  sim_cmd->add_option("--out", sim.out, "Output CSV (stdout when omitted)");
  for (const auto& key : cb::sim_config_keys()) {
    std::string flag = "--" + key;
    std::replace(flag.begin() + 2, flag.end(), '_', '-');
    sim_cmd->add_option_function<std::string>(
        flag, [&sim, key](const std::string& v) { sim.overrides[key] = v; }, "Override " + key);
  }

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment grid");
  run_cmd->add_option("--spec", run.spec, "key=value spec file")->required();
  run_cmd->add_option("--out", run.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version requests exit 0; every usage error maps to 1.
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (dsep_cmd->parsed()) return run_dsep(dsep);
    if (identify_cmd->parsed()) return run_identify(ident);
    if (boot_cmd->parsed()) return run_bootstrap(boot);
    if (sim_cmd->parsed()) return run_simulate(sim);
    if (run_cmd->parsed()) return run_experiment(run);
  } catch (const cb::ZeroSupportError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitZeroSupport;
  } catch (const cb::ParseError& e) {
    std::cerr << "error: line " << e.line() << ", column " << e.column() << ": " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
