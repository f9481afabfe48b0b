#ifndef CAUSAL_BOOT_HARNESS_HPP
#define CAUSAL_BOOT_HARNESS_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "causal_boot/bootstrap.hpp"
#include "causal_boot/dataset.hpp"
#include "causal_boot/estimate.hpp"
#include "causal_boot/graph.hpp"
#include "causal_boot/model.hpp"
#include "causal_boot/simulate.hpp"

namespace causal_boot {

/// Experiment grid. In sweep mode (complexity_sweep set) the grid axis is the
/// signal norm instead of qc, and every cell uses sweep_qc.
struct ExperimentSpec {
  std::vector<ScenarioId> scenarios{ScenarioId::ObservedConf};
  std::vector<double> qc_grid{0.65, 0.75, 0.85, 0.95};
  std::vector<Method> methods{Method::Simple, Method::IF, Method::DA, Method::CB};
  std::vector<Regime> regimes{Regime::Conf, Regime::Unconf, Regime::RevConf, Regime::Unseen};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  std::size_t n_train = 10000;
  std::size_t n_test = 5000;
  std::uint64_t master_seed = 2024;
  SimConfig sim = default_sim_config(ScenarioId::ObservedConf);
  TrainConfig train;
  std::optional<std::vector<double>> complexity_sweep;
  double sweep_qc = 0.95;
  double smoothing = 0.0;
  KernelSpec kernel = KernelSpec::delta();
  bool timing = false;  // off keeps wall_time_ms at 0 so reruns are byte-identical

  std::vector<double> grid_values() const { return complexity_sweep ? *complexity_sweep : qc_grid; }
  void validate() const;
};

/// Flat "key = value" text, one entry per line, '#' comments. Lists are
/// comma-separated. Keys: scenarios, qc, methods, regimes, seeds, n_train,
/// n_test, master_seed, sweep, sweep_qc, smoothing, kernel, timing (on|off),
/// train.{model,lr,epochs,batch,l2,hidden}, sim.<field> (see sim_config_keys).
ExperimentSpec parse_experiment_spec(std::string_view text);
ExperimentSpec read_experiment_spec(const std::string& path);

/// Every key with its effective value; parses back to the same spec.
std::string resolved_text(const ExperimentSpec& spec);

struct ResultRow {
  ScenarioId scenario = ScenarioId::ObservedConf;
  Method method = Method::Simple;
  double qc = 0.0;  // or the signal norm in sweep mode
  Regime regime = Regime::Conf;
  std::uint64_t seed = 0;
  std::optional<double> auc;  // empty when the cell failed
  std::size_t n_train = 0;
  std::int64_t wall_time_ms = 0;
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
  bool operator==(const ResultRow&) const = default;
};

/// Cells run on up to CAUSAL_BOOT_WORKERS threads (default: hardware threads).
/// Rows come back sorted by (scenario, method, qc, regime, seed). DA on (d) and
/// IF on Unseen are not applicable and produce no rows. A failing method
/// yields rows whose status carries the reason.
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec);

/// Runs one grid cell: all methods and regimes for (scenario, value, seed).
std::vector<ResultRow> run_cell(const ExperimentSpec& spec, ScenarioId scenario, double value, std::uint64_t seed);

/// Simulation parameters of a cell, with qc or the signal norm applied.
SimConfig cell_sim_config(const ExperimentSpec& spec, ScenarioId scenario, double value);

std::uint64_t cell_data_seed(const ExperimentSpec& spec, ScenarioId scenario, double value, std::uint64_t seed);

inline constexpr std::string_view kResultsHeader = "scenario,method,qc,regime,seed,auc,n_train,wall_time_ms,status";

void write_results(std::ostream& out, const std::vector<ResultRow>& rows);
void write_results_file(const std::string& path, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results(std::istream& in);

/// Mean and sample standard deviation of AUC over seeds, per
/// (scenario, method, qc, regime). sd is empty with fewer than two values.
struct SummaryRow {
  ScenarioId scenario = ScenarioId::ObservedConf;
  Method method = Method::Simple;
  double qc = 0.0;
  Regime regime = Regime::Conf;
  std::optional<double> mean_auc;
  std::optional<double> sd_auc;
  std::size_t seeds = 0;   // rows that produced an AUC
  std::size_t failed = 0;  // rows that did not
};

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);

inline constexpr std::string_view kSummaryHeader = "scenario,method,qc,regime,mean_auc,sd_auc,seeds,failed";

void write_summary(std::ostream& out, const std::vector<SummaryRow>& rows);
void write_summary_file(const std::string& path, const std::vector<SummaryRow>& rows);

std::size_t worker_count(std::size_t tasks);

}  // namespace causal_boot

#endif  // CAUSAL_BOOT_HARNESS_HPP
