#include "causal_boot/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "causal_boot/errors.hpp"
#include "causal_boot/identify.hpp"
#include "causal_boot/rng.hpp"
#include "text.hpp"

namespace causal_boot {

namespace {

template <typename T, typename Parse>
std::vector<T> parse_list(std::string_view value, Parse parse) {
  std::vector<T> out;
  for (auto part : text::split(value, ',')) {
    part = text::trim(part);
    if (part.empty()) continue;
    out.push_back(parse(part));
  }
  return out;
}

template <typename T>
T number(std::string_view key, std::string_view value) {
  const auto v = text::to_number<T>(value);
  if (!v) throw InvalidArgument(std::string(key) + ": cannot parse '" + std::string(value) + "'");
  return *v;
}

template <typename T, typename Format>
std::string join(const std::vector<T>& items, Format format) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += format(items[i]);
  }
  return out;
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ' ';
  return s;
}

bool applicable(Method m, ScenarioId s) { return !(m == Method::DA && s == ScenarioId::UnobservedConfMediator); }

bool applicable(Method m, Regime r) { return !(m == Method::IF && r == Regime::Unseen); }

}  // namespace

void ExperimentSpec::validate() const {
  if (scenarios.empty() || methods.empty() || regimes.empty() || seeds.empty())
    throw InvalidArgument("experiment lists must be non-empty");
  if (complexity_sweep ? complexity_sweep->empty() : qc_grid.empty())
    throw InvalidArgument("experiment grid must be non-empty");
  for (double q : qc_grid)
    if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("qc values must lie in [0, 1]");
  if (n_train < 2 || n_test < 2) throw InvalidArgument("n_train and n_test must be at least 2");
  if (smoothing < 0.0) throw InvalidArgument("smoothing must be non-negative");
  sim.validate();
  train.validate();
}

ExperimentSpec parse_experiment_spec(std::string_view source) {
  ExperimentSpec spec;
  std::vector<std::pair<std::string, std::string>> sim_overrides;
  std::size_t line_no = 0;
  for (auto raw : text::split(source, '\n')) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const auto line = text::trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key = value", line_no, 1);
    const std::string key(text::trim(line.substr(0, eq)));
    const auto value = text::trim(line.substr(eq + 1));
    try {
      if (key == "scenarios") {
        spec.scenarios = parse_list<ScenarioId>(value, parse_scenario);
      } else if (key == "qc") {
        spec.qc_grid = parse_list<double>(value, [&](auto v) { return number<double>(key, v); });
      } else if (key == "methods") {
        spec.methods = parse_list<Method>(value, parse_method);
      } else if (key == "regimes") {
        spec.regimes = parse_list<Regime>(value, parse_regime);
      } else if (key == "seeds") {
        spec.seeds = parse_list<std::uint64_t>(value, [&](auto v) { return number<std::uint64_t>(key, v); });
      } else if (key == "n_train") {
        spec.n_train = number<std::size_t>(key, value);
      } else if (key == "n_test") {
        spec.n_test = number<std::size_t>(key, value);
      } else if (key == "master_seed") {
        spec.master_seed = number<std::uint64_t>(key, value);
      } else if (key == "sweep") {
        if (value.empty() || value == "none") {
          spec.complexity_sweep.reset();
        } else {
          spec.complexity_sweep = parse_list<double>(value, [&](auto v) { return number<double>(key, v); });
        }
      } else if (key == "sweep_qc") {
        spec.sweep_qc = number<double>(key, value);
      } else if (key == "smoothing") {
        spec.smoothing = number<double>(key, value);
      } else if (key == "kernel") {
        spec.kernel = parse_kernel(value);
      } else if (key == "timing") {
        if (value != "on" && value != "off") throw InvalidArgument("timing: expected on or off");
        spec.timing = value == "on";
      } else if (key == "train.model") {
        spec.train.kind = parse_model_kind(value);
      } else if (key == "train.lr") {
        spec.train.learning_rate = number<double>(key, value);
      } else if (key == "train.epochs") {
        spec.train.epochs = number<int>(key, value);
      } else if (key == "train.batch") {
        spec.train.batch_size = number<std::size_t>(key, value);
      } else if (key == "train.l2") {
        spec.train.l2 = number<double>(key, value);
      } else if (key == "train.hidden") {
        spec.train.hidden = number<std::size_t>(key, value);
      } else if (key.starts_with("sim.")) {
        const std::string field = key.substr(4);
        const auto& keys = sim_config_keys();
        if (std::find(keys.begin(), keys.end(), field) == keys.end())
          throw InvalidArgument("unknown simulation field '" + field + "'");
        sim_overrides.emplace_back(field, std::string(value));
      } else {
        throw InvalidArgument("unknown key '" + key + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.what(), line_no, 1);
    }
  }
  // dim resets the offsets, so it goes first.
  std::stable_partition(sim_overrides.begin(), sim_overrides.end(), [](const auto& kv) { return kv.first == "dim"; });
  for (const auto& [field, value] : sim_overrides) apply_sim_override(spec.sim, field, value);
  spec.validate();
  return spec;
}

ExperimentSpec read_experiment_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open spec file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_spec(buf.str());
}

std::string resolved_text(const ExperimentSpec& spec) {
  std::string out;
  auto line = [&](std::string_view key, const std::string& value) {
    out.append(key).append(" = ").append(value).append("\n");
  };
  line("scenarios", join(spec.scenarios, [](ScenarioId s) { return std::string(1, scenario_letter(s)); }));
  line("qc", join(spec.qc_grid, format_real));
  line("methods", join(spec.methods, [](Method m) { return std::string(method_name(m)); }));
  line("regimes", join(spec.regimes, [](Regime r) { return std::string(regime_name(r)); }));
  line("seeds", join(spec.seeds, [](std::uint64_t s) { return std::to_string(s); }));
  line("n_train", std::to_string(spec.n_train));
  line("n_test", std::to_string(spec.n_test));
  line("master_seed", std::to_string(spec.master_seed));
  line("sweep", spec.complexity_sweep ? join(*spec.complexity_sweep, format_real) : "none");
  line("sweep_qc", format_real(spec.sweep_qc));
  line("smoothing", format_real(spec.smoothing));
  line("kernel", kernel_to_string(spec.kernel));
  line("timing", spec.timing ? "on" : "off");
  line("train.model", std::string(model_kind_name(spec.train.kind)));
  line("train.lr", format_real(spec.train.learning_rate));
  line("train.epochs", std::to_string(spec.train.epochs));
  line("train.batch", std::to_string(spec.train.batch_size));
  line("train.l2", format_real(spec.train.l2));
  line("train.hidden", std::to_string(spec.train.hidden));
  out += sim_config_text(spec.sim, "sim.");
  return out;
}

SimConfig cell_sim_config(const ExperimentSpec& spec, ScenarioId scenario, double value) {
  SimConfig c = spec.sim;
  c.scenario = scenario;
  if (spec.complexity_sweep) {
    c.qc = spec.sweep_qc;
    set_signal_strength(c, value);
  } else {
    c.qc = value;
  }
  return c;
}

std::uint64_t cell_data_seed(const ExperimentSpec& spec, ScenarioId scenario, double value, std::uint64_t seed) {
  return derive_seed(spec.master_seed,
                     {static_cast<std::uint64_t>(scenario), std::bit_cast<std::uint64_t>(value), seed});
}

std::vector<ResultRow> run_cell(const ExperimentSpec& spec, ScenarioId scenario, double value, std::uint64_t seed) {
  using Clock = std::chrono::steady_clock;
  std::vector<ResultRow> rows;
  const std::uint64_t data_seed = cell_data_seed(spec, scenario, value, seed);
  SimConfig config = cell_sim_config(spec, scenario, value);

  config.n = spec.n_train;
  const Dataset train_set = simulate(config, Regime::Conf, data_seed);
  config.n = spec.n_test;
  std::vector<std::pair<Regime, Dataset>> tests;
  for (Regime r : spec.regimes)
    tests.emplace_back(r, simulate(config, r, derive_seed(data_seed, {0x7465ULL, static_cast<std::uint64_t>(r)})));

  for (Method method : spec.methods) {
    if (!applicable(method, scenario)) continue;
    const auto started = Clock::now();
    const std::uint64_t method_seed = derive_seed(data_seed, {0x6d65ULL, static_cast<std::uint64_t>(method)});
    auto emit = [&](Regime r, std::optional<double> score, std::size_t n_train, std::string status) {
      ResultRow row;
      row.scenario = scenario;
      row.method = method;
      row.qc = value;
      row.regime = r;
      row.seed = seed;
      row.auc = score;
      row.n_train = n_train;
      row.status = sanitize(std::move(status));
      rows.push_back(std::move(row));
    };
    const std::size_t first = rows.size();
    try {
      LabeledFeatures training;
      switch (method) {
        case Method::Simple:
        case Method::IF:
          training = select_features(train_set, method, scenario);
          break;
        case Method::DA:
          training = select_features(da_resample(train_set, {method_seed, spec.kernel, std::nullopt}), Method::Simple,
                                     scenario);
          break;
        case Method::CB: {
          const auto id = identify(scenario_graph(scenario), {"X"}, {"Y"});
          if (const auto* failure = std::get_if<Unidentifiable>(&id))
            throw Error("unidentifiable: " + failure->witness);
          const WeightTable weights = cb_weights(train_set, scenario, spec.smoothing);
          training = select_features(cb_resample(train_set, weights, {method_seed, spec.kernel, std::nullopt}),
                                     Method::Simple, scenario);
          break;
        }
      }
      TrainConfig tc = spec.train;
      tc.seed = method_seed;
      const Model model = train(training.features, training.labels, tc).model;
      const Method test_view = method == Method::IF ? Method::IF : Method::Simple;
      for (const auto& [regime, test_set] : tests) {
        if (!applicable(method, regime)) continue;
        const LabeledFeatures test = select_features(test_set, test_view, scenario);
        const auto scores = predict_proba(model, test.features);
        emit(regime, auc(scores, test.labels), training.labels.size(), "ok");
      }
    } catch (const std::exception& e) {
      rows.resize(first);
      for (const auto& [regime, test_set] : tests)
        if (applicable(method, regime)) emit(regime, std::nullopt, 0, std::string("failed: ") + e.what());
    }
    if (spec.timing) {
      const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started).count();
      for (std::size_t i = first; i < rows.size(); ++i) rows[i].wall_time_ms = ms;
    }
  }
  return rows;
}

std::size_t worker_count(std::size_t tasks) {
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CAUSAL_BOOT_WORKERS")) {
    if (const auto v = text::to_number<std::size_t>(env); v && *v > 0) workers = *v;
  }
  return std::max<std::size_t>(1, std::min(workers, tasks));
}

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  struct Task {
    ScenarioId scenario;
    double value;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (ScenarioId s : spec.scenarios)
    for (double v : spec.grid_values())
      for (std::uint64_t seed : spec.seeds) tasks.push_back({s, v, seed});

  std::vector<std::vector<ResultRow>> slots(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++)
      slots[i] = run_cell(spec, tasks[i].scenario, tasks[i].value, tasks[i].seed);
  };
  const std::size_t n_workers = worker_count(tasks.size());
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }

  std::vector<ResultRow> rows;
  for (auto& slot : slots) std::move(slot.begin(), slot.end(), std::back_inserter(rows));
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.scenario, a.method, a.qc, a.regime, a.seed) <
           std::tie(b.scenario, b.method, b.qc, b.regime, b.seed);
  });
  return rows;
}

void write_results(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kResultsHeader << '\n';
  for (const auto& r : rows) {
    out << scenario_letter(r.scenario) << ',' << method_name(r.method) << ',' << format_real(r.qc) << ','
        << regime_name(r.regime) << ',' << r.seed << ',' << (r.auc ? format_real(*r.auc) : std::string()) << ','
        << r.n_train << ',' << r.wall_time_ms << ',' << r.status << '\n';
  }
}

void write_results_file(const std::string& path, const std::vector<ResultRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  write_results(out, rows);
  if (!out) throw Error("write failed for " + path);
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  std::map<std::tuple<ScenarioId, Method, double, Regime>, std::pair<std::vector<double>, std::size_t>> groups;
  for (const auto& r : rows) {
    auto& g = groups[{r.scenario, r.method, r.qc, r.regime}];
    if (r.auc) g.first.push_back(*r.auc);
    else ++g.second;
  }
  std::vector<SummaryRow> out;
  for (const auto& [key, g] : groups) {
    SummaryRow s;
    std::tie(s.scenario, s.method, s.qc, s.regime) = key;
    const auto& v = g.first;
    s.seeds = v.size();
    s.failed = g.second;
    if (!v.empty()) {
      double mean = 0.0;
      for (double a : v) mean += a;
      mean /= static_cast<double>(v.size());
      s.mean_auc = mean;
      if (v.size() > 1) {
        double ss = 0.0;
        for (double a : v) ss += (a - mean) * (a - mean);
        s.sd_auc = std::sqrt(ss / static_cast<double>(v.size() - 1));
      }
    }
    out.push_back(s);
  }
  return out;
}

void write_summary(std::ostream& out, const std::vector<SummaryRow>& rows) {
  auto opt = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string(); };
  out << kSummaryHeader << '\n';
  for (const auto& r : rows)
    out << scenario_letter(r.scenario) << ',' << method_name(r.method) << ',' << format_real(r.qc) << ','
        << regime_name(r.regime) << ',' << opt(r.mean_auc) << ',' << opt(r.sd_auc) << ',' << r.seeds << ','
        << r.failed << '\n';
}

void write_summary_file(const std::string& path, const std::vector<SummaryRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  write_summary(out, rows);
  if (!out) throw Error("write failed for " + path);
}

std::vector<ResultRow> read_results(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || text::trim(line) != kResultsHeader) throw InvalidArgument("results: bad header");
  std::vector<ResultRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto f = text::split(text::trim(line), ',');
    if (f.size() != 9) throw ParseError("results: expected 9 fields", line_no, 1);
    try {
      ResultRow r;
      r.scenario = parse_scenario(f[0]);
      r.method = parse_method(f[1]);
      r.qc = number<double>("qc", f[2]);
      r.regime = parse_regime(f[3]);
      r.seed = number<std::uint64_t>("seed", f[4]);
      if (!text::trim(f[5]).empty()) r.auc = number<double>("auc", f[5]);
      r.n_train = number<std::size_t>("n_train", f[6]);
      r.wall_time_ms = number<std::int64_t>("wall_time_ms", f[7]);
      r.status = std::string(f[8]);
      rows.push_back(std::move(r));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.what(), line_no, 1);
    }
  }
  return rows;
}

}  // namespace causal_boot
