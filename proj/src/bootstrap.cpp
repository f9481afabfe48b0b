#include "causal_boot/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "causal_boot/errors.hpp"
#include "causal_boot/rng.hpp"

namespace causal_boot {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::Simple:
      return "simple";
    case Method::IF:
      return "if";
    case Method::DA:
      return "da";
    case Method::CB:
      return "cb";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  for (Method m : kAllMethods)
    if (text == method_name(m)) return m;
  throw InvalidArgument("unknown method '" + std::string(text) + "'");
}

double WeightTable::class_mass(std::size_t k) const {
  double total = 0.0;
  for (std::size_t n = 0; n < rows; ++n) total += (*this)(n, k);
  return total;
}

std::vector<double> WeightTable::column(std::size_t k) const {
  std::vector<double> out(rows);
  for (std::size_t n = 0; n < rows; ++n) out[n] = (*this)(n, k);
  return out;
}

std::vector<std::string> required_covariates(ScenarioId scenario) {
  switch (scenario) {
    case ScenarioId::ObservedConf:
      return {"u"};
    case ScenarioId::ObservedConfMediator:
    case ScenarioId::PartialConfMediator:
      return {"u", "z"};
    case ScenarioId::UnobservedConfMediator:
      return {"z"};
    case ScenarioId::BiasedCare:
      return {"u", "d"};
  }
  return {};
}

namespace {

std::string cell(std::string_view var, int value, const std::vector<std::string>& given, std::span<const int> values) {
  std::string out = std::string(var) + "=" + std::to_string(value) + " |";
  for (std::size_t k = 0; k < given.size(); ++k) out += (k ? "," : " ") + given[k] + "=" + std::to_string(values[k]);
  return out;
}

// For every conditioning cell that occurs in the data, every mediator value that
// P(z | y=c) gives mass to must also occur in that cell.
void require_positivity(const CategoricalTable& mediator_given_class, const CategoricalTable& denominator,
                        const Dataset& data, int c) {
  const auto& given = denominator.given();
  std::vector<std::vector<int>> columns;
  for (const auto& g : given) columns.push_back(data.discrete(g));
  std::set<std::vector<int>> seen;
  std::vector<int> key(given.size());
  for (std::size_t n = 0; n < data.size(); ++n) {
    for (std::size_t k = 0; k < given.size(); ++k) key[k] = columns[k][n];
    if (!seen.insert(key).second) continue;
    for (int z = 0; z < denominator.target_domain(); ++z) {
      if (mediator_given_class.prob(z, {c}) > 0.0 && denominator.prob(z, key) == 0.0)
        throw ZeroSupportError(cell(denominator.target(), z, given, key));
    }
  }
}

void require_columns(const Dataset& data, ScenarioId scenario) {
  for (const auto& column : required_covariates(scenario))
    if (!data.has_column(column)) throw MissingColumnError(column);
}

}  // namespace

std::vector<double> cb_class_weights(const Dataset& data, ScenarioId scenario, int c, double alpha) {
  require_columns(data, scenario);
  if (data.size() == 0) throw InvalidArgument("cannot compute weights on an empty dataset");
  data.validate();

  const std::size_t n_rows = data.size();
  const int n_classes = column_domain(data.y);
  if (c < 0 || c >= n_classes) throw DomainError("class " + std::to_string(c) + " is outside the label domain");
  const double big_n = static_cast<double>(n_rows);
  const std::vector<int>& y = data.y;
  std::vector<double> w(n_rows, 0.0);

  switch (scenario) {
    case ScenarioId::ObservedConf:
    case ScenarioId::BiasedCare: {
      const auto u = data.covariate("u");
      const auto y_given_u = fit_conditional(data, "y", {"u"}, alpha, std::vector<int>{n_classes, column_domain(u)});
      std::optional<CategoricalTable> d_given_yu;
      if (scenario == ScenarioId::BiasedCare) {
        const auto d = data.covariate("d");
        d_given_yu = fit_conditional(data, "d", {"y", "u"}, alpha,
                                     std::vector<int>{column_domain(d), n_classes, column_domain(u)});
      }
      for (std::size_t n = 0; n < n_rows; ++n) {
        // Every confounder value in the sample must also occur with label c.
        const double propensity = y_given_u.prob(c, {u[n]});
        if (propensity <= 0.0) throw ZeroSupportError(cell("y", c, {"u"}, std::vector<int>{u[n]}));
        if (y[n] != c) continue;
        double care = 1.0;
        if (d_given_yu) {
          // Σ_d P(d | y=c, u_n) is one whenever (c, u_n) has support.
          care = 0.0;
          for (int dv = 0; dv < d_given_yu->target_domain(); ++dv) care += d_given_yu->prob(dv, {c, u[n]});
        }
        w[n] = care / (big_n * propensity);
      }
      break;
    }
    case ScenarioId::ObservedConfMediator:
    case ScenarioId::PartialConfMediator:
    case ScenarioId::UnobservedConfMediator: {
      const auto z = data.covariate("z");
      const int z_domain = column_domain(z);
      const auto z_given_y = fit_conditional(data, "z", {"y"}, alpha, std::vector<int>{z_domain, n_classes});
      std::vector<std::string> given;
      if (scenario == ScenarioId::ObservedConfMediator) given = {"u"};
      if (scenario == ScenarioId::PartialConfMediator) given = {"y", "u"};
      if (scenario == ScenarioId::UnobservedConfMediator) given = {"y"};
      std::vector<int> domains{z_domain};
      for (const auto& g : given) domains.push_back(g == "y" ? n_classes : column_domain(data.covariate(g)));
      const auto denominator = fit_conditional(data, "z", given, alpha, domains);
      std::vector<std::span<const int>> given_columns;
      for (const auto& g : given) given_columns.push_back(data.covariate(g));

      if (alpha == 0.0) require_positivity(z_given_y, denominator, data, c);
      std::vector<int> key(given.size());
      for (std::size_t n = 0; n < n_rows; ++n) {
        for (std::size_t k = 0; k < given.size(); ++k) key[k] = given_columns[k][n];
        const double bottom = big_n * denominator.prob(z[n], key);
        if (bottom <= 0.0) throw ZeroSupportError(cell("z", z[n], given, key));
        w[n] = z_given_y.prob(z[n], {c}) / bottom;
      }
      break;
    }
  }
  return w;
}

WeightTable cb_weights(const Dataset& data, ScenarioId scenario, double alpha) {
  require_columns(data, scenario);
  if (data.size() == 0) throw InvalidArgument("cannot compute weights on an empty dataset");
  WeightTable table;
  table.rows = data.size();
  const int n_classes = column_domain(data.y);
  table.classes.resize(static_cast<std::size_t>(n_classes));
  std::iota(table.classes.begin(), table.classes.end(), 0);
  table.weights.assign(table.rows * table.classes.size(), 0.0);
  for (int c = 0; c < n_classes; ++c) {
    const auto column = cb_class_weights(data, scenario, c, alpha);
    for (std::size_t n = 0; n < table.rows; ++n) table.weights[n * table.classes.size() + c] = column[n];
  }
  table.normalized_per_class = true;
  for (std::size_t k = 0; k < table.classes.size(); ++k)
    if (std::abs(table.class_mass(k) - 1.0) > 1e-9) table.normalized_per_class = false;
  return table;
}

namespace {

Dataset empty_like(const Dataset& data) {
  Dataset out;
  out.dim = data.dim;
  out.x_support = data.x_support;
  out.regime = data.regime;
  out.seed = data.seed;
  return out;
}

// Appends row n of `data` to `out` with label `label`, carrying covariates as
// shadow columns.
void append_row(Dataset& out, const Dataset& data, std::size_t n, int label) {
  const auto r = data.row(n);
  out.x.insert(out.x.end(), r.begin(), r.end());
  out.y.push_back(label);
  if (data.u) out.shadow["u"].push_back((*data.u)[n]);
  if (data.z) out.shadow["z"].push_back((*data.z)[n]);
  if (data.d) out.shadow["d"].push_back((*data.d)[n]);
  for (const auto& [name, column] : data.shadow) {
    if ((name == "u" && data.u) || (name == "z" && data.z) || (name == "d" && data.d)) continue;
    out.shadow[name].push_back(column[n]);
  }
}

std::vector<double> resolve_prior(const Dataset& data, const ResampleConfig& config, std::size_t n_classes) {
  std::vector<double> prior(n_classes, 0.0);
  if (config.class_prior) {
    if (config.class_prior->size() != n_classes)
      throw InvalidArgument("class prior has " + std::to_string(config.class_prior->size()) + " entries, expected " +
                            std::to_string(n_classes));
    double total = 0.0;
    for (double p : *config.class_prior) {
      if (!(p >= 0.0)) throw InvalidArgument("class prior must be non-negative");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("class prior must sum to 1");
    return *config.class_prior;
  }
  for (int v : data.y)
    if (static_cast<std::size_t>(v) < n_classes) prior[static_cast<std::size_t>(v)] += 1.0;
  for (double& p : prior) p /= static_cast<double>(data.size());
  return prior;
}

}  // namespace

Dataset cb_resample(const Dataset& data, const WeightTable& weights, const ResampleConfig& config) {
  if (data.size() == 0) throw InvalidArgument("cannot resample an empty dataset");
  if (weights.rows != data.size()) throw InvalidArgument("weight table rows do not match the dataset");
  const std::size_t n_classes = weights.classes.size();
  const std::vector<double> prior = resolve_prior(data, config, n_classes);

  double bandwidth = 0.0;
  const bool gaussian = config.kernel.kind == KernelSpec::Kind::Gaussian;
  if (gaussian) bandwidth = config.kernel.bandwidth ? *config.kernel.bandwidth : silverman_bandwidth(data.x, data.dim);

  Dataset out = empty_like(data);
  if (gaussian) out.x_support.reset();
  const std::size_t big_n = data.size();
  for (std::size_t k = 0; k < n_classes; ++k) {
    // Empirical priors reproduce the class counts exactly.
    std::size_t draws = 0;
    if (config.class_prior) {
      draws = static_cast<std::size_t>(std::floor(static_cast<double>(big_n) * prior[k] + 1e-9));
    } else {
      draws = static_cast<std::size_t>(std::count(data.y.begin(), data.y.end(), weights.classes[k]));
    }
    if (draws == 0) continue;

    std::vector<double> cumulative(big_n);
    double running = 0.0;
    for (std::size_t n = 0; n < big_n; ++n) {
      const double w = weights(n, k);
      if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("weights must be finite and non-negative");
      running += w;
      cumulative[n] = running;
    }
    if (!(running > 0.0))
      throw InvalidArgument("all weights are zero for class " + std::to_string(weights.classes[k]));

    // Kernel noise has its own stream so the drawn rows do not depend on the kernel.
    CounterRng rng(derive_seed(config.seed, {static_cast<std::uint64_t>(k)}));
    CounterRng noise(derive_seed(config.seed, {static_cast<std::uint64_t>(k), 1}));
    for (std::size_t i = 0; i < draws; ++i) {
      const double target = rng.uniform() * running;
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
      std::size_t n = static_cast<std::size_t>(it - cumulative.begin());
      if (n >= big_n) n = big_n - 1;
      append_row(out, data, n, weights.classes[k]);
      if (gaussian) {
        for (std::size_t j = 0; j < data.dim; ++j) out.x[out.x.size() - data.dim + j] += bandwidth * noise.normal();
      }
    }
  }
  return out;
}

Dataset da_resample(const Dataset& data, const ResampleConfig& config) {
  if (!data.u) throw MissingColumnError("u");
  if (data.size() == 0) throw InvalidArgument("cannot resample an empty dataset");
  const auto& u = *data.u;
  const int n_classes = column_domain(data.y);
  const int u_domain = column_domain(u);

  Dataset out = empty_like(data);
  for (int c = 0; c < n_classes; ++c) {
    std::vector<std::vector<std::size_t>> cells(static_cast<std::size_t>(u_domain));
    for (std::size_t n = 0; n < data.size(); ++n)
      if (data.y[n] == c) cells[static_cast<std::size_t>(u[n])].push_back(n);
    std::size_t largest = 0;
    for (const auto& rows : cells) largest = std::max(largest, rows.size());
    if (largest == 0) continue;  // label absent from the data
    for (int uv = 0; uv < u_domain; ++uv) {
      const auto& rows = cells[static_cast<std::size_t>(uv)];
      if (rows.empty())
        throw ZeroSupportError("y=" + std::to_string(c) + ",u=" + std::to_string(uv) + " (no rows to upsample)");
      for (std::size_t n : rows) append_row(out, data, n, c);
      CounterRng rng(derive_seed(config.seed, {static_cast<std::uint64_t>(c), static_cast<std::uint64_t>(uv)}));
      for (std::size_t i = rows.size(); i < largest; ++i) append_row(out, data, rows[rng.below(rows.size())], c);
    }
  }
  return out;
}

LabeledFeatures select_features(const Dataset& data, Method method, ScenarioId scenario) {
  if (method != Method::Simple && method != Method::IF)
    throw InvalidArgument("feature selection applies to the simple and if methods");
  std::vector<std::string> extra;
  if (method == Method::IF) {
    switch (scenario) {
      case ScenarioId::ObservedConf:
      case ScenarioId::BiasedCare:
        extra = {"u"};
        break;
      case ScenarioId::ObservedConfMediator:
      case ScenarioId::PartialConfMediator:
        extra = {"u", "z"};
        break;
      case ScenarioId::UnobservedConfMediator:
        extra = {"z"};
        break;
    }
  }
  std::vector<std::span<const int>> columns;
  for (const auto& name : extra) columns.push_back(data.covariate(name));

  LabeledFeatures out;
  out.features.rows = data.size();
  out.features.cols = data.dim + extra.size();
  out.features.values.reserve(out.features.rows * out.features.cols);
  for (std::size_t n = 0; n < data.size(); ++n) {
    const auto r = data.row(n);
    out.features.values.insert(out.features.values.end(), r.begin(), r.end());
    for (const auto& column : columns) out.features.values.push_back(static_cast<double>(column[n]));
  }
  out.labels = data.y;
  for (std::size_t j = 0; j < data.dim; ++j) out.column_names.push_back("x" + std::to_string(j));
  out.column_names.insert(out.column_names.end(), extra.begin(), extra.end());
  return out;
}

}  // namespace causal_boot
