#include "causal_boot/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "causal_boot/errors.hpp"
#include "causal_boot/rng.hpp"
#include "text.hpp"

namespace causal_boot {

namespace {

bool is_probability(double v) { return v >= 0.0 && v <= 1.0; }

bool uses_mediator(ScenarioId s) {
  return s == ScenarioId::ObservedConfMediator || s == ScenarioId::PartialConfMediator ||
         s == ScenarioId::UnobservedConfMediator;
}

struct Parents {
  bool y = false, u = false, z = false, v = false;
};

Parents parents_of_x(ScenarioId s) {
  switch (s) {
    case ScenarioId::ObservedConf:
    case ScenarioId::BiasedCare:
      return {true, true, false, false};
    case ScenarioId::ObservedConfMediator:
    case ScenarioId::UnobservedConfMediator:
      return {false, true, true, false};
    case ScenarioId::PartialConfMediator:
      return {false, true, true, true};
  }
  return {};
}

struct RegimeParams {
  double q1, q0;    // P(U=1 | Y=y)
  double qh1, qh0;  // P(V=1 | Y=y)
  bool unseen = false;
};

RegimeParams regime_params(const SimConfig& c, Regime r) {
  const double q = c.qc;
  const double qh = c.hidden_strength();
  switch (r) {
    case Regime::Conf:
      return {q, 1.0 - q, qh, 1.0 - qh, false};
    case Regime::Unconf:
      return {0.5, 0.5, 0.5, 0.5, false};
    case Regime::RevConf:
      return {1.0 - q, q, 1.0 - qh, qh, false};
    case Regime::Unseen:
      return {0.0, 0.0, 0.5, 0.5, true};
  }
  return {};
}

double care_probability(const SimConfig& c, int y, int u) {
  if (u == 2) return 0.5;
  const double f1 = u == 1 ? c.f11 : c.f10;
  return y == 1 ? f1 : 1.0 - f1;
}

void add_scaled(std::vector<double>& mean, const std::vector<double>& offset, double scale) {
  for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += scale * offset[j];
}

std::vector<double> feature_mean(const SimConfig& c, const Parents& pa, int y, int u, int z, int v) {
  std::vector<double> mean(c.dim, 0.0);
  if (pa.y) add_scaled(mean, c.delta_y, y);
  if (pa.u) {
    if (u == 1) add_scaled(mean, c.delta_u, 1.0);
    if (u == 2) add_scaled(mean, c.delta_u2, 1.0);
  }
  if (pa.z) add_scaled(mean, c.delta_z, z);
  if (pa.v) add_scaled(mean, c.delta_v, v);
  return mean;
}

double sum_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

// Bin edges of the discrete feature: unit spacing centred between the smallest
// and largest attainable scalar means.
double discrete_centre(const SimConfig& c) {
  const Parents pa = parents_of_x(c.scenario);
  double top = 0.0;
  if (pa.y) top += std::max(0.0, sum_of(c.delta_y));
  if (pa.u) top += std::max(0.0, sum_of(c.delta_u));
  if (pa.z) top += std::max(0.0, sum_of(c.delta_z));
  if (pa.v) top += std::max(0.0, sum_of(c.delta_v));
  return 0.5 * top;
}

double bin_edge(const SimConfig& c, double centre, int k) { return centre + (k - 0.5 * c.support); }

int discretize(const SimConfig& c, double centre, double t) {
  int code = 0;
  for (int k = 1; k < c.support; ++k)
    if (t >= bin_edge(c, centre, k)) code = k;
  return code;
}

double normal_cdf(double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); }

}  // namespace

void SimConfig::validate() const {
  for (double v : {p, qc, hidden_strength(), r0, r1, f10, f11})
    if (!is_probability(v)) throw InvalidArgument("simulation probabilities must lie in [0, 1]");
  if (!(sigma > 0.0)) throw InvalidArgument("sigma must be positive");
  if (dim == 0) throw InvalidArgument("feature dimension must be positive");
  for (const auto* offset : {&delta_y, &delta_u, &delta_z, &delta_v})
    if (offset->size() != dim) throw InvalidArgument("offset vectors must have the feature dimension");
  if (!delta_u2.empty() && delta_u2.size() != dim) throw InvalidArgument("delta_u2 must have the feature dimension");
  if (x_mode == XMode::Discrete && (support < 2 || support > 64))
    throw InvalidArgument("discrete support must be in [2, 64]");
}

std::vector<double> axis_offset(std::size_t dim, std::size_t axis, double norm) {
  std::vector<double> out(dim, 0.0);
  out.at(axis % dim) = norm;
  return out;
}

SimConfig default_sim_config(ScenarioId scenario, std::size_t dim) {
  SimConfig c;
  c.scenario = scenario;
  c.dim = dim;
  c.delta_y = axis_offset(dim, 0, kDefaultOffsetNorm);
  c.delta_z = axis_offset(dim, 0, kDefaultOffsetNorm);
  c.delta_u = axis_offset(dim, 1, kDefaultOffsetNorm);
  c.delta_v = axis_offset(dim, 2, kDefaultOffsetNorm);
  c.delta_u2 = axis_offset(dim, 3, kDefaultOffsetNorm);
  return c;
}

void set_signal_strength(SimConfig& config, double norm) {
  auto rescale = [norm](std::vector<double>& v) {
    double current = 0.0;
    for (double x : v) current += x * x;
    current = std::sqrt(current);
    if (current == 0.0) {
      v.assign(v.size(), 0.0);
      if (!v.empty()) v[0] = norm;
      return;
    }
    for (double& x : v) x *= norm / current;
  };
  if (uses_mediator(config.scenario)) {
    rescale(config.delta_z);
  } else {
    rescale(config.delta_y);
  }
}

std::vector<std::string> feature_parents(ScenarioId scenario) {
  const Parents pa = parents_of_x(scenario);
  std::vector<std::string> out;
  if (pa.y) out.push_back("Y");
  if (pa.u) out.push_back("U");
  if (pa.z) out.push_back("Z");
  if (pa.v) out.push_back("V");
  return out;
}

Dataset simulate(const SimConfig& config, Regime regime, std::uint64_t seed) {
  config.validate();
  if (regime == Regime::Unseen && config.delta_u2.empty())
    throw InvalidArgument("the unseen regime needs a delta_u2 offset");
  const RegimeParams rp = regime_params(config, regime);
  const Parents pa = parents_of_x(config.scenario);
  const ScenarioId s = config.scenario;
  const bool has_v = s == ScenarioId::PartialConfMediator;
  const bool has_z = uses_mediator(s);
  const bool has_d = s == ScenarioId::BiasedCare;
  const bool discrete = config.x_mode == XMode::Discrete;
  const double centre = discrete ? discrete_centre(config) : 0.0;

  Dataset data;
  data.dim = discrete ? 1 : config.dim;
  if (discrete) data.x_support = config.support;
  data.regime = regime;
  data.seed = seed;
  data.x.reserve(config.n * data.dim);
  data.y.reserve(config.n);
  std::vector<int> u_col, v_col, z_col, d_col;

  CounterRng rng(derive_seed(seed, {0x73696dULL}));
  for (std::size_t n = 0; n < config.n; ++n) {
    const int y = rng.bernoulli(config.p) ? 1 : 0;
    const int u = rp.unseen ? 2 : (rng.bernoulli(y == 1 ? rp.q1 : rp.q0) ? 1 : 0);
    const int v = has_v ? (rng.bernoulli(y == 1 ? rp.qh1 : rp.qh0) ? 1 : 0) : 0;
    const int z = has_z ? (rng.bernoulli(y == 1 ? config.r1 : config.r0) ? 1 : 0) : 0;
    const int d = has_d ? (rng.bernoulli(care_probability(config, y, u)) ? 1 : 0) : 0;
    const std::vector<double> mean = feature_mean(config, pa, y, u, z, v);
    if (discrete) {
      const double t = sum_of(mean) + config.sigma * rng.normal();
      data.x.push_back(static_cast<double>(discretize(config, centre, t)));
    } else {
      for (std::size_t j = 0; j < config.dim; ++j) data.x.push_back(mean[j] + config.sigma * rng.normal());
    }
    data.y.push_back(y);
    u_col.push_back(u);
    v_col.push_back(v);
    z_col.push_back(z);
    d_col.push_back(d);
  }

  if (s == ScenarioId::UnobservedConfMediator) {
    data.shadow["u"] = std::move(u_col);
  } else {
    data.u = std::move(u_col);
  }
  if (has_v) data.shadow["v"] = std::move(v_col);
  if (has_z) data.z = std::move(z_col);
  if (has_d) data.d = std::move(d_col);
  return data;
}

std::vector<double> discrete_feature_table(const SimConfig& config, int y, int u, int z, int v) {
  if (config.x_mode != XMode::Discrete) throw InvalidArgument("feature tables exist only in discrete mode");
  const double centre = discrete_centre(config);
  const double m = sum_of(feature_mean(config, parents_of_x(config.scenario), y, u, z, v));
  std::vector<double> table(static_cast<std::size_t>(config.support));
  double lower = 0.0;
  for (int k = 0; k < config.support; ++k) {
    const double upper = k + 1 < config.support ? normal_cdf((bin_edge(config, centre, k + 1) - m) / config.sigma) : 1.0;
    table[static_cast<std::size_t>(k)] = upper - lower;
    lower = upper;
  }
  return table;
}

namespace {

// Σ over (u, v, z) of weight(y, u, v) * P(z | y) * P(x | parents), per y.
template <typename ConfounderWeight>
std::vector<std::vector<double>> mix_feature_tables(const SimConfig& config, ConfounderWeight weight) {
  config.validate();
  if (config.x_mode != XMode::Discrete) throw InvalidArgument("exact tables require discrete X");
  const ScenarioId s = config.scenario;
  const bool has_v = s == ScenarioId::PartialConfMediator;
  const bool has_z = uses_mediator(s);
  std::vector<std::vector<double>> out(2, std::vector<double>(static_cast<std::size_t>(config.support), 0.0));
  for (int y = 0; y <= 1; ++y) {
    for (int u = 0; u <= 1; ++u) {
      for (int v = 0; v <= (has_v ? 1 : 0); ++v) {
        const double w = weight(y, u, v);
        for (int z = 0; z <= (has_z ? 1 : 0); ++z) {
          const double pz = has_z ? (z == 1 ? (y == 1 ? config.r1 : config.r0) : (y == 1 ? 1 - config.r1 : 1 - config.r0))
                                  : 1.0;
          const auto table = discrete_feature_table(config, y, u, z, v);
          for (std::size_t k = 0; k < table.size(); ++k) out[y][k] += w * pz * table[k];
        }
      }
    }
  }
  return out;
}

double bern(double p, int value) { return value == 1 ? p : 1.0 - p; }

}  // namespace

std::vector<std::vector<double>> exact_interventional(const SimConfig& config) {
  const RegimeParams rp = regime_params(config, Regime::Conf);
  const bool has_v = config.scenario == ScenarioId::PartialConfMediator;
  // Pre-treatment joint of the confounders.
  auto confounders = [&](int u, int v) {
    double total = 0.0;
    for (int y = 0; y <= 1; ++y) {
      const double pu = bern(y == 1 ? rp.q1 : rp.q0, u);
      const double pv = has_v ? bern(y == 1 ? rp.qh1 : rp.qh0, v) : 1.0;
      total += bern(config.p, y) * pu * pv;
    }
    return total;
  };
  return mix_feature_tables(config, [&](int, int u, int v) { return confounders(u, v); });
}

std::vector<std::vector<double>> exact_observational(const SimConfig& config) {
  const RegimeParams rp = regime_params(config, Regime::Conf);
  const bool has_v = config.scenario == ScenarioId::PartialConfMediator;
  return mix_feature_tables(config, [&](int y, int u, int v) {
    return bern(y == 1 ? rp.q1 : rp.q0, u) * (has_v ? bern(y == 1 ? rp.qh1 : rp.qh0, v) : 1.0);
  });
}

namespace {

double parse_field(std::string_view key, std::string_view value) {
  const auto v = text::to_number<double>(value);
  if (!v) throw InvalidArgument("sim." + std::string(key) + ": expected a number, got '" + std::string(value) + "'");
  return *v;
}

std::vector<double> parse_offset(std::string_view key, std::string_view value, std::size_t dim, std::size_t axis) {
  const auto parts = text::split(value, ',');
  if (parts.size() == 1) return axis_offset(dim, axis, parse_field(key, parts[0]));
  if (parts.size() != dim)
    throw InvalidArgument("sim." + std::string(key) + ": expected 1 or " + std::to_string(dim) + " values");
  std::vector<double> out;
  for (auto part : parts) out.push_back(parse_field(key, part));
  return out;
}

std::string join_reals(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_real(v[i]);
  }
  return out;
}

}  // namespace

const std::vector<std::string>& sim_config_keys() {
  static const std::vector<std::string> keys = {"dim",   "p",       "qc_hidden", "r0",      "r1",      "f10",
                                                "f11",   "sigma",   "x_mode",    "support", "delta_y", "delta_u",
                                                "delta_z", "delta_v", "delta_u2"};
  return keys;
}

void apply_sim_override(SimConfig& c, std::string_view key, std::string_view value) {
  value = text::trim(value);
  if (key == "dim") {
    const auto d = text::to_number<std::size_t>(value);
    if (!d || *d == 0) throw InvalidArgument("sim.dim: expected a positive integer");
    const SimConfig fresh = default_sim_config(c.scenario, *d);
    c.dim = *d;
    c.delta_y = fresh.delta_y;
    c.delta_u = fresh.delta_u;
    c.delta_z = fresh.delta_z;
    c.delta_v = fresh.delta_v;
    c.delta_u2 = fresh.delta_u2;
  } else if (key == "p") {
    c.p = parse_field(key, value);
  } else if (key == "qc") {
    c.qc = parse_field(key, value);
  } else if (key == "qc_hidden") {
    if (value == "qc") {
      c.qc_hidden.reset();
    } else {
      c.qc_hidden = parse_field(key, value);
    }
  } else if (key == "r0") {
    c.r0 = parse_field(key, value);
  } else if (key == "r1") {
    c.r1 = parse_field(key, value);
  } else if (key == "f10") {
    c.f10 = parse_field(key, value);
  } else if (key == "f11") {
    c.f11 = parse_field(key, value);
  } else if (key == "sigma") {
    c.sigma = parse_field(key, value);
  } else if (key == "x_mode") {
    if (value == "gaussian") {
      c.x_mode = XMode::Gaussian;
    } else if (value == "discrete") {
      c.x_mode = XMode::Discrete;
    } else {
      throw InvalidArgument("sim.x_mode: expected gaussian or discrete");
    }
  } else if (key == "support") {
    const auto k = text::to_number<int>(value);
    if (!k) throw InvalidArgument("sim.support: expected an integer");
    c.support = *k;
  } else if (key == "delta_y") {
    c.delta_y = parse_offset(key, value, c.dim, 0);
  } else if (key == "delta_u") {
    c.delta_u = parse_offset(key, value, c.dim, 1);
  } else if (key == "delta_z") {
    c.delta_z = parse_offset(key, value, c.dim, 0);
  } else if (key == "delta_v") {
    c.delta_v = parse_offset(key, value, c.dim, 2);
  } else if (key == "delta_u2") {
    c.delta_u2 = value.empty() ? std::vector<double>{} : parse_offset(key, value, c.dim, 3);
  } else {
    throw InvalidArgument("unknown simulation field '" + std::string(key) + "'");
  }
}

std::string sim_config_text(const SimConfig& c, std::string_view prefix) {
  std::string out;
  auto line = [&](std::string_view key, const std::string& value) {
    out.append(prefix).append(key).append(" = ").append(value).append("\n");
  };
  line("dim", std::to_string(c.dim));
  line("p", format_real(c.p));
  line("qc_hidden", c.qc_hidden ? format_real(*c.qc_hidden) : "qc");
  line("r0", format_real(c.r0));
  line("r1", format_real(c.r1));
  line("f10", format_real(c.f10));
  line("f11", format_real(c.f11));
  line("sigma", format_real(c.sigma));
  line("x_mode", c.x_mode == XMode::Gaussian ? "gaussian" : "discrete");
  line("support", std::to_string(c.support));
  line("delta_y", join_reals(c.delta_y));
  line("delta_u", join_reals(c.delta_u));
  line("delta_z", join_reals(c.delta_z));
  line("delta_v", join_reals(c.delta_v));
  line("delta_u2", join_reals(c.delta_u2));
  return out;
}

}  // namespace causal_boot
