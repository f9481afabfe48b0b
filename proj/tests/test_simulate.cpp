#include <doctest.h>

#include <cmath>
#include <sstream>

#include "causal_boot/errors.hpp"
#include "causal_boot/simulate.hpp"
#include "oracles.hpp"

using namespace causal_boot;

namespace {

SimConfig config_for(ScenarioId s, std::size_t n, double qc) {
  SimConfig c = default_sim_config(s, 4);
  c.n = n;
  c.qc = qc;
  return c;
}

// Empirical P(target=1 | cond=value) with its binomial standard error.
std::pair<double, double> rate(const std::vector<int>& target, const std::vector<int>& cond, int value) {
  double hits = 0, total = 0;
  for (std::size_t i = 0; i < target.size(); ++i)
    if (cond[i] == value) {
      total += 1;
      hits += target[i];
    }
  const double p = hits / total;
  return {p, std::sqrt(p * (1 - p) / total)};
}

double phi(double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("confounded regime couples U and Y as configured") {
  const auto d = simulate(config_for(ScenarioId::ObservedConf, 100000, 0.95), Regime::Conf, 1);
  CHECK(rate(*d.u, d.y, 1).first == doctest::Approx(0.95).epsilon(0.0105));
  CHECK(rate(*d.u, d.y, 0).first == doctest::Approx(0.05).scale(1).epsilon(0.01));
}

TEST_CASE("unconfounded regime decouples U and Y") {
  const auto d = simulate(config_for(ScenarioId::ObservedConf, 100000, 0.95), Regime::Unconf, 2);
  double su = 0, sy = 0, suy = 0, suu = 0, syy = 0;
  const double n = static_cast<double>(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double u = (*d.u)[i], y = d.y[i];
    su += u;
    sy += y;
    suy += u * y;
    suu += u * u;
    syy += y * y;
  }
  const double corr = (suy / n - su * sy / (n * n)) /
                      std::sqrt((suu / n - su * su / (n * n)) * (syy / n - sy * sy / (n * n)));
  CHECK(std::abs(corr) <= 0.02);
}

TEST_CASE("reversed regime flips the coupling") {
  const auto d = simulate(config_for(ScenarioId::ObservedConf, 50000, 0.9), Regime::RevConf, 3);
  const auto [p, se] = rate(*d.u, d.y, 1);
  CHECK(std::abs(p - 0.1) < 3 * se + 1e-12);
}

TEST_CASE("mediator follows r(y) in every regime") {
  for (Regime r : kAllRegimes) {
    const auto d = simulate(config_for(ScenarioId::ObservedConfMediator, 100000, 0.95), r, 4);
    CHECK(std::abs(rate(*d.z, d.y, 1).first - 0.95) <= 0.01);
    const auto [p0, se0] = rate(*d.z, d.y, 0);
    CHECK(std::abs(p0 - 0.05) < 3 * se0);
  }
}

TEST_CASE("care level follows f(y, u)") {
  const auto cfg = config_for(ScenarioId::BiasedCare, 200000, 0.7);
  const auto d = simulate(cfg, Regime::Conf, 5);
  for (int y = 0; y <= 1; ++y)
    for (int u = 0; u <= 1; ++u) {
      std::vector<int> target, cond;
      for (std::size_t i = 0; i < d.size(); ++i) {
        target.push_back((*d.d)[i]);
        cond.push_back(d.y[i] == y && (*d.u)[i] == u ? 1 : 0);
      }
      const double f1 = u ? cfg.f11 : cfg.f10;
      const auto [p, se] = rate(target, cond, 1);
      CHECK(std::abs(p - (y ? f1 : 1 - f1)) < 3 * se);
    }
}

TEST_CASE("feature means are additive in the parents") {
  auto cfg = config_for(ScenarioId::ObservedConf, 100000, 0.5);
  const auto d = simulate(cfg, Regime::Conf, 6);
  // Axis 0 carries Δ_y, axis 1 carries Δ_u.
  double sum0[2] = {0, 0}, sum1[2] = {0, 0}, cnt_y[2] = {0, 0}, cnt_u[2] = {0, 0};
  for (std::size_t i = 0; i < d.size(); ++i) {
    sum0[d.y[i]] += d.x[i * 4 + 0];
    cnt_y[d.y[i]] += 1;
    sum1[(*d.u)[i]] += d.x[i * 4 + 1];
    cnt_u[(*d.u)[i]] += 1;
  }
  CHECK(sum0[1] / cnt_y[1] - sum0[0] / cnt_y[0] == doctest::Approx(kDefaultOffsetNorm).epsilon(0.02));
  CHECK(sum1[1] / cnt_u[1] - sum1[0] / cnt_u[0] == doctest::Approx(kDefaultOffsetNorm).epsilon(0.02));
}

TEST_CASE("observed columns per scenario") {
  auto cols = [](ScenarioId s) {
    const auto d = simulate(config_for(s, 10, 0.9), Regime::Conf, 1);
    std::ostringstream out;
    write_csv(out, d);
    return out.str().substr(0, out.str().find('\n'));
  };
  CHECK(cols(ScenarioId::ObservedConf) == "x0,x1,x2,x3,y,u");
  CHECK(cols(ScenarioId::ObservedConfMediator) == "x0,x1,x2,x3,y,u,z");
  CHECK(cols(ScenarioId::PartialConfMediator) == "x0,x1,x2,x3,y,u,z,_v");
  CHECK(cols(ScenarioId::UnobservedConfMediator) == "x0,x1,x2,x3,y,z,_u");
  CHECK(cols(ScenarioId::BiasedCare) == "x0,x1,x2,x3,y,u,d");
}

TEST_CASE("unseen regime uses a third confounder value") {
  auto cfg = config_for(ScenarioId::ObservedConf, 1000, 0.9);
  const auto d = simulate(cfg, Regime::Unseen, 7);
  for (int u : *d.u) CHECK(u == 2);
  cfg.delta_u2.clear();
  CHECK_THROWS_AS(simulate(cfg, Regime::Unseen, 7), InvalidArgument);
  CHECK_NOTHROW(simulate(cfg, Regime::Conf, 7));
}

TEST_CASE("same seed gives the same dataset") {
  for (ScenarioId s : kAllScenarios) {
    const auto cfg = config_for(s, 300, 0.8);
    CHECK(simulate(cfg, Regime::Conf, 11) == simulate(cfg, Regime::Conf, 11));
    CHECK_FALSE(simulate(cfg, Regime::Conf, 11) == simulate(cfg, Regime::Conf, 12));
  }
}

TEST_CASE("configuration validation") {
  auto cfg = config_for(ScenarioId::ObservedConf, 10, 0.9);
  cfg.p = 1.5;
  CHECK_THROWS_AS(simulate(cfg, Regime::Conf, 1), InvalidArgument);
  cfg = config_for(ScenarioId::ObservedConf, 10, 0.9);
  cfg.sigma = 0;
  CHECK_THROWS_AS(simulate(cfg, Regime::Conf, 1), InvalidArgument);
  cfg = config_for(ScenarioId::ObservedConf, 10, 0.9);
  cfg.delta_y.push_back(1.0);
  CHECK_THROWS_AS(simulate(cfg, Regime::Conf, 1), InvalidArgument);
}

TEST_CASE("exact interventional: no confounding equals observational") {
  auto cfg = config_for(ScenarioId::ObservedConf, 0, 0.5);
  cfg.x_mode = XMode::Discrete;
  const auto doy = exact_interventional(cfg);
  const auto obs = exact_observational(cfg);
  for (int y = 0; y <= 1; ++y)
    for (std::size_t k = 0; k < doy[y].size(); ++k) CHECK(doy[y][k] == doctest::Approx(obs[y][k]).epsilon(1e-15));
}

TEST_CASE("exact interventional: binary backdoor by hand") {
  auto cfg = config_for(ScenarioId::ObservedConf, 0, 0.9);
  cfg.x_mode = XMode::Discrete;
  cfg.support = 2;
  cfg.p = 0.3;
  const auto doy = exact_interventional(cfg);
  // One bin edge at half the largest scalar mean.
  const double dy = kDefaultOffsetNorm, du = kDefaultOffsetNorm, edge = 0.5 * (dy + du);
  const double pu1 = 0.3 * 0.9 + 0.7 * 0.1;
  for (int y = 0; y <= 1; ++y) {
    double x1 = 0.0;
    for (int u = 0; u <= 1; ++u) x1 += (1 - phi(edge - y * dy - u * du)) * (u ? pu1 : 1 - pu1);
    CHECK(doy[y][1] == doctest::Approx(x1).epsilon(1e-14));
    CHECK(doy[y][0] + doy[y][1] == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("exact interventional: tables are distributions and confounding matters") {
  for (ScenarioId s : kAllScenarios) {
    auto cfg = config_for(s, 0, 0.95);
    cfg.x_mode = XMode::Discrete;
    const auto doy = exact_interventional(cfg);
    const auto obs = exact_observational(cfg);
    for (int y = 0; y <= 1; ++y) {
      double total = 0.0;
      for (double v : doy[y]) {
        CHECK(v >= 0.0);
        total += v;
      }
      CHECK(std::abs(total - 1.0) <= 1e-12);
    }
    if (s == ScenarioId::UnobservedConfMediator) {
      CHECK(oracle::total_variation(doy[1], obs[1]) > 0.05);
      CHECK(oracle::total_variation(doy[0], obs[0]) > 0.05);
    }
  }
  auto gaussian = config_for(ScenarioId::ObservedConf, 0, 0.9);
  CHECK_THROWS_AS(exact_interventional(gaussian), InvalidArgument);
}

TEST_CASE("discrete sampling matches the exact feature tables") {
  auto cfg = config_for(ScenarioId::ObservedConf, 200000, 0.7);
  cfg.x_mode = XMode::Discrete;
  const auto d = simulate(cfg, Regime::Conf, 9);
  REQUIRE(d.x_support == cfg.support);
  for (int y = 0; y <= 1; ++y)
    for (int u = 0; u <= 1; ++u) {
      const auto table = discrete_feature_table(cfg, y, u, 0, 0);
      std::vector<double> counts(table.size(), 0.0);
      double total = 0.0;
      for (std::size_t i = 0; i < d.size(); ++i)
        if (d.y[i] == y && (*d.u)[i] == u) {
          counts[static_cast<std::size_t>(d.x[i])] += 1;
          total += 1;
        }
      for (std::size_t k = 0; k < table.size(); ++k) {
        const double se = std::sqrt(table[k] * (1 - table[k]) / total);
        CHECK(std::abs(counts[k] / total - table[k]) <= 4 * se + 1e-9);
      }
    }
}

TEST_CASE("conf and revconf share P(y) and P(x | y, u)") {
  auto cfg = config_for(ScenarioId::ObservedConf, 200000, 0.8);
  cfg.x_mode = XMode::Discrete;
  const auto a = simulate(cfg, Regime::Conf, 21);
  const auto b = simulate(cfg, Regime::RevConf, 22);
  auto mean_y = [](const Dataset& d) {
    double s = 0;
    for (int y : d.y) s += y;
    return s / static_cast<double>(d.size());
  };
  CHECK(std::abs(mean_y(a) - mean_y(b)) < 0.01);
  for (int y = 0; y <= 1; ++y)
    for (int u = 0; u <= 1; ++u) {
      auto mean_x = [&](const Dataset& d) {
        double s = 0, n = 0;
        for (std::size_t i = 0; i < d.size(); ++i)
          if (d.y[i] == y && (*d.u)[i] == u) {
            s += d.x[i];
            n += 1;
          }
        return s / n;
      };
      CHECK(std::abs(mean_x(a) - mean_x(b)) < 0.1);
    }
  CHECK(std::abs(rate(*a.u, a.y, 1).first - rate(*b.u, b.y, 1).first) > 0.5);
}

TEST_CASE("overrides and text form") {
  auto cfg = default_sim_config(ScenarioId::ObservedConf);
  apply_sim_override(cfg, "p", "0.25");
  apply_sim_override(cfg, "delta_y", "2.5");
  apply_sim_override(cfg, "x_mode", "discrete");
  apply_sim_override(cfg, "qc_hidden", "0.7");
  CHECK(cfg.p == 0.25);
  CHECK(cfg.delta_y[0] == 2.5);
  CHECK(cfg.x_mode == XMode::Discrete);
  CHECK(cfg.hidden_strength() == 0.7);
  CHECK_THROWS(apply_sim_override(cfg, "delta_y", "1,2"));
  CHECK_THROWS(apply_sim_override(cfg, "nope", "1"));
  CHECK_THROWS(apply_sim_override(cfg, "p", "abc"));

  auto copy = default_sim_config(ScenarioId::ObservedConf);
  std::istringstream lines(sim_config_text(cfg));
  std::string line;
  while (std::getline(lines, line)) {
    const auto eq = line.find(" = ");
    apply_sim_override(copy, line.substr(0, eq), line.substr(eq + 3));
  }
  CHECK(sim_config_text(copy) == sim_config_text(cfg));

  apply_sim_override(cfg, "dim", "3");
  CHECK(cfg.delta_u == std::vector<double>{0.0, kDefaultOffsetNorm, 0.0});
}

TEST_CASE("signal strength rescales the label pathway") {
  auto a = default_sim_config(ScenarioId::ObservedConf, 5);
  set_signal_strength(a, 3.0);
  CHECK(a.delta_y[0] == doctest::Approx(3.0));
  CHECK(a.delta_z[0] == kDefaultOffsetNorm);
  auto b = default_sim_config(ScenarioId::ObservedConfMediator, 5);
  set_signal_strength(b, 0.5);
  CHECK(b.delta_z[0] == doctest::Approx(0.5));
  CHECK(feature_parents(ScenarioId::PartialConfMediator) == std::vector<std::string>{"U", "Z", "V"});
}
