#include <doctest.h>

#include <cmath>

#include "causal_boot/errors.hpp"
#include "causal_boot/model.hpp"
#include "causal_boot/rng.hpp"
#include "oracles.hpp"

using namespace causal_boot;

namespace {

FeatureMatrix matrix(std::size_t cols, std::vector<double> values) {
  FeatureMatrix m;
  m.cols = cols;
  m.rows = values.size() / cols;
  m.values = std::move(values);
  return m;
}

struct Problem {
  FeatureMatrix x;
  std::vector<int> y;
};

Problem random_problem(CounterRng& rng, std::size_t rows, std::size_t cols) {
  Problem p;
  p.x.rows = rows;
  p.x.cols = cols;
  for (std::size_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      const double v = rng.normal();
      p.x.values.push_back(v);
      s += v * (j % 2 ? -1.0 : 1.0);
    }
    p.y.push_back(rng.bernoulli(1.0 / (1.0 + std::exp(-s))) ? 1 : 0);
  }
  p.y[0] = 0;
  p.y[1] = 1;
  return p;
}

Model random_model(CounterRng& rng, ModelKind kind, std::size_t inputs) {
  if (kind == ModelKind::Linear) {
    LinearModel m;
    for (std::size_t j = 0; j < inputs; ++j) m.weights.push_back(rng.normal());
    m.bias = rng.normal();
    return m;
  }
  MlpModel m;
  m.inputs = inputs;
  m.hidden = 4;
  for (std::size_t k = 0; k < m.hidden * inputs; ++k) m.w1.push_back(rng.normal());
  for (std::size_t k = 0; k < m.hidden; ++k) {
    m.b1.push_back(rng.normal());
    m.w2.push_back(rng.normal());
  }
  m.b2 = rng.normal();
  return m;
}

}  // namespace

TEST_CASE("auc: worked examples") {
  const std::vector<double> s = {0.9, 0.8, 0.4, 0.2};
  CHECK(auc(s, std::vector<int>{1, 0, 1, 0}) == doctest::Approx(0.75));
  CHECK(auc(s, std::vector<int>{1, 1, 0, 0}) == 1.0);
  CHECK(auc(s, std::vector<int>{0, 0, 1, 1}) == 0.0);
  CHECK(auc(std::vector<double>{0.5, 0.5, 0.5, 0.5}, std::vector<int>{1, 0, 1, 0}) == 0.5);
  CHECK_THROWS_AS(auc(s, std::vector<int>{1, 1, 1, 1}), InvalidArgument);
  CHECK_THROWS_AS(auc(s, std::vector<int>{1, 0}), InvalidArgument);
}

TEST_CASE("auc: matches pair counting, invariant to monotone maps, flips to one minus") {
  CounterRng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 5 + rng.below(60);
    std::vector<double> s(n), mapped(n), negated(n);
    std::vector<int> y(n), flipped(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng.below(8)) / 4.0;  // many ties
      y[i] = rng.bernoulli(0.4) ? 1 : 0;
    }
    y[0] = 0;
    y[1] = 1;
    for (std::size_t i = 0; i < n; ++i) {
      mapped[i] = std::exp(3 * s[i]) + 1;
      negated[i] = -s[i];
      flipped[i] = 1 - y[i];
    }
    const double a = auc(s, y);
    CHECK(a == doctest::Approx(oracle::auc_pairs(s, y)).epsilon(1e-12));
    CHECK(auc(mapped, y) == doctest::Approx(a).epsilon(1e-12));
    CHECK(auc(s, flipped) == doctest::Approx(1 - a).epsilon(1e-12));
    CHECK(auc(negated, y) == doctest::Approx(1 - a).epsilon(1e-12));
  }
}

TEST_CASE("prediction basics") {
  const auto x = matrix(1, {0.0, -2.0, -1.0, 1.0, 2.0});
  const auto zero = predict_proba(LinearModel{{0.0}, 0.0}, x);
  for (double p : zero) CHECK(p == 0.5);
  const auto unit = predict_proba(LinearModel{{1.0}, 0.0}, x);
  CHECK(unit[0] == 0.5);
  for (std::size_t i = 2; i < unit.size(); ++i) CHECK(unit[i] > unit[i - 1]);
  CHECK(unit[1] > 0.0);
  const auto extreme = predict_proba(LinearModel{{1000.0}, 0.0}, x);
  CHECK(extreme[1] == 0.0);
  CHECK(extreme[4] == 1.0);
  CHECK_THROWS_AS(predict_proba(LinearModel{{1.0, 2.0}, 0.0}, x), InvalidArgument);
}

TEST_CASE("gradients match central finite differences") {
  CounterRng rng(41);
  for (ModelKind kind : {ModelKind::Linear, ModelKind::Mlp}) {
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t cols = 1 + rng.below(4);
      const auto prob = random_problem(rng, 12, cols);
      const auto model = random_model(rng, kind, cols);
      const double l2 = trial % 2 ? 0.05 : 0.0;
      const auto g = gradient(model, prob.x, prob.y, l2);
      auto params = flatten(model);
      REQUIRE(g.size() == params.size());
      for (std::size_t k = 0; k < params.size(); ++k) {
        const double h = 1e-5, saved = params[k];
        params[k] = saved + h;
        const double up = objective(unflatten(model, params), prob.x, prob.y, l2);
        params[k] = saved - h;
        const double down = objective(unflatten(model, params), prob.x, prob.y, l2);
        params[k] = saved;
        const double fd = (up - down) / (2 * h);
        INFO(model_kind_name(kind), " param ", k);
        CHECK(std::abs(g[k] - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
      }
    }
  }
}

TEST_CASE("flatten and unflatten round-trip") {
  CounterRng rng(43);
  for (ModelKind kind : {ModelKind::Linear, ModelKind::Mlp}) {
    const auto m = random_model(rng, kind, 3);
    const auto p = flatten(m);
    CHECK(flatten(unflatten(m, p)) == p);
    CHECK_THROWS_AS(unflatten(m, std::vector<double>(p.size() + 1)), InvalidArgument);
  }
}

TEST_CASE("separable data is ranked perfectly") {
  std::vector<double> values;
  std::vector<int> y;
  for (int i = 0; i < 200; ++i) {
    const double v = (i % 2 ? 1.0 : -1.0) * (0.5 + 0.01 * i);
    values.push_back(v);
    y.push_back(i % 2);
  }
  const auto x = matrix(1, values);
  for (ModelKind kind : {ModelKind::Linear, ModelKind::Mlp}) {
    TrainConfig cfg;
    cfg.kind = kind;
    cfg.epochs = 20;
    const auto r = train(x, y, cfg);
    CHECK(auc(predict_proba(r.model, x), y) == 1.0);
  }
}

TEST_CASE("loss decreases at a small learning rate") {
  CounterRng rng(47);
  const auto prob = random_problem(rng, 400, 3);
  for (ModelKind kind : {ModelKind::Linear, ModelKind::Mlp}) {
    TrainConfig cfg;
    cfg.kind = kind;
    cfg.learning_rate = 0.01;
    cfg.batch_size = 400;  // full batch
    cfg.epochs = 50;
    const auto r = train(prob.x, prob.y, cfg);
    REQUIRE(r.epoch_loss.size() == 50);
    for (std::size_t e = 1; e < r.epoch_loss.size(); ++e) CHECK(r.epoch_loss[e] <= r.epoch_loss[e - 1] + 1e-12);
    CHECK(r.final_loss == r.epoch_loss.back());
  }
}

TEST_CASE("strong penalty shrinks weights and predicts the prior") {
  CounterRng rng(53);
  auto prob = random_problem(rng, 500, 2);
  double positives = 0.0;
  for (int y : prob.y) positives += y;
  const double prior = positives / static_cast<double>(prob.y.size());
  TrainConfig cfg;
  cfg.l2 = 10.0;
  cfg.learning_rate = 0.05;
  cfg.epochs = 400;
  cfg.batch_size = 500;
  const auto r = train(prob.x, prob.y, cfg);
  cfg.l2 = 0.01;
  const auto loose = train(prob.x, prob.y, cfg);
  // The penalized optimum scales like 1 / (2 l2) times the score covariance.
  const auto& m = std::get<LinearModel>(r.model);
  const auto& free = std::get<LinearModel>(loose.model);
  for (std::size_t j = 0; j < m.weights.size(); ++j) {
    CHECK(std::abs(m.weights[j]) < 0.02);
    CHECK(std::abs(m.weights[j]) * 20 < std::abs(free.weights[j]));
  }
  for (double p : predict_proba(r.model, prob.x)) CHECK(p == doctest::Approx(prior).epsilon(0.01));
}

TEST_CASE("training is bitwise deterministic") {
  CounterRng rng(59);
  const auto prob = random_problem(rng, 300, 4);
  for (ModelKind kind : {ModelKind::Linear, ModelKind::Mlp}) {
    TrainConfig cfg;
    cfg.kind = kind;
    cfg.seed = 9;
    const auto a = train(prob.x, prob.y, cfg);
    const auto b = train(prob.x, prob.y, cfg);
    CHECK(flatten(a.model) == flatten(b.model));
    cfg.seed = 10;
    CHECK(flatten(train(prob.x, prob.y, cfg).model) != flatten(a.model));
  }
}

TEST_CASE("training input validation") {
  const auto x = matrix(1, {0.0, 1.0, 2.0});
  TrainConfig cfg;
  CHECK_THROWS_AS(train(x, std::vector<int>{1, 1, 1}, cfg), InvalidArgument);
  CHECK_THROWS_AS(train(x, std::vector<int>{0, 1, 2}, cfg), InvalidArgument);
  CHECK_THROWS_AS(train(x, std::vector<int>{0, 1}, cfg), InvalidArgument);
  CHECK_THROWS_AS(train(matrix(1, {0.0, NAN, 1.0}), std::vector<int>{0, 1, 0}, cfg), InvalidArgument);
  cfg.learning_rate = 0;
  CHECK_THROWS_AS(train(x, std::vector<int>{0, 1, 0}, cfg), InvalidArgument);
  CHECK(parse_model_kind("mlp") == ModelKind::Mlp);
  CHECK_THROWS(parse_model_kind("tree"));
}
