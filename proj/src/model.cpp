#include "causal_boot/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "causal_boot/errors.hpp"
#include "causal_boot/rng.hpp"

namespace causal_boot {

namespace {

double sigmoid(double s) {
  if (s >= 0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

// log(1 + e^s) without overflow.
double softplus(double s) { return s > 0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s)); }

std::size_t input_width(const Model& m) {
  if (const auto* lin = std::get_if<LinearModel>(&m)) return lin->weights.size();
  return std::get<MlpModel>(m).inputs;
}

void check_shapes(const Model& m, const FeatureMatrix& f) {
  if (f.cols != input_width(m)) throw InvalidArgument("feature width does not match the model");
  if (f.values.size() != f.rows * f.cols) throw InvalidArgument("feature matrix has inconsistent size");
}

// Mean loss and (optionally) its gradient over the listed rows, plus penalty.
double loss_and_gradient(const Model& m, const FeatureMatrix& f, std::span<const int> labels,
                         std::span<const std::size_t> rows, double l2, std::vector<double>* grad) {
  const double inv = 1.0 / static_cast<double>(rows.size());
  double loss = 0.0;
  if (const auto* lin = std::get_if<LinearModel>(&m)) {
    const std::size_t d = lin->weights.size();
    if (grad) grad->assign(d + 1, 0.0);
    for (std::size_t i : rows) {
      const auto x = f.row(i);
      const double s = std::inner_product(x.begin(), x.end(), lin->weights.begin(), lin->bias);
      loss += softplus(s) - labels[i] * s;
      if (grad) {
        const double r = (sigmoid(s) - labels[i]) * inv;
        for (std::size_t j = 0; j < d; ++j) (*grad)[j] += r * x[j];
        (*grad)[d] += r;
      }
    }
    double norm = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      norm += lin->weights[j] * lin->weights[j];
      if (grad) (*grad)[j] += 2.0 * l2 * lin->weights[j];
    }
    return loss * inv + l2 * norm;
  }

  const auto& mlp = std::get<MlpModel>(m);
  const std::size_t d = mlp.inputs, h = mlp.hidden;
  const std::size_t off_b1 = h * d, off_w2 = off_b1 + h, off_b2 = off_w2 + h;
  if (grad) grad->assign(off_b2 + 1, 0.0);
  std::vector<double> act(h);
  for (std::size_t i : rows) {
    const auto x = f.row(i);
    double s = mlp.b2;
    for (std::size_t k = 0; k < h; ++k) {
      const double* wk = mlp.w1.data() + k * d;
      act[k] = std::tanh(std::inner_product(x.begin(), x.end(), wk, mlp.b1[k]));
      s += mlp.w2[k] * act[k];
    }
    loss += softplus(s) - labels[i] * s;
    if (grad) {
      const double r = (sigmoid(s) - labels[i]) * inv;
      for (std::size_t k = 0; k < h; ++k) {
        (*grad)[off_w2 + k] += r * act[k];
        const double back = r * mlp.w2[k] * (1.0 - act[k] * act[k]);
        (*grad)[off_b1 + k] += back;
        double* gk = grad->data() + k * d;
        for (std::size_t j = 0; j < d; ++j) gk[j] += back * x[j];
      }
      (*grad)[off_b2] += r;
    }
  }
  double norm = 0.0;
  for (std::size_t j = 0; j < h * d; ++j) {
    norm += mlp.w1[j] * mlp.w1[j];
    if (grad) (*grad)[j] += 2.0 * l2 * mlp.w1[j];
  }
  for (std::size_t k = 0; k < h; ++k) {
    norm += mlp.w2[k] * mlp.w2[k];
    if (grad) (*grad)[off_w2 + k] += 2.0 * l2 * mlp.w2[k];
  }
  return loss * inv + l2 * norm;
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

Model initial_model(std::size_t d, const TrainConfig& config) {
  if (config.kind == ModelKind::Linear) return LinearModel{std::vector<double>(d, 0.0), 0.0};
  MlpModel m;
  m.inputs = d;
  m.hidden = config.hidden;
  m.b1.assign(m.hidden, 0.0);
  CounterRng rng(derive_seed(config.seed, {0x696e6974ULL}));
  const double a1 = 1.0 / std::sqrt(static_cast<double>(d));
  m.w1.resize(m.hidden * d);
  for (double& w : m.w1) w = a1 * (2.0 * rng.uniform() - 1.0);
  const double a2 = 1.0 / std::sqrt(static_cast<double>(m.hidden));
  m.w2.resize(m.hidden);
  for (double& w : m.w2) w = a2 * (2.0 * rng.uniform() - 1.0);
  return m;
}

}  // namespace

std::string_view model_kind_name(ModelKind k) { return k == ModelKind::Linear ? "linear" : "mlp"; }

ModelKind parse_model_kind(std::string_view text) {
  if (text == "linear") return ModelKind::Linear;
  if (text == "mlp") return ModelKind::Mlp;
  throw InvalidArgument("unknown model kind '" + std::string(text) + "'");
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw InvalidArgument("learning rate must be positive");
  if (epochs < 1) throw InvalidArgument("epochs must be at least 1");
  if (batch_size == 0) throw InvalidArgument("batch size must be positive");
  if (!(l2 >= 0.0)) throw InvalidArgument("l2 penalty must be non-negative");
  if (kind == ModelKind::Mlp && hidden == 0) throw InvalidArgument("hidden width must be at least 1");
}

std::vector<double> flatten(const Model& model) {
  std::vector<double> out;
  if (const auto* lin = std::get_if<LinearModel>(&model)) {
    out = lin->weights;
    out.push_back(lin->bias);
    return out;
  }
  const auto& m = std::get<MlpModel>(model);
  out = m.w1;
  out.insert(out.end(), m.b1.begin(), m.b1.end());
  out.insert(out.end(), m.w2.begin(), m.w2.end());
  out.push_back(m.b2);
  return out;
}

Model unflatten(const Model& shape, std::span<const double> params) {
  if (params.size() != flatten(shape).size()) throw InvalidArgument("parameter vector has the wrong length");
  if (const auto* lin = std::get_if<LinearModel>(&shape)) {
    const std::size_t d = lin->weights.size();
    return LinearModel{std::vector<double>(params.begin(), params.begin() + d), params[d]};
  }
  MlpModel m = std::get<MlpModel>(shape);
  auto it = params.begin();
  std::copy_n(it, m.w1.size(), m.w1.begin());
  it += m.w1.size();
  std::copy_n(it, m.b1.size(), m.b1.begin());
  it += m.b1.size();
  std::copy_n(it, m.w2.size(), m.w2.begin());
  it += m.w2.size();
  m.b2 = *it;
  return m;
}

double objective(const Model& model, const FeatureMatrix& features, std::span<const int> labels, double l2) {
  check_shapes(model, features);
  const auto rows = all_rows(features.rows);
  return loss_and_gradient(model, features, labels, rows, l2, nullptr);
}

std::vector<double> gradient(const Model& model, const FeatureMatrix& features, std::span<const int> labels,
                             double l2) {
  check_shapes(model, features);
  const auto rows = all_rows(features.rows);
  std::vector<double> g;
  loss_and_gradient(model, features, labels, rows, l2, &g);
  return g;
}

TrainResult train(const FeatureMatrix& features, std::span<const int> labels, const TrainConfig& config) {
  config.validate();
  if (labels.size() != features.rows || features.values.size() != features.rows * features.cols)
    throw InvalidArgument("features and labels disagree in length");
  if (features.rows < 2) throw InvalidArgument("training needs at least two rows");
  bool seen[2] = {false, false};
  for (int y : labels) {
    if (y != 0 && y != 1) throw InvalidArgument("labels must be binary");
    seen[y] = true;
  }
  if (!seen[0] || !seen[1]) throw InvalidArgument("training labels contain a single class");
  for (double v : features.values)
    if (!std::isfinite(v)) throw InvalidArgument("features must be finite");

  Model model = initial_model(features.cols, config);
  std::vector<double> params = flatten(model);
  std::vector<std::size_t> order = all_rows(features.rows);
  CounterRng rng(derive_seed(config.seed, {0x73687566ULL}));
  TrainResult result;
  std::vector<double> grad;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      const std::span<const std::size_t> batch(order.data() + start, stop - start);
      loss_and_gradient(model, features, labels, batch, config.l2, &grad);
      for (std::size_t j = 0; j < params.size(); ++j) params[j] -= config.learning_rate * grad[j];
      model = unflatten(model, params);
    }
    const auto rows = all_rows(features.rows);
    result.epoch_loss.push_back(loss_and_gradient(model, features, labels, rows, config.l2, nullptr));
  }
  result.final_loss = result.epoch_loss.back();
  result.model = std::move(model);
  return result;
}

std::vector<double> predict_proba(const Model& model, const FeatureMatrix& features) {
  check_shapes(model, features);
  std::vector<double> out(features.rows);
  for (std::size_t i = 0; i < features.rows; ++i) {
    const auto x = features.row(i);
    double s;
    if (const auto* lin = std::get_if<LinearModel>(&model)) {
      s = std::inner_product(x.begin(), x.end(), lin->weights.begin(), lin->bias);
    } else {
      const auto& m = std::get<MlpModel>(model);
      s = m.b2;
      for (std::size_t k = 0; k < m.hidden; ++k)
        s += m.w2[k] * std::tanh(std::inner_product(x.begin(), x.end(), m.w1.data() + k * m.inputs, m.b1[k]));
    }
    out[i] = sigmoid(s);
  }
  return out;
}

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw InvalidArgument("scores and labels disagree in length");
  std::vector<std::size_t> order = all_rows(scores.size());
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Sum of midranks over positives (ranks are 1-based).
  double rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) {
        rank_sum += midrank;
        ++positives;
      } else if (labels[order[k]] != 0) {
        throw InvalidArgument("labels must be binary");
      }
    }
    i = j;
  }
  const std::size_t negatives = scores.size() - positives;
  if (positives == 0 || negatives == 0) throw InvalidArgument("AUC needs both classes");
  const double p = static_cast<double>(positives);
  return (rank_sum - p * (p + 1) / 2.0) / (p * static_cast<double>(negatives));
}

}  // namespace causal_boot
