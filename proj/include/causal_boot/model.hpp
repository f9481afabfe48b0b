#ifndef CAUSAL_BOOT_MODEL_HPP
#define CAUSAL_BOOT_MODEL_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "causal_boot/dataset.hpp"

namespace causal_boot {

struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;
};

/// One hidden tanh layer: p = sigmoid(w2 · tanh(W1 x + b1) + b2).
struct MlpModel {
  std::size_t inputs = 0;
  std::size_t hidden = 0;
  std::vector<double> w1;  // hidden x inputs, row-major
  std::vector<double> b1;
  std::vector<double> w2;
  double b2 = 0.0;
};

using Model = std::variant<LinearModel, MlpModel>;

enum class ModelKind { Linear, Mlp };

std::string_view model_kind_name(ModelKind k);  // linear, mlp
ModelKind parse_model_kind(std::string_view text);

struct TrainConfig {
  double learning_rate = 0.1;
  int epochs = 30;
  std::size_t batch_size = 64;
  std::uint64_t seed = 0;
  double l2 = 0.0;  // penalty on weights; biases are not penalized
  ModelKind kind = ModelKind::Linear;
  std::size_t hidden = 16;

  void validate() const;
};

struct TrainResult {
  Model model;
  double final_loss = 0.0;
  std::vector<double> epoch_loss;  // full-data objective after each epoch
};

/// Mini-batch gradient descent on mean logistic loss + l2 * |weights|^2.
/// Rows are visited in a fresh permutation per epoch drawn from the seed.
/// Throws InvalidArgument on single-class labels, non-finite features, or
/// shape mismatch.
TrainResult train(const FeatureMatrix& features, std::span<const int> labels, const TrainConfig& config);

std::vector<double> predict_proba(const Model& model, const FeatureMatrix& features);

/// Area under the ROC curve with ties counted one half (midrank statistic).
double auc(std::span<const double> scores, std::span<const int> labels);

// Parameter-vector view used by the optimizer and by gradient checks. Layout:
// linear [weights..., bias]; mlp [w1..., b1..., w2..., b2].
std::vector<double> flatten(const Model& model);
Model unflatten(const Model& shape, std::span<const double> params);
double objective(const Model& model, const FeatureMatrix& features, std::span<const int> labels, double l2);
std::vector<double> gradient(const Model& model, const FeatureMatrix& features, std::span<const int> labels,
                             double l2);

}  // namespace causal_boot

#endif  // CAUSAL_BOOT_MODEL_HPP
