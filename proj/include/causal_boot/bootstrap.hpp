#ifndef CAUSAL_BOOT_BOOTSTRAP_HPP
#define CAUSAL_BOOT_BOOTSTRAP_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "causal_boot/dataset.hpp"
#include "causal_boot/estimate.hpp"
#include "causal_boot/graph.hpp"

namespace causal_boot {

enum class Method { Simple, IF, DA, CB };

inline constexpr Method kAllMethods[] = {Method::Simple, Method::IF, Method::DA, Method::CB};

std::string_view method_name(Method m);  // simple, if, da, cb
Method parse_method(std::string_view text);

/// Causal-bootstrap weights w_n(c), one column per class c in 0..K-1.
struct WeightTable {
  std::vector<int> classes;
  std::size_t rows = 0;
  std::vector<double> weights;  // rows x classes, row-major
  // Every class column sums to 1 within 1e-9.
  bool normalized_per_class = false;

  double operator()(std::size_t n, std::size_t k) const { return weights[n * classes.size() + k]; }
  double class_mass(std::size_t k) const;
  std::vector<double> column(std::size_t k) const;
};

/// Columns each scenario's weights read, besides y.
std::vector<std::string> required_covariates(ScenarioId scenario);

/// Plug-in causal-bootstrap weights for class c and sample n:
///   (a) I[y_n=c] / (N P(y=c|u_n))
///   (b) P(z_n|y=c) / (N P(z_n|u_n))
///   (c) P(z_n|y=c) / (N P(z_n|y_n,u_n))
///   (d) P(z_n|y=c) / (N P(z_n|y_n))
///   (e) I[y_n=c] Σ_d P(d|y=c,u_n) / (N P(y=c|u_n))
/// where each P is fit_conditional() on `data` with pseudo-count `alpha`.
///
/// With alpha = 0 every column sums to one exactly when the sample has
/// positivity: every conditioning cell that occurs holds every value the
/// numerator gives mass to. Otherwise ZeroSupportError names the empty cell
/// (e.g. "z=1 | y=0") rather than returning weights that silently lose mass.
WeightTable cb_weights(const Dataset& data, ScenarioId scenario, double alpha = 0.0);

/// One column of cb_weights(). Positivity is only required for class c, so a
/// class can be weighted even when another class lacks support.
std::vector<double> cb_class_weights(const Dataset& data, ScenarioId scenario, int c, double alpha = 0.0);

struct ResampleConfig {
  std::uint64_t seed = 0;
  KernelSpec kernel = KernelSpec::delta();
  // Unset: the empirical label marginal of the input.
  std::optional<std::vector<double>> class_prior;
};

/// Draws floor(N p(y=c)) rows per class with replacement, row n with probability
/// w_n(c) / Σ_m w_m(c), and relabels them y = c. A Gaussian kernel perturbs each
/// drawn X with isotropic noise. Class c uses its own stream derived from
/// (seed, c); the output lists classes in ascending order. Covariates u, z, d
/// move to shadow columns; X, y and shadows are the only columns kept.
Dataset cb_resample(const Dataset& data, const WeightTable& weights, const ResampleConfig& config);

/// Balances the confounder within each label: every (y=c, u) cell is upsampled
/// with replacement to the largest cell count of its label stratum. Output per
/// label, per u value: the original rows in input order, then the draws.
Dataset da_resample(const Dataset& data, const ResampleConfig& config);

/// Training inputs for the confounded baselines. Simple uses X only. IF appends
/// covariates after X in the fixed order u, z: u for (a) and (e), u and z for (b)
/// and (c), z for (d). Shadow columns are never read.
LabeledFeatures select_features(const Dataset& data, Method method, ScenarioId scenario);

}  // namespace causal_boot

#endif  // CAUSAL_BOOT_BOOTSTRAP_HPP
