#ifndef CAUSAL_BOOT_SIMULATE_HPP
#define CAUSAL_BOOT_SIMULATE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "causal_boot/dataset.hpp"
#include "causal_boot/graph.hpp"

namespace causal_boot {

enum class XMode { Gaussian, Discrete };

/// Structural-equation generator parameters.
///
///   Y ~ Bern(p),  U | Y ~ Bern(q(y)),  V | Y ~ Bern(q'(y))   (scenario c only)
///   Z | Y ~ Bern(r(y)),  D | Y,U ~ Bern(f(y,u))
///   X | Pa(X) ~ N(Σ_parent value * Δ_parent, σ² I)
///
/// with q(1) = qc, q(0) = 1 - qc (likewise q' with qc_hidden), r(0) = r0,
/// r(1) = r1, f(1,u) = f1u and f(0,u) = 1 - f(1,u). U = 2 (Unseen regime) shifts
/// X by Δ_u2 instead of Δ_u.
struct SimConfig {
  ScenarioId scenario = ScenarioId::ObservedConf;
  std::size_t n = 1000;
  double p = 0.5;
  double qc = 0.95;
  std::optional<double> qc_hidden;  // defaults to qc
  double r0 = 0.05;
  double r1 = 0.95;
  double f10 = 0.8;
  double f11 = 0.95;
  std::size_t dim = 10;
  std::vector<double> delta_y, delta_u, delta_z, delta_v, delta_u2;
  double sigma = 1.0;
  XMode x_mode = XMode::Gaussian;
  int support = 8;  // discrete mode only

  double hidden_strength() const { return qc_hidden.value_or(qc); }
  /// Throws InvalidArgument when a probability leaves [0,1], sigma <= 0, or an
  /// offset has the wrong length.
  void validate() const;
};

// Every default offset has this norm; with sigma = 1 a model trained on
// unconfounded data reaches AUC of about 0.85.
inline constexpr double kDefaultOffsetNorm = 1.5;

/// Offset vector of the given norm along one coordinate axis.
std::vector<double> axis_offset(std::size_t dim, std::size_t axis, double norm);

/// Defaults: Δ_y and Δ_z along axis 0; Δ_u, Δ_v and Δ_u2 along axes 1, 2 and 3.
SimConfig default_sim_config(ScenarioId scenario, std::size_t dim = 10);

/// Sets the norm of the label-signal offset: Δ_y in (a) and (e), Δ_z in the
/// mediated scenarios where Y reaches X only through Z.
void set_signal_strength(SimConfig& config, double norm);

/// Override keys accepted by apply_sim_override(), in the order
/// sim_config_text() writes them.
const std::vector<std::string>& sim_config_keys();

/// Sets one field from text. Probabilities and sizes take a number; x_mode
/// takes gaussian|discrete; qc_hidden also accepts "qc" (follow qc). Offsets
/// take either dim comma-separated reals or a single norm placed on the
/// field's default axis. Changing dim resets every offset to its default.
void apply_sim_override(SimConfig& config, std::string_view key, std::string_view value);

/// key = value lines for every overridable field, defaults included.
std::string sim_config_text(const SimConfig& config, std::string_view prefix = "");

/// Parents of X in the generator, e.g. {"Y","U"} for (a). V appears for (c).
std::vector<std::string> feature_parents(ScenarioId scenario);

/// Ancestral sampling. Observed columns: (a) u; (b) u,z; (c) u,z with V as
/// shadow "v"; (d) z with U as shadow "u"; (e) u,d. The same seed always gives
/// the same dataset.
///
/// Regimes: Conf uses q as configured; Unconf sets q = q' = 0.5; RevConf swaps
/// q(1) = 1 - qc (and q' likewise); Unseen fixes U = 2, q' = 0.5.
Dataset simulate(const SimConfig& config, Regime regime, std::uint64_t seed);

/// P(x | do(y)) for discrete-X configurations: Y is forced while the
/// confounders keep their pre-treatment marginal P(u, v) of the Conf regime.
/// result[y][x], each row summing to one.
std::vector<std::vector<double>> exact_interventional(const SimConfig& config);

/// P(x | y) of the Conf regime, for comparison with the interventional table.
std::vector<std::vector<double>> exact_observational(const SimConfig& config);

/// Discrete-mode P(x = k | parent values); entries sum to one.
std::vector<double> discrete_feature_table(const SimConfig& config, int y, int u, int z, int v);

}  // namespace causal_boot

#endif  // CAUSAL_BOOT_SIMULATE_HPP
