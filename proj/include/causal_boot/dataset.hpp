#ifndef CAUSAL_BOOT_DATASET_HPP
#define CAUSAL_BOOT_DATASET_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace causal_boot {

enum class Regime { Conf, Unconf, RevConf, Unseen };

inline constexpr Regime kAllRegimes[] = {Regime::Conf, Regime::Unconf, Regime::RevConf, Regime::Unseen};

std::string_view regime_name(Regime r);  // conf, unconf, revconf, unseen
Regime parse_regime(std::string_view text);

/// Tabular sample: features X (N x dim, row-major), label y, and the optional
/// discrete covariates u (confounder), z (mediator), d (level of care).
///
/// Shadow columns hold generator-only variables (a hidden confounder, or
/// covariates carried through a resampling step for diagnostics). Nothing that
/// builds training inputs reads them.
struct Dataset {
  std::size_t dim = 0;
  std::vector<double> x;
  std::vector<int> y;
  std::optional<std::vector<int>> u;
  std::optional<std::vector<int>> z;
  std::optional<std::vector<int>> d;
  std::map<std::string, std::vector<int>> shadow;
  // Set when X is a single discrete code column with this support size.
  std::optional<int> x_support;
  Regime regime = Regime::Conf;
  std::uint64_t seed = 0;

  std::size_t size() const { return y.size(); }
  std::span<const double> row(std::size_t n) const { return {x.data() + n * dim, dim}; }

  bool has_column(std::string_view name) const;
  /// Discrete column by name: y, u, z, d, or x in discrete mode. Throws
  /// MissingColumnError, or InvalidArgument for continuous x.
  std::vector<int> discrete(std::string_view name) const;
  /// Same lookup without copying; not available for x.
  std::span<const int> covariate(std::string_view name) const;

  /// Checks that every column has N entries and discrete values are >= 0.
  void validate() const;

  bool operator==(const Dataset&) const = default;
};

/// Domain size of a discrete column: max observed value + 1, at least 2.
int column_domain(std::span<const int> values);

/// CSV with header x0..x{dim-1},y[,u][,z][,d] followed by shadow columns
/// prefixed with '_'. Reals are printed in shortest round-trip form.
void write_csv(std::ostream& out, const Dataset& data, bool include_covariates = true, bool include_shadow = true);
Dataset read_csv(std::istream& in);

void write_csv_file(const std::string& path, const Dataset& data, bool include_covariates = true,
                    bool include_shadow = true);
Dataset read_csv_file(const std::string& path);

/// Shortest decimal text that parses back to the same double.
std::string format_real(double v);

/// Dense row-major feature matrix handed to models.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
  double operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

struct LabeledFeatures {
  FeatureMatrix features;
  std::vector<int> labels;
  std::vector<std::string> column_names;
};

}  // namespace causal_boot

#endif  // CAUSAL_BOOT_DATASET_HPP
