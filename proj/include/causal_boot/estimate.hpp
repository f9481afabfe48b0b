#ifndef CAUSAL_BOOT_ESTIMATE_HPP
#define CAUSAL_BOOT_ESTIMATE_HPP

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "causal_boot/dataset.hpp"

namespace causal_boot {

/// Plug-in conditional P(target | given) from counts with pseudo-count alpha:
///   (count + alpha) / (group_count + alpha * |target domain|).
class CategoricalTable {
 public:
  const std::string& target() const { return target_; }
  int target_domain() const { return target_domain_; }
  const std::vector<std::string>& given() const { return given_; }
  const std::vector<int>& given_domains() const { return given_domains_; }
  double alpha() const { return alpha_; }

  /// Throws DomainError for values outside the declared domains and
  /// ZeroSupportError when the conditioning cell has no mass.
  double prob(int target_value, std::span<const int> given_values) const;
  double prob(int target_value, std::initializer_list<int> given_values) const {
    return prob(target_value, std::span<const int>(given_values.begin(), given_values.size()));
  }

  double count(int target_value, std::span<const int> given_values) const;
  double group_count(std::span<const int> given_values) const;

 private:
  friend CategoricalTable fit_conditional(const Dataset&, std::string_view, const std::vector<std::string>&, double,
                                          std::optional<std::vector<int>>);

  std::size_t group_index(std::span<const int> given_values) const;
  std::string describe(std::span<const int> given_values) const;

  std::string target_;
  int target_domain_ = 0;
  std::vector<std::string> given_;
  std::vector<int> given_domains_;
  double alpha_ = 0.0;
  std::vector<double> counts_;  // [group][target]
  std::vector<double> group_counts_;
};

/// Fits P(target | given) on discrete columns of `data`. Domains default to
/// column_domain() of each column; `domains` overrides them (target first, then
/// the given columns in order).
CategoricalTable fit_conditional(const Dataset& data, std::string_view target, const std::vector<std::string>& given,
                                 double alpha = 0.0, std::optional<std::vector<int>> domains = std::nullopt);

struct KernelSpec {
  enum class Kind { Delta, Gaussian };
  Kind kind = Kind::Delta;
  // Gaussian only; unset means Silverman's rule on the data being resampled.
  std::optional<double> bandwidth;

  static KernelSpec delta() { return {}; }
  static KernelSpec gaussian(std::optional<double> h = std::nullopt);
};

/// "delta", "gaussian" (Silverman bandwidth) or "gaussian:<h>".
KernelSpec parse_kernel(std::string_view text);
std::string kernel_to_string(const KernelSpec& k);

/// Silverman's rule of thumb for an isotropic Gaussian kernel:
/// h = (4 / (d + 2))^(1/(d+4)) * n^(-1/(d+4)) * mean per-dimension std.
double silverman_bandwidth(std::span<const double> samples, std::size_t dim);

/// (1/N) Σ_n K_h(point - x_n) with the isotropic Gaussian kernel
/// K_h(v) = (2π h²)^(-d/2) exp(-|v|² / (2h²)). `samples` is N x dim row-major.
/// A delta kernel has no density; InvalidArgument is thrown for it.
double kde_density(std::span<const double> samples, std::size_t dim, const KernelSpec& kernel,
                   std::span<const double> point);

}  // namespace causal_boot

#endif  // CAUSAL_BOOT_ESTIMATE_HPP
