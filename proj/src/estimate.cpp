#include "causal_boot/estimate.hpp"

#include <cmath>
#include <numbers>

#include "causal_boot/errors.hpp"

namespace causal_boot {

std::size_t CategoricalTable::group_index(std::span<const int> given_values) const {
  if (given_values.size() != given_.size())
    throw InvalidArgument("expected " + std::to_string(given_.size()) + " conditioning values");
  std::size_t index = 0;
  for (std::size_t k = 0; k < given_.size(); ++k) {
    const int v = given_values[k];
    if (v < 0 || v >= given_domains_[k])
      throw DomainError(given_[k] + "=" + std::to_string(v) + " outside domain of size " +
                        std::to_string(given_domains_[k]));
    index = index * static_cast<std::size_t>(given_domains_[k]) + static_cast<std::size_t>(v);
  }
  return index;
}

std::string CategoricalTable::describe(std::span<const int> given_values) const {
  std::string out;
  for (std::size_t k = 0; k < given_.size(); ++k) {
    if (k) out += ",";
    out += given_[k] + "=" + std::to_string(given_values[k]);
  }
  return out.empty() ? "(empty data)" : out;
}

double CategoricalTable::count(int target_value, std::span<const int> given_values) const {
  if (target_value < 0 || target_value >= target_domain_)
    throw DomainError(target_ + "=" + std::to_string(target_value) + " outside domain of size " +
                      std::to_string(target_domain_));
  return counts_[group_index(given_values) * static_cast<std::size_t>(target_domain_) +
                 static_cast<std::size_t>(target_value)];
}

double CategoricalTable::group_count(std::span<const int> given_values) const {
  return group_counts_[group_index(given_values)];
}

double CategoricalTable::prob(int target_value, std::span<const int> given_values) const {
  const double numerator = count(target_value, given_values) + alpha_;
  const double denominator = group_count(given_values) + alpha_ * target_domain_;
  if (denominator <= 0.0) throw ZeroSupportError(describe(given_values));
  return numerator / denominator;
}

CategoricalTable fit_conditional(const Dataset& data, std::string_view target, const std::vector<std::string>& given,
                                 double alpha, std::optional<std::vector<int>> domains) {
  if (!(alpha >= 0.0)) throw InvalidArgument("smoothing must be non-negative");
  if (data.size() == 0) throw InvalidArgument("cannot fit a conditional table on an empty dataset");
  if (domains && domains->size() != given.size() + 1) throw InvalidArgument("domain override has wrong length");

  CategoricalTable table;
  table.target_ = std::string(target);
  table.given_ = given;
  table.alpha_ = alpha;

  const std::vector<int> target_column = data.discrete(target);
  std::vector<std::vector<int>> given_columns;
  for (const auto& g : given) given_columns.push_back(data.discrete(g));

  table.target_domain_ = domains ? (*domains)[0] : column_domain(target_column);
  std::size_t groups = 1;
  for (std::size_t k = 0; k < given.size(); ++k) {
    table.given_domains_.push_back(domains ? (*domains)[k + 1] : column_domain(given_columns[k]));
    groups *= static_cast<std::size_t>(table.given_domains_.back());
  }
  table.counts_.assign(groups * static_cast<std::size_t>(table.target_domain_), 0.0);
  table.group_counts_.assign(groups, 0.0);

  std::vector<int> key(given.size());
  for (std::size_t n = 0; n < data.size(); ++n) {
    for (std::size_t k = 0; k < given.size(); ++k) key[k] = given_columns[k][n];
    const std::size_t g = table.group_index(key);
    const int t = target_column[n];
    if (t >= table.target_domain_) throw DomainError(table.target_ + "=" + std::to_string(t) + " outside domain");
    table.counts_[g * static_cast<std::size_t>(table.target_domain_) + static_cast<std::size_t>(t)] += 1.0;
    table.group_counts_[g] += 1.0;
  }
  return table;
}

KernelSpec KernelSpec::gaussian(std::optional<double> h) {
  if (h && !(*h > 0.0)) throw InvalidArgument("Gaussian kernel bandwidth must be positive");
  return {Kind::Gaussian, h};
}

KernelSpec parse_kernel(std::string_view text) {
  if (text == "delta") return KernelSpec::delta();
  if (text == "gaussian") return KernelSpec::gaussian();
  if (text.rfind("gaussian:", 0) == 0) {
    const std::string h(text.substr(9));
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(h, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != h.size() || h.empty()) throw InvalidArgument("bad kernel bandwidth '" + h + "'");
    return KernelSpec::gaussian(value);
  }
  throw InvalidArgument("unknown kernel '" + std::string(text) + "'");
}

std::string kernel_to_string(const KernelSpec& k) {
  if (k.kind == KernelSpec::Kind::Delta) return "delta";
  return k.bandwidth ? "gaussian:" + format_real(*k.bandwidth) : "gaussian";
}

double silverman_bandwidth(std::span<const double> samples, std::size_t dim) {
  if (dim == 0 || samples.size() < 2 * dim) throw InvalidArgument("Silverman bandwidth needs at least two samples");
  const std::size_t n = samples.size() / dim;
  double mean_std = 0.0;
  for (std::size_t j = 0; j < dim; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += samples[i * dim + j];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += (samples[i * dim + j] - mean) * (samples[i * dim + j] - mean);
    mean_std += std::sqrt(var / static_cast<double>(n - 1));
  }
  mean_std /= static_cast<double>(dim);
  const double d = static_cast<double>(dim);
  const double h = std::pow(4.0 / (d + 2.0), 1.0 / (d + 4.0)) * std::pow(static_cast<double>(n), -1.0 / (d + 4.0)) *
                   mean_std;
  if (!(h > 0.0)) throw InvalidArgument("Silverman bandwidth is zero (constant samples)");
  return h;
}

double kde_density(std::span<const double> samples, std::size_t dim, const KernelSpec& kernel,
                   std::span<const double> point) {
  if (kernel.kind != KernelSpec::Kind::Gaussian)
    throw InvalidArgument("delta kernel has no density; count exact matches instead");
  if (dim == 0 || point.size() != dim || samples.size() % dim != 0)
    throw InvalidArgument("kde: dimension mismatch");
  if (samples.empty()) throw InvalidArgument("kde: no samples");
  const double h = kernel.bandwidth ? *kernel.bandwidth : silverman_bandwidth(samples, dim);
  const std::size_t n = samples.size() / dim;
  const double norm = std::pow(2.0 * std::numbers::pi * h * h, -0.5 * static_cast<double>(dim));
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double sq = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      const double diff = point[j] - samples[i * dim + j];
      sq += diff * diff;
    }
    total += std::exp(-sq / (2.0 * h * h));
  }
  return norm * total / static_cast<double>(n);
}

}  // namespace causal_boot
