#ifndef CAUSAL_BOOT_IDENTIFY_HPP
#define CAUSAL_BOOT_IDENTIFY_HPP

#include <cstddef>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "causal_boot/graph.hpp"

namespace causal_boot {

/// Symbolic expression over probability terms of the observational joint.
///
/// Sum binds its variables lexically: inside the body, a bound name refers to
/// the summation index even when the same name is free further out (this is
/// how a re-summed treatment variable y' is represented). Variable names are
/// graph node names; rendering lower-cases them.
class Estimand {
 public:
  enum class Kind { Sum, Product, Cond, Marginal, Quotient, Indicator };

  static Estimand sum(std::vector<std::string> over, Estimand body);
  static Estimand product(std::vector<Estimand> factors);
  /// P(target | given). Collapses to a Marginal when `given` is empty.
  static Estimand cond(std::vector<std::string> target, std::vector<std::string> given);
  static Estimand marginal(std::vector<std::string> target);
  static Estimand quotient(Estimand numerator, Estimand denominator);
  /// 1 when `variable` takes `value`, 0 otherwise.
  static Estimand indicator(std::string variable, int value);

  Kind kind() const { return kind_; }
  // Sum: bound variables. Cond/Marginal: target. Indicator: the variable.
  const std::vector<std::string>& variables() const { return variables_; }
  const std::vector<std::string>& given() const { return given_; }
  const std::vector<Estimand>& children() const { return children_; }
  int indicator_value() const { return value_; }

  /// Variables referenced outside any binding Sum.
  NodeSet free_variables() const;

  bool operator==(const Estimand&) const = default;

 private:
  Kind kind_ = Kind::Product;
  std::vector<std::string> variables_;
  std::vector<std::string> given_;
  std::vector<Estimand> children_;
  int value_ = 0;
};

/// Canonical text, e.g. "Σ_{u} P(x|y,u) P(u)". Bound variables that shadow a
/// free or outer-bound name are primed (y').
std::string estimand_to_text(const Estimand& e);

/// Exact joint distribution over finitely many discrete variables. Cells are
/// stored row-major with the last variable varying fastest.
class JointTable {
 public:
  JointTable() = default;
  /// Throws InvalidArgument unless probabilities are non-negative and sum to
  /// 1 within 1e-12.
  JointTable(std::vector<std::string> variables, std::vector<int> domains, std::vector<double> probabilities);

  const std::vector<std::string>& variables() const { return variables_; }
  const std::vector<int>& domains() const { return domains_; }
  const std::vector<double>& probabilities() const { return probabilities_; }
  int domain(const std::string& variable) const;
  bool has(const std::string& variable) const;

  /// Probability that every listed variable takes its value (a marginal event).
  double mass(const std::map<std::string, int>& event) const;
  /// Sums out every variable not in `keep`.
  JointTable marginalize(const NodeSet& keep) const;

 private:
  std::vector<std::string> variables_;
  std::vector<int> domains_;
  std::vector<double> probabilities_;
  std::vector<std::size_t> strides_;
};

using Assignment = std::map<std::string, int>;

/// Distribution over the joint outcome domain (row-major over `outcome` in the
/// order given, last fastest) at the fixed intervention values. Throws
/// ZeroSupportError naming the assignment when a conditional or quotient has a
/// zero-mass denominator.
std::vector<double> evaluate_estimand(const Estimand& e, const JointTable& joint,
                                      const std::vector<std::string>& outcome, const Assignment& intervention);

struct Identified {
  Estimand estimand;
};

struct Unidentifiable {
  std::string witness;
};

using IdentifyOutcome = std::variant<Identified, Unidentifiable>;

/// Shpitser-Pearl ID algorithm for P(outcome | do(intervention)). Latent nodes
/// are projected out first. Conditionals of the observational joint are reduced
/// to minimal conditioning sets using d-separation in the projected graph, and
/// the result is put in canonical order: factors by descending topological rank
/// of their lead variable, sum indices and conditioning sets sorted (free
/// variables first).
IdentifyOutcome identify(const CausalGraph& g, const NodeSet& outcome, const NodeSet& intervention);

enum class DoRule { Observation = 1, ActionObservation = 2, Action = 3 };

/// Graphical condition of the do-calculus rule for P(x | do(y), z, w):
///   rule 1: (X ⟂ Z | Y, W) in G with Y barred;
///   rule 2: (X ⟂ Z | Y, W) with Y barred and Z underlined;
///   rule 3: (X ⟂ Z | Y, W) with Y and Z \ An(W) barred (An taken in G with Y barred).
bool rule_applicable(const CausalGraph& g, DoRule rule, const NodeSet& x, const NodeSet& y, const NodeSet& z,
                     const NodeSet& w);

}  // namespace causal_boot

#endif  // CAUSAL_BOOT_IDENTIFY_HPP
