#include "causal_boot/identify.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <utility>

#include "causal_boot/errors.hpp"

namespace causal_boot {

namespace {

NodeSet set_minus(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

NodeSet set_union(const NodeSet& a, const NodeSet& b) {
  NodeSet out = a;
  out.insert(b.begin(), b.end());
  return out;
}

NodeSet set_intersect(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

std::vector<std::string> as_vector(const NodeSet& s) { return {s.begin(), s.end()}; }

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Estimand

Estimand Estimand::sum(std::vector<std::string> over, Estimand body) {
  if (over.empty()) return body;
  std::sort(over.begin(), over.end());
  over.erase(std::unique(over.begin(), over.end()), over.end());
  Estimand e;
  e.kind_ = Kind::Sum;
  e.variables_ = std::move(over);
  e.children_.push_back(std::move(body));
  return e;
}

Estimand Estimand::product(std::vector<Estimand> factors) {
  std::vector<Estimand> flat;
  for (auto& f : factors) {
    if (f.kind_ == Kind::Product) {
      for (auto& g : f.children_) flat.push_back(std::move(g));
    } else {
      flat.push_back(std::move(f));
    }
  }
  if (flat.size() == 1) return std::move(flat.front());
  Estimand e;
  e.kind_ = Kind::Product;
  e.children_ = std::move(flat);
  return e;
}

Estimand Estimand::cond(std::vector<std::string> target, std::vector<std::string> given) {
  if (given.empty()) return marginal(std::move(target));
  Estimand e;
  e.kind_ = Kind::Cond;
  e.variables_ = std::move(target);
  e.given_ = std::move(given);
  return e;
}

Estimand Estimand::marginal(std::vector<std::string> target) {
  Estimand e;
  e.kind_ = Kind::Marginal;
  e.variables_ = std::move(target);
  return e;
}

Estimand Estimand::quotient(Estimand numerator, Estimand denominator) {
  Estimand e;
  e.kind_ = Kind::Quotient;
  e.children_.push_back(std::move(numerator));
  e.children_.push_back(std::move(denominator));
  return e;
}

Estimand Estimand::indicator(std::string variable, int value) {
  Estimand e;
  e.kind_ = Kind::Indicator;
  e.variables_.push_back(std::move(variable));
  e.value_ = value;
  return e;
}

NodeSet Estimand::free_variables() const {
  switch (kind_) {
    case Kind::Sum: {
      NodeSet inner = children_.front().free_variables();
      for (const auto& v : variables_) inner.erase(v);
      return inner;
    }
    case Kind::Product:
    case Kind::Quotient: {
      NodeSet out;
      for (const auto& c : children_) {
        const NodeSet f = c.free_variables();
        out.insert(f.begin(), f.end());
      }
      return out;
    }
    case Kind::Cond:
    case Kind::Marginal:
    case Kind::Indicator: {
      NodeSet out(variables_.begin(), variables_.end());
      out.insert(given_.begin(), given_.end());
      return out;
    }
  }
  return {};
}

namespace {

class Renderer {
 public:
  explicit Renderer(const Estimand& root) : free_(root.free_variables()) {}

  std::string render(const Estimand& e) {
    using Kind = Estimand::Kind;
    switch (e.kind()) {
      case Kind::Sum: {
        std::vector<std::string> shown;
        std::vector<std::pair<std::string, std::string>> saved;
        for (const auto& v : e.variables()) {
          std::string primes;
          auto it = scope_.find(v);
          if (it != scope_.end()) {
            primes = it->second + "'";
          } else if (free_.count(v) > 0) {
            primes = "'";
          }
          saved.emplace_back(v, it == scope_.end() ? std::string("\x01") : it->second);
          scope_[v] = primes;
          shown.push_back(lower(v) + primes);
        }
        std::string body = render(e.children().front());
        for (auto it = saved.rbegin(); it != saved.rend(); ++it) {
          if (it->second == "\x01") {
            scope_.erase(it->first);
          } else {
            scope_[it->first] = it->second;
          }
        }
        return "Σ_{" + join(shown, ",") + "} " + body;
      }
      case Kind::Product: {
        std::vector<std::string> parts;
        for (const auto& f : e.children()) {
          std::string text = render(f);
          if (f.kind() == Kind::Sum || f.kind() == Kind::Quotient) text = "(" + text + ")";
          parts.push_back(std::move(text));
        }
        return join(parts, " ");
      }
      case Kind::Cond:
        return "P(" + names(e.variables()) + "|" + names(e.given()) + ")";
      case Kind::Marginal:
        return "P(" + names(e.variables()) + ")";
      case Kind::Quotient:
        return "[" + render(e.children()[0]) + "] / [" + render(e.children()[1]) + "]";
      case Kind::Indicator:
        return "I[" + name(e.variables().front()) + "=" + std::to_string(e.indicator_value()) + "]";
    }
    return {};
  }

 private:
  std::string name(const std::string& v) const {
    auto it = scope_.find(v);
    return lower(v) + (it == scope_.end() ? std::string() : it->second);
  }

  std::string names(const std::vector<std::string>& vs) const {
    std::vector<std::string> out;
    for (const auto& v : vs) out.push_back(name(v));
    return join(out, ",");
  }

  NodeSet free_;
  std::map<std::string, std::string> scope_;  // bound variable -> primes
};

}  // namespace

std::string estimand_to_text(const Estimand& e) { return Renderer(e).render(e); }

// ---------------------------------------------------------------------------
// JointTable

JointTable::JointTable(std::vector<std::string> variables, std::vector<int> domains,
                       std::vector<double> probabilities)
    : variables_(std::move(variables)), domains_(std::move(domains)), probabilities_(std::move(probabilities)) {
  if (variables_.size() != domains_.size()) throw InvalidArgument("joint table: variables/domains size mismatch");
  std::size_t cells = 1;
  for (int d : domains_) {
    if (d < 1) throw InvalidArgument("joint table: empty domain");
    cells *= static_cast<std::size_t>(d);
  }
  if (cells != probabilities_.size()) throw InvalidArgument("joint table: wrong number of cells");
  double total = 0.0;
  for (double p : probabilities_) {
    if (!(p >= 0.0)) throw InvalidArgument("joint table: negative or NaN probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("joint table: probabilities do not sum to 1");
  strides_.assign(variables_.size(), 1);
  for (std::size_t i = variables_.size(); i-- > 1;)
    strides_[i - 1] = strides_[i] * static_cast<std::size_t>(domains_[i]);
}

bool JointTable::has(const std::string& variable) const {
  return std::find(variables_.begin(), variables_.end(), variable) != variables_.end();
}

int JointTable::domain(const std::string& variable) const {
  for (std::size_t i = 0; i < variables_.size(); ++i)
    if (variables_[i] == variable) return domains_[i];
  throw UnknownNodeError(variable);
}

double JointTable::mass(const std::map<std::string, int>& event) const {
  std::vector<int> fixed(variables_.size(), -1);
  for (const auto& [name, value] : event) {
    bool found = false;
    for (std::size_t i = 0; i < variables_.size(); ++i) {
      if (variables_[i] == name) {
        if (value < 0 || value >= domains_[i]) throw DomainError(name + "=" + std::to_string(value) + " out of domain");
        fixed[i] = value;
        found = true;
      }
    }
    if (!found) throw UnknownNodeError(name);
  }
  double total = 0.0;
  for (std::size_t cell = 0; cell < probabilities_.size(); ++cell) {
    bool match = true;
    for (std::size_t i = 0; i < variables_.size() && match; ++i) {
      if (fixed[i] >= 0 && static_cast<int>((cell / strides_[i]) % domains_[i]) != fixed[i]) match = false;
    }
    if (match) total += probabilities_[cell];
  }
  return total;
}

JointTable JointTable::marginalize(const NodeSet& keep) const {
  std::vector<std::string> vars;
  std::vector<int> doms;
  std::vector<std::size_t> source;
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (keep.count(variables_[i]) > 0) {
      vars.push_back(variables_[i]);
      doms.push_back(domains_[i]);
      source.push_back(i);
    }
  }
  std::size_t cells = 1;
  for (int d : doms) cells *= static_cast<std::size_t>(d);
  std::vector<double> probs(cells, 0.0);
  for (std::size_t cell = 0; cell < probabilities_.size(); ++cell) {
    std::size_t target = 0;
    for (std::size_t k = 0; k < source.size(); ++k) {
      const std::size_t i = source[k];
      target = target * static_cast<std::size_t>(doms[k]) + (cell / strides_[i]) % domains_[i];
    }
    probs[target] += probabilities_[cell];
  }
  double total = 0.0;
  for (double p : probs) total += p;
  for (double& p : probs) p /= total;
  return JointTable(std::move(vars), std::move(doms), std::move(probs));
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

class Evaluator {
 public:
  explicit Evaluator(const JointTable& joint) : joint_(joint) {}

  double eval(const Estimand& e, Assignment& env) {
    using Kind = Estimand::Kind;
    switch (e.kind()) {
      case Kind::Sum:
        return eval_sum(e, env, 0);
      case Kind::Product: {
        double out = 1.0;
        for (const auto& f : e.children()) {
          out *= eval(f, env);
          if (out == 0.0) break;
        }
        return out;
      }
      case Kind::Marginal:
        return cached_mass(event(e.variables(), {}, env));
      case Kind::Cond: {
        const Assignment given = event({}, e.given(), env);
        const double denominator = cached_mass(given);
        if (denominator == 0.0) throw ZeroSupportError(describe(given));
        return cached_mass(event(e.variables(), e.given(), env)) / denominator;
      }
      case Kind::Quotient: {
        const double denominator = eval(e.children()[1], env);
        if (denominator == 0.0) throw ZeroSupportError("quotient denominator at " + describe(env));
        return eval(e.children()[0], env) / denominator;
      }
      case Kind::Indicator:
        return lookup(e.variables().front(), env) == e.indicator_value() ? 1.0 : 0.0;
    }
    return 0.0;
  }

 private:
  double eval_sum(const Estimand& e, Assignment& env, std::size_t depth) {
    if (depth == e.variables().size()) return eval(e.children().front(), env);
    const std::string& v = e.variables()[depth];
    const auto previous = env.find(v);
    const bool shadowing = previous != env.end();
    const int saved = shadowing ? previous->second : 0;
    double total = 0.0;
    for (int value = 0; value < joint_.domain(v); ++value) {
      env[v] = value;
      total += eval_sum(e, env, depth + 1);
    }
    if (shadowing) {
      env[v] = saved;
    } else {
      env.erase(v);
    }
    return total;
  }

  int lookup(const std::string& v, const Assignment& env) const {
    auto it = env.find(v);
    if (it == env.end()) throw InvalidArgument("estimand variable '" + v + "' is unbound");
    return it->second;
  }

  Assignment event(const std::vector<std::string>& a, const std::vector<std::string>& b, const Assignment& env) const {
    Assignment out;
    for (const auto& v : a) out[v] = lookup(v, env);
    for (const auto& v : b) out[v] = lookup(v, env);
    return out;
  }

  double cached_mass(const Assignment& event) {
    auto it = cache_.find(event);
    if (it != cache_.end()) return it->second;
    const double m = joint_.mass(event);
    cache_.emplace(event, m);
    return m;
  }

  static std::string describe(const Assignment& a) {
    std::vector<std::string> parts;
    for (const auto& [k, v] : a) parts.push_back(lower(k) + "=" + std::to_string(v));
    return join(parts, ",");
  }

  const JointTable& joint_;
  std::map<Assignment, double> cache_;
};

}  // namespace

std::vector<double> evaluate_estimand(const Estimand& e, const JointTable& joint,
                                      const std::vector<std::string>& outcome, const Assignment& intervention) {
  for (const auto& v : outcome)
    if (!joint.has(v)) throw UnknownNodeError(v);
  std::size_t cells = 1;
  for (const auto& v : outcome) cells *= static_cast<std::size_t>(joint.domain(v));
  Evaluator evaluator(joint);
  std::vector<double> out(cells, 0.0);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    Assignment env = intervention;
    std::size_t rest = cell;
    for (std::size_t k = outcome.size(); k-- > 0;) {
      const int d = joint.domain(outcome[k]);
      env[outcome[k]] = static_cast<int>(rest % static_cast<std::size_t>(d));
      rest /= static_cast<std::size_t>(d);
    }
    out[cell] = evaluator.eval(e, env);
  }
  return out;
}

// ---------------------------------------------------------------------------
// ID algorithm

namespace {

struct HedgeFound {
  std::string witness;
};

// Current distribution of a recursive call: either the observational joint
// marginalized to `vars`, or an arbitrary expression over `vars`.
struct Distribution {
  bool observational = true;
  Estimand expr;
  NodeSet vars;
};

class IdSolver {
 public:
  explicit IdSolver(CausalGraph projected) : full_(std::move(projected)) {
    const auto order = full_.topological_order();
    for (std::size_t i = 0; i < order.size(); ++i) rank_[order[i]] = i;
  }

  Estimand solve(const NodeSet& y, const NodeSet& x) {
    Distribution p{true, {}, full_.node_names()};
    Estimand raw = id(y, x, p, full_);
    return canonical(raw, {});
  }

  std::size_t rank(const std::string& v) const { return rank_.at(v); }

 private:
  Estimand id(const NodeSet& y, const NodeSet& x, const Distribution& p, const CausalGraph& g) {
    const NodeSet v = g.node_names();

    // 1
    if (x.empty()) return marginalize(p, set_minus(v, y), y);

    // 2
    const NodeSet an_y = ancestors(g, y);
    if (an_y != v) {
      Distribution reduced = p.observational ? Distribution{true, {}, an_y}
                                             : Distribution{false, Estimand::sum(as_vector(set_minus(v, an_y)), p.expr), an_y};
      return id(y, set_intersect(x, an_y), reduced, induced_subgraph(g, an_y));
    }

    // 3
    const NodeSet w = set_minus(set_minus(v, x), ancestors(mutilate(g, x, {}), y));
    if (!w.empty()) return id(y, set_union(x, w), p, g);

    // 4
    const auto components = c_components(induced_subgraph(g, set_minus(v, x)));
    if (components.size() > 1) {
      std::vector<Estimand> factors;
      for (const auto& s : components) factors.push_back(id(s, set_minus(v, s), p, g));
      return Estimand::sum(as_vector(set_minus(v, set_union(y, x))), Estimand::product(std::move(factors)));
    }
    const NodeSet& s = components.front();

    // 5
    const auto whole = c_components(g);
    if (whole.size() == 1) {
      throw HedgeFound{"hedge: c-component {" + join(as_vector(v), ",") + "} with root set {" +
                       join(as_vector(s), ",") + "} after removing do-set {" + join(as_vector(x), ",") + "}"};
    }

    // 6
    if (std::find(whole.begin(), whole.end(), s) != whole.end()) {
      return Estimand::sum(as_vector(set_minus(s, y)), chain_factors(p, s, v));
    }

    // 7
    for (const auto& bigger : whole) {
      if (std::includes(bigger.begin(), bigger.end(), s.begin(), s.end())) {
        Distribution restricted{false, chain_factors(p, bigger, v), bigger};
        return id(y, set_intersect(x, bigger), restricted, induced_subgraph(g, bigger));
      }
    }
    throw Error("ID algorithm reached an impossible state");
  }

  Estimand marginalize(const Distribution& p, const NodeSet& out, const NodeSet& keep) const {
    if (p.observational) return Estimand::marginal(ordered(keep));
    return Estimand::sum(as_vector(out), p.expr);
  }

  // Π_{v in members} P(v | predecessors of v within `vertices`), in topological order.
  Estimand chain_factors(const Distribution& p, const NodeSet& members, const NodeSet& vertices) const {
    std::vector<Estimand> factors;
    for (const auto& m : ordered(members)) {
      NodeSet preds;
      for (const auto& u : vertices)
        if (rank(u) < rank(m)) preds.insert(u);
      factors.push_back(conditional(p, m, preds));
    }
    return Estimand::product(std::move(factors));
  }

  Estimand conditional(const Distribution& p, const std::string& target, NodeSet given) const {
    if (p.observational) {
      // Drop conditioning variables that are d-separated from the target given
      // the rest. Candidates are tried latest-first.
      std::vector<std::string> candidates = ordered(given);
      std::reverse(candidates.begin(), candidates.end());
      for (const auto& w : candidates) {
        NodeSet rest = given;
        rest.erase(w);
        if (d_separated(full_, {target}, {w}, rest)) given = std::move(rest);
      }
      return Estimand::cond({target}, as_vector(given));
    }
    NodeSet with_target = given;
    with_target.insert(target);
    return Estimand::quotient(Estimand::sum(as_vector(set_minus(p.vars, with_target)), p.expr),
                              Estimand::sum(as_vector(set_minus(p.vars, given)), p.expr));
  }

  std::vector<std::string> ordered(const NodeSet& s) const {
    std::vector<std::string> out(s.begin(), s.end());
    std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) { return rank(a) < rank(b); });
    return out;
  }

  // Highest topological rank of any probability target in the factor.
  std::size_t lead(const Estimand& e) const {
    std::size_t best = 0;
    for (const auto& v : e.variables())
      if (e.kind() != Estimand::Kind::Sum) best = std::max(best, rank(v));
    for (const auto& c : e.children()) best = std::max(best, lead(c));
    return best;
  }

  Estimand canonical(const Estimand& e, const NodeSet& bound) const {
    using Kind = Estimand::Kind;
    switch (e.kind()) {
      case Kind::Sum: {
        NodeSet inner = bound;
        inner.insert(e.variables().begin(), e.variables().end());
        return Estimand::sum(e.variables(), canonical(e.children().front(), inner));
      }
      case Kind::Product: {
        std::vector<std::pair<std::pair<std::size_t, std::string>, Estimand>> keyed;
        for (const auto& f : e.children()) {
          Estimand c = canonical(f, bound);
          keyed.push_back({{lead(c), estimand_to_text(c)}, std::move(c)});
        }
        std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
          if (a.first.first != b.first.first) return a.first.first > b.first.first;
          return a.first.second < b.first.second;
        });
        std::vector<Estimand> factors;
        for (auto& k : keyed) factors.push_back(std::move(k.second));
        return Estimand::product(std::move(factors));
      }
      case Kind::Cond: {
        std::vector<std::string> given = e.given();
        std::sort(given.begin(), given.end(), [&](const auto& a, const auto& b) {
          const bool a_bound = bound.count(a) > 0;
          const bool b_bound = bound.count(b) > 0;
          if (a_bound != b_bound) return !a_bound;
          return a < b;
        });
        return Estimand::cond(ordered({e.variables().begin(), e.variables().end()}), std::move(given));
      }
      case Kind::Marginal:
        return Estimand::marginal(ordered({e.variables().begin(), e.variables().end()}));
      case Kind::Quotient:
        return Estimand::quotient(canonical(e.children()[0], bound), canonical(e.children()[1], bound));
      case Kind::Indicator:
        return e;
    }
    return e;
  }

  CausalGraph full_;
  std::map<std::string, std::size_t> rank_;
};

}  // namespace

IdentifyOutcome identify(const CausalGraph& g, const NodeSet& outcome, const NodeSet& intervention) {
  for (const auto& v : set_union(outcome, intervention)) {
    if (!g.is_observed(v)) throw InvalidArgument("'" + v + "' is latent");
  }
  if (!set_intersect(outcome, intervention).empty()) throw SetOverlapError("outcome and intervention overlap");
  if (outcome.empty()) throw InvalidArgument("empty outcome set");
  IdSolver solver(project_latents(g));
  try {
    return Identified{solver.solve(outcome, intervention)};
  } catch (const HedgeFound& hedge) {
    return Unidentifiable{hedge.witness};
  }
}

bool rule_applicable(const CausalGraph& g, DoRule rule, const NodeSet& x, const NodeSet& y, const NodeSet& z,
                     const NodeSet& w) {
  const std::vector<const NodeSet*> sets{&x, &y, &z, &w};
  for (std::size_t i = 0; i < sets.size(); ++i)
    for (std::size_t j = i + 1; j < sets.size(); ++j)
      if (!set_intersect(*sets[i], *sets[j]).empty()) throw SetOverlapError("do-calculus sets must be disjoint");
  const NodeSet given = set_union(y, w);
  switch (rule) {
    case DoRule::Observation:
      return d_separated(mutilate(g, y, {}), x, z, given);
    case DoRule::ActionObservation:
      return d_separated(mutilate(g, y, z), x, z, given);
    case DoRule::Action: {
      const NodeSet z_w = set_minus(z, ancestors(mutilate(g, y, {}), w));
      return d_separated(mutilate(g, set_union(y, z_w), {}), x, z, given);
    }
  }
  throw InvalidArgument("unknown do-calculus rule");
}

}  // namespace causal_boot
