#ifndef CAUSAL_BOOT_GRAPH_HPP
#define CAUSAL_BOOT_GRAPH_HPP

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace causal_boot {

using NodeSet = std::set<std::string>;
using Edge = std::pair<std::string, std::string>;

struct Node {
  std::string name;
  bool observed = true;

  bool operator==(const Node&) const = default;
};

/// Acyclic causal graph with optional latent nodes and bidirected edges.
///
/// A bidirected edge A<->B stands for an unnamed hidden common cause of A and B.
/// Directed edges are stored as (tail, head) index pairs; bidirected edges are
/// stored with the smaller node index first. Node order is declaration order and
/// is part of the graph's identity. Values are immutable once constructed.
class CausalGraph {
 public:
  CausalGraph() = default;

  /// Validates and builds a graph. Throws UnknownNodeError for an edge endpoint
  /// that is not declared, CycleError for a directed cycle, and InvalidArgument
  /// for self-loops, duplicate nodes or bidirected edges touching a latent node.
  CausalGraph(std::vector<Node> nodes, const std::vector<Edge>& directed, const std::vector<Edge>& bidirected);

  std::size_t size() const { return nodes_.size(); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(std::size_t i) const { return nodes_.at(i); }

  bool has_node(std::string_view name) const;
  std::size_t index_of(std::string_view name) const;
  bool is_observed(std::string_view name) const { return nodes_[index_of(name)].observed; }

  NodeSet node_names() const;
  NodeSet observed_names() const;

  // Sorted by (tail, head) declaration index.
  std::vector<Edge> directed_edges() const;
  std::vector<Edge> bidirected_edges() const;
  const std::set<std::pair<std::size_t, std::size_t>>& directed_index() const { return directed_; }
  const std::set<std::pair<std::size_t, std::size_t>>& bidirected_index() const { return bidirected_; }
  std::size_t edge_count() const { return directed_.size() + bidirected_.size(); }

  bool has_directed(std::string_view from, std::string_view to) const;
  bool has_bidirected(std::string_view a, std::string_view b) const;

  NodeSet parents(std::string_view name) const;
  NodeSet children(std::string_view name) const;

  // Kahn's algorithm, ties broken by declaration order.
  std::vector<std::string> topological_order() const;

  bool operator==(const CausalGraph& other) const = default;

 private:
  std::vector<Node> nodes_;
  std::set<std::pair<std::size_t, std::size_t>> directed_;
  std::set<std::pair<std::size_t, std::size_t>> bidirected_;
};

/// Parses the graph DSL:
///
///   # comment
///   latent H;          declares a latent node
///   A;                 declares an observed node
///   A -> B -> C;       directed edges (chains allowed)
///   A <-> B;           bidirected edge
///
/// Statements are separated by ';' or newlines. Edges declare their endpoints
/// as observed nodes when not declared earlier. Throws ParseError, CycleError.
CausalGraph parse_graph(std::string_view text);

/// Renders a graph as DSL text that parses back to an equal graph.
std::string to_dsl(const CausalGraph& g);

/// Removes incoming edges (directed and bidirected) of `bar` nodes and outgoing
/// directed edges of `underline` nodes.
CausalGraph mutilate(const CausalGraph& g, const NodeSet& bar, const NodeSet& underline);

/// Nodes with a directed path into `w`, including `w` itself.
NodeSet ancestors(const CausalGraph& g, const NodeSet& w);
NodeSet descendants(const CausalGraph& g, const NodeSet& w);

/// Standard d-separation of `a` and `b` given `cond`, with every bidirected edge
/// read as a fresh latent parent of both endpoints. The three sets must be
/// pairwise disjoint (SetOverlapError otherwise).
bool d_separated(const CausalGraph& g, const NodeSet& a, const NodeSet& b, const NodeSet& cond);

/// Subgraph on `keep`, retaining edges whose endpoints are both kept.
CausalGraph induced_subgraph(const CausalGraph& g, const NodeSet& keep);

/// Latent projection onto the observed nodes: A->B when a directed path from A
/// to B passes only through latent nodes, A<->B when both are reachable from a
/// common latent node through latent-only paths (or were already bidirected).
CausalGraph project_latents(const CausalGraph& g);

/// Connected components under bidirected edges, each sorted by declaration
/// order, components ordered by their first member.
std::vector<NodeSet> c_components(const CausalGraph& g);

enum class ScenarioId {
  ObservedConf,
  ObservedConfMediator,
  PartialConfMediator,
  UnobservedConfMediator,
  BiasedCare,
};

inline constexpr ScenarioId kAllScenarios[] = {ScenarioId::ObservedConf, ScenarioId::ObservedConfMediator,
                                               ScenarioId::PartialConfMediator, ScenarioId::UnobservedConfMediator,
                                               ScenarioId::BiasedCare};

/// Canonical acquisition graph of each scenario over nodes U, Y, Z, D, X.
CausalGraph scenario_graph(ScenarioId id);

// Single-letter code a..e.
char scenario_letter(ScenarioId id);
std::string_view scenario_name(ScenarioId id);
/// Accepts the letter code or the enumerator name.
ScenarioId parse_scenario(std::string_view text);

}  // namespace causal_boot

#endif  // CAUSAL_BOOT_GRAPH_HPP
