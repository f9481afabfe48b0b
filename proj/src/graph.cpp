#include "causal_boot/graph.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <numeric>
#include <queue>
#include <sstream>

#include "causal_boot/errors.hpp"

namespace causal_boot {

namespace {

using IndexEdge = std::pair<std::size_t, std::size_t>;

std::vector<std::vector<std::size_t>> parent_lists(std::size_t n, const std::set<IndexEdge>& directed) {
  std::vector<std::vector<std::size_t>> parents(n);
  for (const auto& [from, to] : directed) parents[to].push_back(from);
  return parents;
}

std::vector<std::vector<std::size_t>> child_lists(std::size_t n, const std::set<IndexEdge>& directed) {
  std::vector<std::vector<std::size_t>> children(n);
  for (const auto& [from, to] : directed) children[from].push_back(to);
  return children;
}

// Returns an empty vector when the graph has a cycle.
std::vector<std::size_t> kahn_order(std::size_t n, const std::set<IndexEdge>& directed) {
  std::vector<std::size_t> indegree(n, 0);
  for (const auto& e : directed) ++indegree[e.second];
  const auto children = child_lists(n, directed);
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < n; ++i)
    if (indegree[i] == 0) ready.push(i);
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    const std::size_t v = ready.top();
    ready.pop();
    order.push_back(v);
    for (std::size_t c : children[v])
      if (--indegree[c] == 0) ready.push(c);
  }
  if (order.size() != n) order.clear();
  return order;
}

std::vector<bool> membership(const CausalGraph& g, const NodeSet& set) {
  std::vector<bool> in(g.size(), false);
  for (const auto& name : set) in[g.index_of(name)] = true;
  return in;
}

// Marks every node reachable from the seeds by following `next`.
std::vector<bool> closure(std::vector<bool> seeds, const std::vector<std::vector<std::size_t>>& next) {
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < seeds.size(); ++i)
    if (seeds[i]) stack.push_back(i);
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t w : next[v]) {
      if (!seeds[w]) {
        seeds[w] = true;
        stack.push_back(w);
      }
    }
  }
  return seeds;
}

NodeSet names_of(const CausalGraph& g, const std::vector<bool>& flags) {
  NodeSet out;
  for (std::size_t i = 0; i < flags.size(); ++i)
    if (flags[i]) out.insert(g.node(i).name);
  return out;
}

}  // namespace

CausalGraph::CausalGraph(std::vector<Node> nodes, const std::vector<Edge>& directed,
                         const std::vector<Edge>& bidirected)
    : nodes_(std::move(nodes)) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].name.empty()) throw InvalidArgument("empty node name");
    for (std::size_t j = 0; j < i; ++j)
      if (nodes_[j].name == nodes_[i].name) throw InvalidArgument("duplicate node '" + nodes_[i].name + "'");
  }
  for (const auto& [from, to] : directed) {
    const std::size_t a = index_of(from);
    const std::size_t b = index_of(to);
    if (a == b) throw InvalidArgument("self-loop on '" + from + "'");
    directed_.emplace(a, b);
  }
  for (const auto& [x, y] : bidirected) {
    const std::size_t a = index_of(x);
    const std::size_t b = index_of(y);
    if (a == b) throw InvalidArgument("bidirected self-loop on '" + x + "'");
    if (!nodes_[a].observed || !nodes_[b].observed)
      throw InvalidArgument("bidirected edge " + x + "<->" + y + " touches a latent node");
    bidirected_.emplace(std::min(a, b), std::max(a, b));
  }
  if (kahn_order(nodes_.size(), directed_).size() != nodes_.size() && !nodes_.empty()) {
    throw CycleError("directed edges contain a cycle");
  }
}

bool CausalGraph::has_node(std::string_view name) const {
  return std::any_of(nodes_.begin(), nodes_.end(), [&](const Node& n) { return n.name == name; });
}

std::size_t CausalGraph::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].name == name) return i;
  throw UnknownNodeError(std::string(name));
}

NodeSet CausalGraph::node_names() const {
  NodeSet out;
  for (const auto& n : nodes_) out.insert(n.name);
  return out;
}

NodeSet CausalGraph::observed_names() const {
  NodeSet out;
  for (const auto& n : nodes_)
    if (n.observed) out.insert(n.name);
  return out;
}

std::vector<Edge> CausalGraph::directed_edges() const {
  std::vector<Edge> out;
  for (const auto& [a, b] : directed_) out.emplace_back(nodes_[a].name, nodes_[b].name);
  return out;
}

std::vector<Edge> CausalGraph::bidirected_edges() const {
  std::vector<Edge> out;
  for (const auto& [a, b] : bidirected_) out.emplace_back(nodes_[a].name, nodes_[b].name);
  return out;
}

bool CausalGraph::has_directed(std::string_view from, std::string_view to) const {
  return directed_.count({index_of(from), index_of(to)}) > 0;
}

bool CausalGraph::has_bidirected(std::string_view a, std::string_view b) const {
  const std::size_t i = index_of(a);
  const std::size_t j = index_of(b);
  return bidirected_.count({std::min(i, j), std::max(i, j)}) > 0;
}

NodeSet CausalGraph::parents(std::string_view name) const {
  const std::size_t v = index_of(name);
  NodeSet out;
  for (const auto& [a, b] : directed_)
    if (b == v) out.insert(nodes_[a].name);
  return out;
}

NodeSet CausalGraph::children(std::string_view name) const {
  const std::size_t v = index_of(name);
  NodeSet out;
  for (const auto& [a, b] : directed_)
    if (a == v) out.insert(nodes_[b].name);
  return out;
}

std::vector<std::string> CausalGraph::topological_order() const {
  std::vector<std::string> out;
  for (std::size_t i : kahn_order(nodes_.size(), directed_)) out.push_back(nodes_[i].name);
  return out;
}

// ---------------------------------------------------------------------------
// DSL

namespace {

class DslParser {
 public:
  explicit DslParser(std::string_view text) : text_(text) {}

  CausalGraph parse() {
    while (true) {
      skip_blank();
      if (at_end()) break;
      if (peek() == ';' || peek() == '\n') {
        advance();
        continue;
      }
      statement();
    }
    return CausalGraph(nodes_, directed_, bidirected_);
  }

 private:
  struct Ident {
    std::string name;
    std::size_t line, column;
  };

  void statement() {
    Ident first = identifier();
    skip_blank();
    if (first.name == "latent" && !at_end() && is_ident_start(peek())) {
      Ident name = identifier();
      declare(name.name, false);
      end_of_statement();
      return;
    }
    declare(first.name, true);
    Ident prev = first;
    while (true) {
      skip_blank();
      if (at_end() || peek() == ';' || peek() == '\n') break;
      bool bidirected = false;
      if (consume("<->")) {
        bidirected = true;
      } else if (!consume("->")) {
        error("expected '->', '<->', ';' or newline");
      }
      skip_blank();
      Ident next = identifier();
      declare(next.name, true);
      if (bidirected) {
        bidirected_.emplace_back(prev.name, next.name);
      } else {
        directed_.emplace_back(prev.name, next.name);
      }
      prev = next;
    }
    end_of_statement();
  }

  void end_of_statement() {
    skip_blank();
    if (at_end()) return;
    if (peek() == ';' || peek() == '\n') {
      advance();
      return;
    }
    error("expected ';' or newline");
  }

  // Edges declare their endpoints; `latent` may also mark an existing node.
  void declare(const std::string& name, bool observed) {
    for (auto& n : nodes_) {
      if (n.name == name) {
        if (!observed) n.observed = false;
        return;
      }
    }
    nodes_.push_back({name, observed});
  }

  Ident identifier() {
    if (at_end() || !is_ident_start(peek())) error("expected identifier");
    Ident id{{}, line_, column_};
    while (!at_end() && is_ident_char(peek())) id.name.push_back(advance());
    return id;
  }

  static bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  // Skips spaces, tabs, carriage returns and comments; stops at newlines.
  void skip_blank() {
    while (!at_end()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r') {
        advance();
      } else if (c == '#') {
        while (!at_end() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  bool consume(std::string_view token) {
    if (text_.substr(pos_, token.size()) != token) return false;
    for (std::size_t i = 0; i < token.size(); ++i) advance();
    return true;
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  char advance() {
    const char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    return c;
  }

  [[noreturn]] void error(const std::string& message) const { throw ParseError(message, line_, column_); }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
  std::vector<Node> nodes_;
  std::vector<Edge> directed_;
  std::vector<Edge> bidirected_;
};

}  // namespace

CausalGraph parse_graph(std::string_view text) { return DslParser(text).parse(); }

std::string to_dsl(const CausalGraph& g) {
  std::ostringstream out;
  for (const auto& n : g.nodes()) {
    if (!n.observed) out << "latent ";
    out << n.name << ";\n";
  }
  for (const auto& [a, b] : g.directed_edges()) out << a << " -> " << b << ";\n";
  for (const auto& [a, b] : g.bidirected_edges()) out << a << " <-> " << b << ";\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Surgery and reachability

CausalGraph mutilate(const CausalGraph& g, const NodeSet& bar, const NodeSet& underline) {
  const auto barred = membership(g, bar);
  const auto underlined = membership(g, underline);
  std::vector<Edge> directed;
  for (const auto& [a, b] : g.directed_index()) {
    if (barred[b] || underlined[a]) continue;
    directed.emplace_back(g.node(a).name, g.node(b).name);
  }
  std::vector<Edge> bidirected;
  for (const auto& [a, b] : g.bidirected_index()) {
    if (barred[a] || barred[b]) continue;
    bidirected.emplace_back(g.node(a).name, g.node(b).name);
  }
  return CausalGraph(g.nodes(), directed, bidirected);
}

NodeSet ancestors(const CausalGraph& g, const NodeSet& w) {
  return names_of(g, closure(membership(g, w), parent_lists(g.size(), g.directed_index())));
}

NodeSet descendants(const CausalGraph& g, const NodeSet& w) {
  return names_of(g, closure(membership(g, w), child_lists(g.size(), g.directed_index())));
}

bool d_separated(const CausalGraph& g, const NodeSet& a, const NodeSet& b, const NodeSet& cond) {
  auto overlap = [](const NodeSet& s, const NodeSet& t) {
    return std::any_of(s.begin(), s.end(), [&](const std::string& v) { return t.count(v) > 0; });
  };
  if (overlap(a, b) || overlap(a, cond) || overlap(b, cond))
    throw SetOverlapError("d-separation sets must be pairwise disjoint");

  // Expanded DAG: one extra latent parent per bidirected edge.
  const std::size_t n = g.size();
  std::set<IndexEdge> edges = g.directed_index();
  std::size_t next = n;
  for (const auto& [x, y] : g.bidirected_index()) {
    edges.emplace(next, x);
    edges.emplace(next, y);
    ++next;
  }
  const std::size_t total = next;
  const auto parents = parent_lists(total, edges);
  const auto children = child_lists(total, edges);

  std::vector<bool> in_cond(total, false), in_b(total, false), in_a(total, false);
  for (const auto& v : cond) in_cond[g.index_of(v)] = true;
  for (const auto& v : b) in_b[g.index_of(v)] = true;
  for (const auto& v : a) in_a[g.index_of(v)] = true;
  const std::vector<bool> cond_ancestor = closure(in_cond, parents);

  // Reachability over (node, direction): direction 0 = arrived from a child
  // (travelling up), 1 = arrived from a parent (travelling down).
  std::vector<std::array<bool, 2>> visited(total, {false, false});
  std::vector<std::pair<std::size_t, int>> stack;
  for (std::size_t i = 0; i < n; ++i)
    if (in_a[i]) stack.emplace_back(i, 0);
  while (!stack.empty()) {
    const auto [v, dir] = stack.back();
    stack.pop_back();
    if (visited[v][dir]) continue;
    visited[v][dir] = true;
    if (!in_cond[v] && in_b[v]) return false;
    if (dir == 0) {
      if (in_cond[v]) continue;
      for (std::size_t p : parents[v]) stack.emplace_back(p, 0);
      for (std::size_t c : children[v]) stack.emplace_back(c, 1);
    } else {
      if (!in_cond[v])
        for (std::size_t c : children[v]) stack.emplace_back(c, 1);
      if (cond_ancestor[v])
        for (std::size_t p : parents[v]) stack.emplace_back(p, 0);
    }
  }
  return true;
}

CausalGraph induced_subgraph(const CausalGraph& g, const NodeSet& keep) {
  const auto kept = membership(g, keep);
  std::vector<Node> nodes;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (kept[i]) nodes.push_back(g.node(i));
  std::vector<Edge> directed, bidirected;
  for (const auto& [a, b] : g.directed_index())
    if (kept[a] && kept[b]) directed.emplace_back(g.node(a).name, g.node(b).name);
  for (const auto& [a, b] : g.bidirected_index())
    if (kept[a] && kept[b]) bidirected.emplace_back(g.node(a).name, g.node(b).name);
  return CausalGraph(std::move(nodes), directed, bidirected);
}

CausalGraph project_latents(const CausalGraph& g) {
  const std::size_t n = g.size();
  const auto children = child_lists(n, g.directed_index());
  // For each node, the observed nodes reachable by a directed path whose
  // intermediate nodes are all latent.
  auto observed_reach = [&](std::size_t start) {
    std::vector<bool> seen(n, false), hit(n, false);
    std::vector<std::size_t> stack{start};
    seen[start] = true;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t c : children[v]) {
        if (seen[c]) continue;
        seen[c] = true;
        if (g.node(c).observed) {
          hit[c] = true;
        } else {
          stack.push_back(c);
        }
      }
    }
    return hit;
  };

  std::vector<Node> nodes;
  for (const auto& node : g.nodes())
    if (node.observed) nodes.push_back(node);
  std::vector<Edge> directed, bidirected = g.bidirected_edges();
  for (std::size_t v = 0; v < n; ++v) {
    const auto hit = observed_reach(v);
    if (g.node(v).observed) {
      for (std::size_t w = 0; w < n; ++w)
        if (hit[w]) directed.emplace_back(g.node(v).name, g.node(w).name);
    } else {
      for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = x + 1; y < n; ++y)
          if (hit[x] && hit[y]) bidirected.emplace_back(g.node(x).name, g.node(y).name);
    }
  }
  return CausalGraph(std::move(nodes), directed, bidirected);
}

std::vector<NodeSet> c_components(const CausalGraph& g) {
  const std::size_t n = g.size();
  std::vector<std::size_t> root(n);
  std::iota(root.begin(), root.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (root[v] != v) v = root[v] = root[root[v]];
    return v;
  };
  for (const auto& [a, b] : g.bidirected_index()) {
    const std::size_t ra = find(a), rb = find(b);
    root[std::max(ra, rb)] = std::min(ra, rb);
  }
  std::vector<NodeSet> components;
  std::vector<std::size_t> slot(n, n);
  for (std::size_t v = 0; v < n; ++v) {
    const std::size_t r = find(v);
    if (slot[r] == n) {
      slot[r] = components.size();
      components.emplace_back();
    }
    components[slot[r]].insert(g.node(v).name);
  }
  return components;
}

// ---------------------------------------------------------------------------
// Scenario catalog

CausalGraph scenario_graph(ScenarioId id) {
  switch (id) {
    case ScenarioId::ObservedConf:
      return parse_graph("U -> Y; U -> X; Y -> X");
    case ScenarioId::ObservedConfMediator:
      return parse_graph("U -> Y; U -> X; Y -> Z; Z -> X");
    case ScenarioId::PartialConfMediator:
      return parse_graph("U -> Y; U -> X; Y -> Z; Z -> X; Y <-> X");
    case ScenarioId::UnobservedConfMediator:
      return parse_graph("Y -> Z; Z -> X; Y <-> X");
    case ScenarioId::BiasedCare:
      return parse_graph("U -> Y; U -> X; Y -> X; Y -> D; U -> D");
  }
  throw InvalidArgument("unknown scenario");
}

char scenario_letter(ScenarioId id) { return static_cast<char>('a' + static_cast<int>(id)); }

std::string_view scenario_name(ScenarioId id) {
  switch (id) {
    case ScenarioId::ObservedConf:
      return "ObservedConf";
    case ScenarioId::ObservedConfMediator:
      return "ObservedConfMediator";
    case ScenarioId::PartialConfMediator:
      return "PartialConfMediator";
    case ScenarioId::UnobservedConfMediator:
      return "UnobservedConfMediator";
    case ScenarioId::BiasedCare:
      return "BiasedCare";
  }
  return "?";
}

ScenarioId parse_scenario(std::string_view text) {
  for (ScenarioId id : kAllScenarios) {
    if (text.size() == 1 && std::tolower(static_cast<unsigned char>(text[0])) == scenario_letter(id)) return id;
    if (text == scenario_name(id)) return id;
  }
  throw InvalidArgument("unknown scenario '" + std::string(text) + "'");
}

}  // namespace causal_boot
