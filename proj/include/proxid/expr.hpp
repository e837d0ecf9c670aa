#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "proxid/bridge.hpp"
#include "proxid/factor.hpp"
#include "proxid/graph.hpp"

// Identifying functionals as shared expression DAGs. Every Term pairs a node
// with its value on the observational distribution it was built against; in
// graph-only use the value is absent and only the structure is kept.
namespace proxid::expr {

enum class Op { Observed, Constant, Sum, Product, Ratio, Relabel, Bridge };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  Op op = Op::Constant;
  std::vector<NodePtr> children;
  VertexSet scope;  // free variables of the node's value

  VertexSet vars;   // Observed: joint variables; Sum: bound variables
  VertexSet given;  // Observed: conditioning set
  std::vector<Var> shape;  // Constant
  double value = 1.0;      // Constant
  std::map<std::string, std::string> renames;  // Relabel

  // Bridge: children are {operator, right-hand side}.
  BridgeKind kind = BridgeKind::Outcome;
  VertexSet rows, cols;
  std::map<std::string, std::string> col_origin;
  double tol = kBridgeTol;
};

struct Term {
  NodePtr node;
  std::optional<Factor> value;

  const VertexSet& scope() const { return node->scope; }
};

// p(vars | given) read off the observational table `obs` (null: no value).
Term observed(const VertexSet& vars, const VertexSet& given, const Factor* obs);
Term constant(std::vector<Var> shape, double value);
Term sum(const Term& t, const VertexSet& bound);  // identity when bound is empty
Term product(const Term& a, const Term& b);
Term ratio(const Term& num, const Term& den);
Term relabel(const Term& t, const std::map<std::string, std::string>& renames);

// Solves the bridge equation when both inputs carry values; the solver's
// diagnostics are copied to `diag` when given.
Term bridge(BridgeKind kind, const VertexSet& rows, const VertexSet& cols,
            const std::map<std::string, std::string>& col_origin, const Term& op,
            const Term& rhs, double tol = kBridgeTol, BridgeSolution* diag = nullptr);

// Evaluates the DAG against an observational table, sharing repeated nodes.
Factor evaluate(const NodePtr& root, const Factor& obs);

// Numbered s-expression listing, one node per line, ending in "result %k".
std::string render(const NodePtr& root);

std::size_t node_count(const NodePtr& root);

}  // namespace proxid::expr
