#include "proxid/expr.hpp"

#include <cstdio>
#include <functional>
#include <sstream>
#include <unordered_map>

#include "proxid/errors.hpp"

namespace proxid::expr {

namespace {

Factor compute(const Node& n, const std::vector<const Factor*>& in, const Factor* obs,
               BridgeSolution* diag = nullptr) {
  switch (n.op) {
    case Op::Observed: {
      if (!obs) throw Error("observed factor evaluated without data");
      Factor joint = obs->marginal(set_union(n.vars, n.given));
      if (n.given.empty()) return joint;
      return divide(joint, obs->marginal(n.given));
    }
    case Op::Constant:
      return Factor::constant(n.shape, n.value);
    case Op::Sum:
      return in[0]->sum_out(n.vars);
    case Op::Product:
      return *in[0] * *in[1];
    case Op::Ratio:
      return divide(*in[0], *in[1]);
    case Op::Relabel:
      return in[0]->relabel(n.renames);
    case Op::Bridge: {
      BridgeProblem p{n.kind, *in[0], *in[1], n.rows, n.cols, n.col_origin};
      BridgeSolution s = solve_bridge(p, n.tol);
      Factor v = s.values;
      if (diag) *diag = std::move(s);
      return v;
    }
  }
  throw Error("unknown expression node");
}

Term finish(std::shared_ptr<Node> n, const Factor* obs = nullptr,
            BridgeSolution* diag = nullptr, const std::vector<const Term*>& kids = {}) {
  std::vector<const Factor*> in;
  bool ready = n->op != Op::Observed || obs;
  for (auto* k : kids) {
    if (!k->value) ready = false;
    else in.push_back(&*k->value);
  }
  Term t{n, std::nullopt};
  if (ready) t.value = compute(*n, in, obs, diag);
  return t;
}

std::string join(const VertexSet& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? " " : "") + s[i];
  return "(" + out + ")";
}

}  // namespace

Term observed(const VertexSet& vars, const VertexSet& given, const Factor* obs) {
  auto n = std::make_shared<Node>();
  n->op = Op::Observed;
  n->vars = vars;
  n->given = given;
  n->scope = set_union(vars, given);
  return finish(n, obs);
}

Term constant(std::vector<Var> shape, double value) {
  auto n = std::make_shared<Node>();
  n->op = Op::Constant;
  for (auto& v : shape) n->scope.push_back(v.name);
  n->shape = std::move(shape);
  n->value = value;
  return finish(n);
}

Term sum(const Term& t, const VertexSet& bound) {
  VertexSet b = set_intersect(bound, t.scope());
  if (b.empty()) return t;
  auto n = std::make_shared<Node>();
  n->op = Op::Sum;
  n->children = {t.node};
  n->vars = b;
  n->scope = set_minus(t.scope(), b);
  return finish(n, nullptr, nullptr, {&t});
}

Term product(const Term& a, const Term& b) {
  auto n = std::make_shared<Node>();
  n->op = Op::Product;
  n->children = {a.node, b.node};
  n->scope = set_union(a.scope(), b.scope());
  return finish(n, nullptr, nullptr, {&a, &b});
}

Term ratio(const Term& num, const Term& den) {
  auto n = std::make_shared<Node>();
  n->op = Op::Ratio;
  n->children = {num.node, den.node};
  n->scope = set_union(num.scope(), den.scope());
  return finish(n, nullptr, nullptr, {&num, &den});
}

Term relabel(const Term& t, const std::map<std::string, std::string>& renames) {
  auto n = std::make_shared<Node>();
  n->op = Op::Relabel;
  n->children = {t.node};
  n->renames = renames;
  for (auto& v : t.scope()) {
    auto it = renames.find(v);
    n->scope.push_back(it == renames.end() ? v : it->second);
  }
  return finish(n, nullptr, nullptr, {&t});
}

Term bridge(BridgeKind kind, const VertexSet& rows, const VertexSet& cols,
            const std::map<std::string, std::string>& col_origin, const Term& op,
            const Term& rhs, double tol, BridgeSolution* diag) {
  auto n = std::make_shared<Node>();
  n->op = Op::Bridge;
  n->children = {op.node, rhs.node};
  n->kind = kind;
  n->rows = rows;
  n->cols = cols;
  n->col_origin = col_origin;
  n->tol = tol;
  n->scope = set_union(set_minus(rhs.scope(), rows), set_minus(op.scope(), rows));
  return finish(n, nullptr, diag, {&op, &rhs});
}

Factor evaluate(const NodePtr& root, const Factor& obs) {
  std::unordered_map<const Node*, Factor> memo;
  std::function<const Factor&(const NodePtr&)> go = [&](const NodePtr& n) -> const Factor& {
    auto it = memo.find(n.get());
    if (it != memo.end()) return it->second;
    std::vector<const Factor*> in;
    for (auto& c : n->children) in.push_back(&go(c));
    return memo.emplace(n.get(), compute(*n, in, &obs)).first->second;
  };
  return go(root);
}

std::string render(const NodePtr& root) {
  std::unordered_map<const Node*, int> id;
  std::ostringstream os;
  std::function<int(const NodePtr&)> go = [&](const NodePtr& n) -> int {
    auto it = id.find(n.get());
    if (it != id.end()) return it->second;
    std::vector<int> kids;
    for (auto& c : n->children) kids.push_back(go(c));
    int k = static_cast<int>(id.size());
    id[n.get()] = k;
    os << "%" << k << " = ";
    switch (n->op) {
      case Op::Observed:
        os << "(p " << join(n->vars);
        if (!n->given.empty()) os << " " << join(n->given);
        os << ")";
        break;
      case Op::Constant: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", n->value);
        os << "(const " << buf << " " << join(n->scope) << ")";
        break;
      }
      case Op::Sum:
        os << "(sum " << join(n->vars) << " %" << kids[0] << ")";
        break;
      case Op::Product:
        os << "(* %" << kids[0] << " %" << kids[1] << ")";
        break;
      case Op::Ratio:
        os << "(/ %" << kids[0] << " %" << kids[1] << ")";
        break;
      case Op::Relabel: {
        os << "(relabel (";
        bool first = true;
        for (auto& [from, to] : n->renames) {
          os << (first ? "" : " ") << from << "->" << to;
          first = false;
        }
        os << ") %" << kids[0] << ")";
        break;
      }
      case Op::Bridge:
        os << "(bridge " << bridge_kind_name(n->kind) << " (rows " << join(n->rows).substr(1)
           << " (cols " << join(n->cols).substr(1) << " %" << kids[0] << " %" << kids[1] << ")";
        break;
    }
    os << "\n";
    return k;
  };
  int r = go(root);
  os << "result %" << r << "\n";
  return os.str();
}

std::size_t node_count(const NodePtr& root) {
  std::unordered_map<const Node*, bool> seen;
  std::function<void(const NodePtr&)> go = [&](const NodePtr& n) {
    if (seen.emplace(n.get(), true).second)
      for (auto& c : n->children) go(c);
  };
  go(root);
  return seen.size();
}

}  // namespace proxid::expr
