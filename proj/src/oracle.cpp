#include "proxid/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "proxid/errors.hpp"

namespace proxid {

namespace {

// Exponential(1) draw from raw 64-bit output, so streams are reproducible
// across standard library implementations.
double exp1(std::mt19937_64& rng) {
  double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return -std::log1p(-u);
}

}  // namespace

std::vector<Var> vars_of(const CausalGraph& g, const VertexSet& s) {
  std::vector<Var> out;
  for (auto& v : s) out.push_back({v, g.states(v)});
  return out;
}

void DiscreteModel::validate(double tol) const {
  if (!graph.bidirected_edges().empty())
    throw Error("model graph must be a DAG without bidirected edges");
  for (auto& v : graph.vertices()) {
    auto it = cpt.find(v);
    if (it == cpt.end()) throw Error("missing table for '" + v + "'");
    VertexSet scope = kinship(graph, {v}, Relation::Parents);
    scope.push_back(v);
    Factor expect = Factor::constant(vars_of(graph, scope), 0.0);
    if (it->second.vars() != expect.vars())
      throw Error("table for '" + v + "' has the wrong shape");
    for (double p : it->second.values())
      if (p < 0) throw Error("negative entry in table for '" + v + "'");
    Factor rows = it->second.sum_out({v});
    for (double s : rows.values())
      if (std::abs(s - 1.0) > tol) throw Error("row of '" + v + "' does not sum to 1");
  }
}

double DiscreteModel::min_entry() const {
  double m = 1.0;
  for (auto& [_, f] : cpt)
    for (double p : f.values()) m = std::min(m, p);
  return m;
}

DiscreteModel random_model(const CausalGraph& g_in, std::uint64_t seed, double floor,
                           const std::map<std::string, int>& cards) {
  CausalGraph g = g_in.bidirected_edges().empty() ? g_in : materialize_bidirected(g_in);
  if (!cards.empty()) {
    auto specs = g.specs();
    for (auto& s : specs) {
      auto it = cards.find(s.name);
      if (it != cards.end()) s.states = it->second;
    }
    g = CausalGraph(specs, g.directed_edges(), {}, g.context());
  }
  std::mt19937_64 rng(seed);
  DiscreteModel m{g, {}};
  for (auto& v : g.vertices()) {
    VertexSet pa = kinship(g, {v}, Relation::Parents);
    std::vector<Var> vars = vars_of(g, pa);
    int k = g.states(v);
    vars.push_back({v, k});
    Factor f = Factor::constant(vars, 0.0);
    // Layout is parents (graph order) then v; rebuild through the constructor
    // so the factor ends up in canonical order.
    std::vector<double> vals;
    std::size_t rows = f.size() / k;
    for (std::size_t r = 0; r < rows; ++r) {
      std::vector<double> row(k);
      double tot = 0;
      for (auto& x : row) tot += (x = exp1(rng));
      for (auto& x : row) vals.push_back(floor + (1.0 - k * floor) * (x / tot));
    }
    m.cpt.emplace(v, Factor(vars, vals));
  }
  return m;
}

JointTable joint(const DiscreteModel& m) {
  Factor out;
  for (auto& v : m.graph.vertices()) out = out * m.cpt.at(v);
  return out;
}

JointTable observational(const DiscreteModel& m) {
  return joint(m).sum_out(m.graph.latent());
}

JointTable g_formula(const DiscreteModel& m, const VertexSet& a, const std::vector<int>& a_val) {
  if (a.size() != a_val.size()) throw Error("intervention values do not match the set");
  std::map<std::string, int> fixed;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m.graph.index(a[i]);
    fixed[a[i]] = a_val[i];
  }
  Factor out;
  for (auto& v : m.graph.vertices())
    if (!fixed.count(v)) out = out * m.cpt.at(v).slice(fixed);
  return out;
}

Factor interventional(const DiscreteModel& m, const VertexSet& r, const VertexSet& s) {
  if (!set_intersect(r, s).empty()) throw GraphError("kernel random and context sets overlap");
  Factor out;
  for (auto& v : m.graph.vertices())
    if (!set_contains(s, v)) out = out * m.cpt.at(v);
  // Context vertices without children in the product still index the kernel.
  out = out.broadcast(vars_of(m.graph, s));
  return out.marginal(set_union(r, s));
}

Factor marginal(const JointTable& t, const VertexSet& keep) { return t.marginal(keep); }

Factor condition(const JointTable& t, const VertexSet& given) {
  return divide(t, t.marginal(given));
}

double ci_residual(const JointTable& t, const VertexSet& x, const VertexSet& y,
                   const VertexSet& z) {
  if (!set_intersect(x, y).empty() || !set_intersect(x, z).empty() ||
      !set_intersect(y, z).empty())
    throw Error("independence query sets overlap");
  Factor pxyz = t.marginal(set_union(set_union(x, y), z));
  Factor pxz = t.marginal(set_union(x, z));
  Factor pyz = t.marginal(set_union(y, z));
  Factor pz = t.marginal(z);
  double worst = 0;
  for (std::size_t i = 0; i < pxyz.size(); ++i) {
    auto st = pxyz.assignment(i);
    double w = pz.at(st);
    if (w <= 0) continue;
    double d = std::abs(pxyz[i] / w - (pxz.at(st) / w) * (pyz.at(st) / w));
    worst = std::max(worst, d);
  }
  return worst;
}

}  // namespace proxid
