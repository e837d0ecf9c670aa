#pragma once

#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "proxid/graph.hpp"
#include "proxid/id_engine.hpp"
#include "proxid/oracle.hpp"
#include "proxid/text_format.hpp"

namespace fixtures {

using namespace proxid;

inline GraphFile bundled(const std::string& name) {
  return parse_graph(read_file(std::string(PROXID_GRAPH_DIR) + "/" + name + ".graph"));
}

inline IdentQuery bundled_query(const std::string& name) {
  GraphFile f = bundled(name);
  return make_query(f.graph, f.query->treat, f.query->outcome, f.query->wproxy, f.query->zproxy);
}

inline IdentQuery with_model(IdentQuery q, std::uint64_t seed,
                             const std::map<std::string, int>& cards = {}) {
  q.mode = Mode::Oracle;
  q.model = std::make_shared<const DiscreteModel>(random_model(q.g_full, seed, 1e-3, cards));
  if (!cards.empty()) q.g_full = q.model->graph;
  return q;
}

// p(r || s) by enumerating every joint state of the model and multiplying the
// CPT entries of the non-intervened vertices. Shares no code with the factor
// algebra beyond table lookups.
inline Factor brute_kernel(const DiscreteModel& m, const VertexSet& r, const VertexSet& s) {
  const CausalGraph& g = m.graph;
  const VertexSet& vs = g.vertices();
  std::vector<int> st(vs.size(), 0);
  VertexSet rs = set_union(r, s);
  std::map<std::vector<int>, double> acc;
  for (;;) {
    std::map<std::string, int> a;
    for (std::size_t i = 0; i < vs.size(); ++i) a[vs[i]] = st[i];
    double w = 1.0;
    for (auto& v : vs)
      if (!set_contains(s, v)) w *= m.cpt.at(v).at(a);
    std::vector<int> key;
    for (auto& v : rs) key.push_back(a[v]);
    acc[key] += w;
    int i = static_cast<int>(vs.size()) - 1;
    for (; i >= 0; --i) {
      if (++st[i] < g.states(vs[i])) break;
      st[i] = 0;
    }
    if (i < 0) break;
  }
  std::vector<Var> vars = vars_of(g, rs);
  std::vector<double> vals;
  for_each_state(vars, [&](std::size_t, const std::vector<int>& k) { vals.push_back(acc[k]); });
  return Factor(vars, vals);
}

// Random DAG over n vertices named V0..; each forward pair gets an edge with
// probability p, and a share of vertices is marked latent.
inline CausalGraph random_dag(std::mt19937_64& rng, int n, double p, double latent_share = 0.0) {
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<CausalGraph::VertexSpec> vs;
  for (int i = 0; i < n; ++i) vs.push_back({"V" + std::to_string(i), u(rng) < latent_share, 2});
  std::vector<std::pair<std::string, std::string>> d;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (u(rng) < p) d.emplace_back(vs[i].name, vs[j].name);
  return CausalGraph(vs, d, {});
}

// Random ADMG: random DAG part plus bidirected edges with probability q.
inline CausalGraph random_admg(std::mt19937_64& rng, int n, double p, double q) {
  std::uniform_real_distribution<double> u(0, 1);
  CausalGraph dag = random_dag(rng, n, p);
  std::vector<std::pair<std::string, std::string>> b;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (u(rng) < q) b.emplace_back(dag.name(i), dag.name(j));
  return CausalGraph(dag.specs(), dag.directed_edges(), b);
}

}  // namespace fixtures
