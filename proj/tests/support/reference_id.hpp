#pragma once

#include <string>
#include <vector>

#include "proxid/graph.hpp"

// Verdict-only c-component identification (Tian's recursion) for p(Y || A)
// on an ADMG. Written against the graph primitives only, so it can referee
// the engine's Fix-only behaviour.
namespace reference {

using proxid::CausalGraph;
using proxid::VertexSet;

inline VertexSet ancestors_within(const CausalGraph& g, const VertexSet& keep, const VertexSet& c) {
  CausalGraph sub = proxid::induced_subgraph(g, keep);
  return proxid::kinship(sub, c, proxid::Relation::Ancestors);
}

inline VertexSet district_containing(const CausalGraph& g, const VertexSet& keep,
                                     const VertexSet& c) {
  CausalGraph sub = proxid::induced_subgraph(g, keep);
  for (auto& d : proxid::districts(sub))
    if (proxid::is_subset(c, d)) return d;
  return {};
}

// Can Q[c] be computed from Q[t], c ⊆ t, c a district of g[c]?
inline bool identify(const CausalGraph& g, const VertexSet& c, VertexSet t) {
  for (;;) {
    VertexSet a = g.ordered(ancestors_within(g, t, c));
    if (a.size() == c.size()) return true;
    if (a.size() == t.size()) return false;
    t = district_containing(g, a, c);
  }
}

inline bool identifiable(const CausalGraph& admg, const VertexSet& a, const VertexSet& y) {
  VertexSet v = admg.vertices();
  CausalGraph no_a = proxid::induced_subgraph(admg, proxid::set_minus(v, a));
  VertexSet y_star = proxid::kinship(no_a, y, proxid::Relation::Ancestors);
  for (auto& d : proxid::districts(proxid::induced_subgraph(admg, y_star)))
    if (!identify(admg, d, district_containing(admg, v, d))) return false;
  return true;
}

}  // namespace reference
