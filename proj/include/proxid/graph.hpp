#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace proxid {

// An ordered set of vertex names. Sets produced by graph operations follow
// the owning graph's declaration order.
using VertexSet = std::vector<std::string>;

// Mixed graph over named variables: directed and bidirected edges, latent
// flags and a split into random and context vertices. The same type serves
// as hidden-variable DAG, ADMG, CADMG and single-world intervention graph.
//
// Invariants (checked on construction):
//   - the directed part is acyclic;
//   - at most one directed and one bidirected edge per vertex pair;
//   - context vertices have no incoming directed or bidirected edges;
//   - latent and context vertices are disjoint.
class CausalGraph {
 public:
  struct VertexSpec {
    std::string name;
    bool latent = false;
    int states = 2;
  };

  CausalGraph() = default;
  CausalGraph(std::vector<VertexSpec> vertices,
              std::vector<std::pair<std::string, std::string>> directed,
              std::vector<std::pair<std::string, std::string>> bidirected,
              VertexSet context = {});

  const VertexSet& vertices() const { return names_; }
  std::size_t size() const { return names_.size(); }
  bool contains(std::string_view name) const;
  int index(std::string_view name) const;  // throws GraphError if absent
  const std::string& name(int index) const { return names_.at(index); }

  bool is_latent(std::string_view name) const;
  bool is_context(std::string_view name) const;
  int states(std::string_view name) const;

  VertexSet latent() const;
  VertexSet context() const;
  VertexSet observed() const;  // non-latent vertices
  VertexSet random() const;    // non-context vertices

  // Edge lists in canonical order: sorted by (from, to) vertex index;
  // bidirected pairs are stored with the lower index first.
  std::vector<std::pair<std::string, std::string>> directed_edges() const;
  std::vector<std::pair<std::string, std::string>> bidirected_edges() const;
  bool has_directed(std::string_view from, std::string_view to) const;
  bool has_bidirected(std::string_view a, std::string_view b) const;

  const std::vector<int>& parents_of(int v) const { return parents_.at(v); }
  const std::vector<int>& children_of(int v) const { return children_.at(v); }
  const std::vector<int>& siblings_of(int v) const { return siblings_.at(v); }

  std::vector<VertexSpec> specs() const;

  // Sorts `set` into declaration order, dropping duplicates.
  VertexSet ordered(const VertexSet& set) const;
  std::vector<int> indices(const VertexSet& set) const;
  VertexSet names_of(const std::vector<int>& indices) const;

  friend bool operator==(const CausalGraph& a, const CausalGraph& b);

 private:
  VertexSet names_;
  std::map<std::string, int, std::less<>> index_;
  std::vector<bool> latent_;
  std::vector<bool> context_;
  std::vector<int> states_;
  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<int>> children_;
  std::vector<std::vector<int>> siblings_;
};

enum class Relation { Parents, Children, Ancestors, Descendants };

// Ancestors and descendants include the input set itself.
VertexSet kinship(const CausalGraph& g, const VertexSet& s, Relation relation);

// d-separation of x and y given z. Bidirected edges act as latent common
// parents and context vertices are treated as conditioned constants.
bool d_separated(const CausalGraph& g, const VertexSet& x, const VertexSet& y,
                 const VertexSet& z);

// Name of the context half created when splitting `v` in a SWIG.
std::string swig_context_name(std::string_view v);

// Node splitting: every v in `a` keeps its incoming edges as a random vertex
// and hands its outgoing directed edges to a new context vertex.
CausalGraph swig(const CausalGraph& g, const VertexSet& a);

// Latent projection onto `keep`. Context vertices must be kept.
CausalGraph latent_project(const CausalGraph& g, const VertexSet& keep);

// Subgraph induced on `keep` (no projection of paths through dropped vertices).
CausalGraph induced_subgraph(const CausalGraph& g, const VertexSet& keep);

// Replaces each bidirected edge a<->b by a fresh latent parent named
// "L.a.b"; the result is a hidden-variable DAG.
CausalGraph materialize_bidirected(const CausalGraph& g);

// Bidirected-connected components of the random vertices, ordered by their
// least vertex index. Requires a graph without latent vertices.
std::vector<VertexSet> districts(const CausalGraph& g);

// District of a single random vertex.
VertexSet district_of(const CausalGraph& g, std::string_view v);

// Conditional ADMG for a kernel p(r || s) of the hidden-variable DAG g_full.
CausalGraph cadmg(const CausalGraph& g_full, const VertexSet& r,
                  const VertexSet& s);

bool fixable(const CausalGraph& g, std::string_view b);

// Witness for a failed fixability check: dis(b) ∩ de(b) \ {b}.
VertexSet fixability_witness(const CausalGraph& g, std::string_view b);

// Markov blanket used by the Fix division: (dis(b) ∪ pa(dis(b))) minus b and
// the context vertices.
VertexSet markov_blanket(const CausalGraph& g, std::string_view b);

// Set helpers on VertexSet (order of `a` is preserved).
VertexSet set_union(const VertexSet& a, const VertexSet& b);
VertexSet set_minus(const VertexSet& a, const VertexSet& b);
VertexSet set_intersect(const VertexSet& a, const VertexSet& b);
bool set_contains(const VertexSet& a, std::string_view v);
bool is_subset(const VertexSet& a, const VertexSet& b);
std::string format_set(const VertexSet& s);  // "{A,B}"

}  // namespace proxid
