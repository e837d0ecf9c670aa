#include "proxid/graph.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <numeric>
#include <set>

#include "proxid/errors.hpp"

namespace proxid {

namespace {

using EdgeList = std::vector<std::pair<std::string, std::string>>;

void insert_sorted(std::vector<int>& v, int x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || *it != x) v.insert(it, x);
}

// Plain index-based DAG used internally by d-separation and projection, where
// bidirected edges have been replaced by extra latent parents.
struct Dag {
  std::vector<std::vector<int>> pa, ch;
  int n_real = 0;
};

Dag expand(const CausalGraph& g) {
  Dag d;
  d.n_real = static_cast<int>(g.size());
  d.pa.resize(g.size());
  d.ch.resize(g.size());
  for (int v = 0; v < d.n_real; ++v) {
    d.pa[v] = g.parents_of(v);
    d.ch[v] = g.children_of(v);
  }
  for (int a = 0; a < d.n_real; ++a) {
    for (int b : g.siblings_of(a)) {
      if (b < a) continue;
      int l = static_cast<int>(d.pa.size());
      d.pa.push_back({});
      d.ch.push_back({a, b});
      d.pa[a].push_back(l);
      d.pa[b].push_back(l);
    }
  }
  return d;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

CausalGraph::CausalGraph(std::vector<VertexSpec> vertices, EdgeList directed,
                         EdgeList bidirected, VertexSet context) {
  const int n = static_cast<int>(vertices.size());
  names_.reserve(n);
  for (int i = 0; i < n; ++i) {
    auto& spec = vertices[i];
    if (spec.name.empty()) throw GraphError("empty vertex name");
    if (!index_.emplace(spec.name, i).second)
      throw GraphError("duplicate vertex '" + spec.name + "'");
    if (spec.states < 1)
      throw GraphError("vertex '" + spec.name + "' needs at least one state");
    names_.push_back(spec.name);
    latent_.push_back(spec.latent);
    states_.push_back(spec.states);
  }
  context_.assign(n, false);
  parents_.resize(n);
  children_.resize(n);
  siblings_.resize(n);

  for (auto& [a, b] : directed) {
    int i = index(a), j = index(b);
    if (i == j) throw GraphError("self loop on '" + a + "'");
    if (std::binary_search(parents_[j].begin(), parents_[j].end(), i))
      throw GraphError("duplicate edge " + a + " -> " + b);
    insert_sorted(parents_[j], i);
    insert_sorted(children_[i], j);
  }
  for (auto& [a, b] : bidirected) {
    int i = index(a), j = index(b);
    if (i == j) throw GraphError("bidirected self loop on '" + a + "'");
    if (std::binary_search(siblings_[i].begin(), siblings_[i].end(), j))
      throw GraphError("duplicate edge " + a + " <-> " + b);
    insert_sorted(siblings_[i], j);
    insert_sorted(siblings_[j], i);
  }
  for (auto& c : context) {
    int i = index(c);
    if (latent_[i]) throw GraphError("context vertex '" + c + "' is latent");
    if (!parents_[i].empty() || !siblings_[i].empty())
      throw GraphError("context vertex '" + c + "' has incoming edges");
    context_[i] = true;
  }

  // Kahn's algorithm for acyclicity.
  std::vector<int> indeg(n);
  for (int v = 0; v < n; ++v) indeg[v] = static_cast<int>(parents_[v].size());
  std::vector<int> stack;
  for (int v = 0; v < n; ++v)
    if (indeg[v] == 0) stack.push_back(v);
  int seen = 0;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    ++seen;
    for (int c : children_[v])
      if (--indeg[c] == 0) stack.push_back(c);
  }
  if (seen != n) throw GraphError("directed cycle");
}

bool CausalGraph::contains(std::string_view name) const {
  return index_.find(name) != index_.end();
}

int CausalGraph::index(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end())
    throw GraphError("unknown vertex '" + std::string(name) + "'");
  return it->second;
}

bool CausalGraph::is_latent(std::string_view name) const {
  return latent_[index(name)];
}
bool CausalGraph::is_context(std::string_view name) const {
  return context_[index(name)];
}
int CausalGraph::states(std::string_view name) const {
  return states_[index(name)];
}

VertexSet CausalGraph::latent() const {
  VertexSet out;
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (latent_[i]) out.push_back(names_[i]);
  return out;
}
VertexSet CausalGraph::context() const {
  VertexSet out;
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (context_[i]) out.push_back(names_[i]);
  return out;
}
VertexSet CausalGraph::observed() const {
  VertexSet out;
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (!latent_[i]) out.push_back(names_[i]);
  return out;
}
VertexSet CausalGraph::random() const {
  VertexSet out;
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (!context_[i]) out.push_back(names_[i]);
  return out;
}

EdgeList CausalGraph::directed_edges() const {
  EdgeList out;
  for (std::size_t i = 0; i < names_.size(); ++i)
    for (int j : children_[i]) out.emplace_back(names_[i], names_[j]);
  return out;
}

EdgeList CausalGraph::bidirected_edges() const {
  EdgeList out;
  for (std::size_t i = 0; i < names_.size(); ++i)
    for (int j : siblings_[i])
      if (j > static_cast<int>(i)) out.emplace_back(names_[i], names_[j]);
  return out;
}

bool CausalGraph::has_directed(std::string_view from, std::string_view to) const {
  auto& p = parents_[index(to)];
  return std::binary_search(p.begin(), p.end(), index(from));
}

bool CausalGraph::has_bidirected(std::string_view a, std::string_view b) const {
  auto& s = siblings_[index(a)];
  return std::binary_search(s.begin(), s.end(), index(b));
}

std::vector<CausalGraph::VertexSpec> CausalGraph::specs() const {
  std::vector<VertexSpec> out;
  for (std::size_t i = 0; i < names_.size(); ++i)
    out.push_back({names_[i], static_cast<bool>(latent_[i]), states_[i]});
  return out;
}

VertexSet CausalGraph::ordered(const VertexSet& set) const {
  return names_of(indices(set));
}

std::vector<int> CausalGraph::indices(const VertexSet& set) const {
  std::vector<int> idx;
  idx.reserve(set.size());
  for (auto& s : set) idx.push_back(index(s));
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

VertexSet CausalGraph::names_of(const std::vector<int>& idx) const {
  VertexSet out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(names_[i]);
  return out;
}

bool operator==(const CausalGraph& a, const CausalGraph& b) {
  return a.names_ == b.names_ && a.latent_ == b.latent_ &&
         a.context_ == b.context_ && a.states_ == b.states_ &&
         a.parents_ == b.parents_ && a.siblings_ == b.siblings_;
}

VertexSet kinship(const CausalGraph& g, const VertexSet& s, Relation relation) {
  std::vector<bool> mark(g.size(), false);
  std::vector<int> frontier = g.indices(s);
  switch (relation) {
    case Relation::Parents:
    case Relation::Children: {
      for (int v : frontier) {
        auto& next = relation == Relation::Parents ? g.parents_of(v) : g.children_of(v);
        for (int u : next) mark[u] = true;
      }
      break;
    }
    case Relation::Ancestors:
    case Relation::Descendants: {
      for (int v : frontier) mark[v] = true;
      while (!frontier.empty()) {
        int v = frontier.back();
        frontier.pop_back();
        auto& next = relation == Relation::Ancestors ? g.parents_of(v) : g.children_of(v);
        for (int u : next)
          if (!mark[u]) {
            mark[u] = true;
            frontier.push_back(u);
          }
      }
      break;
    }
  }
  std::vector<int> idx;
  for (std::size_t i = 0; i < mark.size(); ++i)
    if (mark[i]) idx.push_back(static_cast<int>(i));
  return g.names_of(idx);
}

bool d_separated(const CausalGraph& g, const VertexSet& x, const VertexSet& y,
                 const VertexSet& z) {
  auto xi = g.indices(x), yi = g.indices(y), zi = g.indices(z);
  auto overlap = [](const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return !out.empty();
  };
  if (overlap(xi, yi) || overlap(xi, zi) || overlap(yi, zi))
    throw GraphError("d-separation query sets overlap");

  Dag d = expand(g);
  const int n = static_cast<int>(d.pa.size());
  std::vector<bool> in_z(n, false);
  for (int v : zi) in_z[v] = true;
  for (int v = 0; v < d.n_real; ++v)
    if (g.is_context(g.name(v))) in_z[v] = true;
  for (int v : xi) in_z[v] = false;
  for (int v : yi) in_z[v] = false;

  // Ancestors of the conditioning set decide whether colliders are open.
  std::vector<bool> anc_z(n, false);
  std::vector<int> stack;
  for (int v = 0; v < n; ++v)
    if (in_z[v]) {
      anc_z[v] = true;
      stack.push_back(v);
    }
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int p : d.pa[v])
      if (!anc_z[p]) {
        anc_z[p] = true;
        stack.push_back(p);
      }
  }

  std::vector<bool> in_y(n, false);
  for (int v : yi) in_y[v] = true;

  // Bayes-ball: state (v, up) means we arrived at v from a child.
  std::vector<std::array<bool, 2>> visited(n, {false, false});
  std::vector<std::pair<int, bool>> queue;
  for (int v : xi) queue.emplace_back(v, true);
  while (!queue.empty()) {
    auto [v, up] = queue.back();
    queue.pop_back();
    if (visited[v][up]) continue;
    visited[v][up] = true;
    if (!in_z[v] && in_y[v]) return false;
    if (up) {
      if (!in_z[v]) {
        for (int p : d.pa[v]) queue.emplace_back(p, true);
        for (int c : d.ch[v]) queue.emplace_back(c, false);
      }
    } else {
      if (!in_z[v])
        for (int c : d.ch[v]) queue.emplace_back(c, false);
      if (anc_z[v])
        for (int p : d.pa[v]) queue.emplace_back(p, true);
    }
  }
  return true;
}

std::string swig_context_name(std::string_view v) {
  return std::string(v) + "@" + lower(v);
}

CausalGraph swig(const CausalGraph& g, const VertexSet& a) {
  auto ai = g.indices(a);
  std::vector<bool> split(g.size(), false);
  for (int v : ai) {
    if (g.is_context(g.name(v)))
      throw GraphError("cannot split context vertex '" + g.name(v) + "'");
    split[v] = true;
  }
  std::vector<CausalGraph::VertexSpec> specs;
  for (auto& s : g.specs()) {
    specs.push_back(s);
    if (split[g.index(s.name)])
      specs.push_back({swig_context_name(s.name), false, s.states});
  }
  EdgeList directed;
  for (auto& [from, to] : g.directed_edges()) {
    if (split[g.index(from)])
      directed.emplace_back(swig_context_name(from), to);
    else
      directed.emplace_back(from, to);
  }
  VertexSet context = g.context();
  for (int v : ai) context.push_back(swig_context_name(g.name(v)));
  return CausalGraph(std::move(specs), std::move(directed), g.bidirected_edges(),
                     std::move(context));
}

CausalGraph latent_project(const CausalGraph& g, const VertexSet& keep) {
  auto ki = g.indices(keep);
  std::vector<bool> kept(g.size(), false);
  for (int v : ki) kept[v] = true;
  for (auto& c : g.context())
    if (!kept[g.index(c)])
      throw GraphError("latent projection drops context vertex '" + c + "'");

  Dag d = expand(g);
  const int n = static_cast<int>(d.pa.size());
  auto is_kept = [&](int v) { return v < d.n_real && kept[v]; };

  // Kept vertices reachable from v's children through dropped vertices only.
  auto frontier = [&](int v) {
    std::vector<bool> seen(n, false);
    std::vector<int> stack(d.ch[v].begin(), d.ch[v].end()), out;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      if (seen[u]) continue;
      seen[u] = true;
      if (is_kept(u)) {
        out.push_back(u);
      } else {
        for (int c : d.ch[u]) stack.push_back(c);
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  };

  std::set<std::pair<int, int>> dir, bi;
  for (int v = 0; v < n; ++v) {
    auto f = frontier(v);
    if (is_kept(v)) {
      for (int u : f) dir.emplace(v, u);
    } else {
      for (std::size_t i = 0; i < f.size(); ++i)
        for (std::size_t j = i + 1; j < f.size(); ++j) bi.emplace(f[i], f[j]);
    }
  }

  std::vector<CausalGraph::VertexSpec> specs;
  auto all = g.specs();
  for (int v : ki) specs.push_back(all[v]);
  EdgeList de, be;
  for (auto [a, b] : dir) de.emplace_back(g.name(a), g.name(b));
  for (auto [a, b] : bi) be.emplace_back(g.name(a), g.name(b));
  return CausalGraph(std::move(specs), std::move(de), std::move(be), g.context());
}

CausalGraph induced_subgraph(const CausalGraph& g, const VertexSet& keep) {
  auto ki = g.indices(keep);
  std::vector<bool> kept(g.size(), false);
  for (int v : ki) kept[v] = true;
  auto in = [&](const std::string& v) { return kept[g.index(v)]; };
  std::vector<CausalGraph::VertexSpec> specs;
  auto all = g.specs();
  for (int v : ki) specs.push_back(all[v]);
  EdgeList de, be;
  for (auto& e : g.directed_edges())
    if (in(e.first) && in(e.second)) de.push_back(e);
  for (auto& e : g.bidirected_edges())
    if (in(e.first) && in(e.second)) be.push_back(e);
  VertexSet context;
  for (auto& c : g.context())
    if (in(c)) context.push_back(c);
  return CausalGraph(std::move(specs), std::move(de), std::move(be), std::move(context));
}

CausalGraph materialize_bidirected(const CausalGraph& g) {
  auto specs = g.specs();
  auto directed = g.directed_edges();
  for (auto& [a, b] : g.bidirected_edges()) {
    std::string name = "L." + a + "." + b;
    while (g.contains(name)) name += "_";
    specs.push_back({name, true, 2});
    directed.emplace_back(name, a);
    directed.emplace_back(name, b);
  }
  return CausalGraph(std::move(specs), std::move(directed), {}, g.context());
}

std::vector<VertexSet> districts(const CausalGraph& g) {
  if (!g.latent().empty())
    throw GraphError("districts require a graph without latent vertices");
  const int n = static_cast<int>(g.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (int v = 0; v < n; ++v)
    for (int s : g.siblings_of(v)) {
      int a = find(v), b = find(s);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  std::vector<std::vector<int>> groups(n);
  for (int v = 0; v < n; ++v)
    if (!g.is_context(g.name(v))) groups[find(v)].push_back(v);
  std::vector<VertexSet> out;
  for (auto& grp : groups)
    if (!grp.empty()) out.push_back(g.names_of(grp));
  std::sort(out.begin(), out.end(), [&](const VertexSet& a, const VertexSet& b) {
    return g.index(a.front()) < g.index(b.front());
  });
  return out;
}

VertexSet district_of(const CausalGraph& g, std::string_view v) {
  int start = g.index(v);
  if (g.is_context(v))
    throw GraphError("'" + std::string(v) + "' is a context vertex");
  std::vector<bool> seen(g.size(), false);
  std::vector<int> stack{start}, out;
  seen[start] = true;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    out.push_back(u);
    for (int s : g.siblings_of(u))
      if (!seen[s]) {
        seen[s] = true;
        stack.push_back(s);
      }
  }
  std::sort(out.begin(), out.end());
  return g.names_of(out);
}

CausalGraph cadmg(const CausalGraph& g_full, const VertexSet& r, const VertexSet& s) {
  if (!set_intersect(r, s).empty())
    throw GraphError("CADMG random and context sets overlap");
  for (auto& v : set_union(r, s))
    if (g_full.is_latent(v))
      throw GraphError("CADMG over latent vertex '" + v + "'");
  // The hidden-variable DAG has no context of its own, so projection is free
  // to drop anything outside r and s.
  CausalGraph proj = latent_project(g_full, set_union(r, s));
  std::vector<bool> ctx(proj.size(), false);
  for (auto& v : s) ctx[proj.index(v)] = true;
  EdgeList de, be;
  for (auto& e : proj.directed_edges())
    if (!ctx[proj.index(e.second)]) de.push_back(e);
  for (auto& e : proj.bidirected_edges())
    if (!ctx[proj.index(e.first)] && !ctx[proj.index(e.second)]) be.push_back(e);
  return CausalGraph(proj.specs(), std::move(de), std::move(be), proj.ordered(s));
}

VertexSet fixability_witness(const CausalGraph& g, std::string_view b) {
  if (g.is_context(b))
    throw GraphError("'" + std::string(b) + "' is a context vertex");
  VertexSet self{std::string(b)};
  return set_minus(set_intersect(district_of(g, b), kinship(g, self, Relation::Descendants)),
                   self);
}

bool fixable(const CausalGraph& g, std::string_view b) {
  return fixability_witness(g, b).empty();
}

VertexSet markov_blanket(const CausalGraph& g, std::string_view b) {
  VertexSet dis = district_of(g, b);
  VertexSet mb = set_union(dis, kinship(g, dis, Relation::Parents));
  mb = set_minus(mb, VertexSet{std::string(b)});
  return g.ordered(set_minus(mb, g.context()));
}

VertexSet set_union(const VertexSet& a, const VertexSet& b) {
  VertexSet out = a;
  for (auto& v : b)
    if (!set_contains(out, v)) out.push_back(v);
  return out;
}

VertexSet set_minus(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  for (auto& v : a)
    if (!set_contains(b, v)) out.push_back(v);
  return out;
}

VertexSet set_intersect(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  for (auto& v : a)
    if (set_contains(b, v)) out.push_back(v);
  return out;
}

bool set_contains(const VertexSet& a, std::string_view v) {
  return std::find(a.begin(), a.end(), v) != a.end();
}

bool is_subset(const VertexSet& a, const VertexSet& b) {
  return std::all_of(a.begin(), a.end(), [&](auto& v) { return set_contains(b, v); });
}

std::string format_set(const VertexSet& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += s[i];
  }
  return out + "}";
}

}  // namespace proxid
