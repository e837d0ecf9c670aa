#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "proxid/factor.hpp"
#include "proxid/graph.hpp"

namespace proxid {

// Discrete structural model: a hidden-variable DAG plus one conditional table
// p(v | pa(v)) per vertex, stored as a factor over {v} ∪ pa(v). State counts
// come from the graph.
struct DiscreteModel {
  CausalGraph graph;
  std::map<std::string, Factor> cpt;

  // Throws Error on shape mismatches, negative entries or rows that do not
  // sum to one within `tol`.
  void validate(double tol = 1e-12) const;
  double min_entry() const;
};

// Flat Dirichlet rows mixed with a uniform floor: p' = floor + (1 - k*floor) p,
// which keeps every entry >= floor and rows normalized. Bidirected edges are
// first replaced by latent parents. `cards` overrides graph state counts.
DiscreteModel random_model(const CausalGraph& g, std::uint64_t seed, double floor = 1e-3,
                           const std::map<std::string, int>& cards = {});

// Joint over every vertex, latent ones included.
JointTable joint(const DiscreteModel& m);

// Observational distribution: the joint with latent vertices summed out.
JointTable observational(const DiscreteModel& m);

// Truncated factorization with `a` held at `a_val` (states listed in the
// order of `a`). The result covers V \ a, latent vertices included.
JointTable g_formula(const DiscreteModel& m, const VertexSet& a, const std::vector<int>& a_val);

// Exact kernel p(r || s) for every assignment of s, as a table over r ∪ s.
Factor interventional(const DiscreteModel& m, const VertexSet& r, const VertexSet& s);

Factor marginal(const JointTable& t, const VertexSet& keep);

// p(rest | given) as a table over all of t's variables. Throws
// PositivityViolation naming the first zero-mass state of `given`.
Factor condition(const JointTable& t, const VertexSet& given);

// max over states of |p(x,y|z) - p(x|z) p(y|z)|, skipping zero-mass z.
double ci_residual(const JointTable& t, const VertexSet& x, const VertexSet& y,
                   const VertexSet& z);

std::vector<Var> vars_of(const CausalGraph& g, const VertexSet& s);

}  // namespace proxid
