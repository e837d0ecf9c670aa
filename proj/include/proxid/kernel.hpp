#pragma once

#include <string>
#include <vector>

#include "proxid/expr.hpp"
#include "proxid/factor.hpp"
#include "proxid/graph.hpp"

namespace proxid {

// Interventional kernel p(R || S). The term's table covers R ∪ S and, for
// every context state, sums to one over R. The term doubles as provenance.
struct Kernel {
  VertexSet random;
  VertexSet context;
  expr::Term term;

  VertexSet vars() const { return set_union(random, context); }
  bool has_value() const { return term.value.has_value(); }
  const Factor& table() const;
  std::string label() const;  // "p(Y,W || A,M)"
};

// p(V) over the observed vertices of g_full; `obs` may be null (no numbers).
Kernel observational_kernel(const CausalGraph& g_full, const Factor* obs);

Kernel kernel_marginal(const Kernel& k, const VertexSet& keep);

// p(R \ given | given || S) as a term over R ∪ S.
expr::Term kernel_condition(const Kernel& k, const VertexSet& given);

// p(R \ {b} || S ∪ {b}) = p(R || S) / p(b | mb(b) || S), with the blanket taken
// in the CADMG of the kernel. Throws ConditionFailed if b is not fixable.
Kernel fix(const Kernel& k, const std::string& b, const CausalGraph& g_full);

// p(R \ de(b) || S ∪ {b}), descendants taken in G(V \ S, S). The result is
// constant in b.
Kernel cut(const Kernel& k, const std::string& b, const CausalGraph& g_full);

// sum over `sum_over` of the product of the given terms.
expr::Term kernel_product(const std::vector<expr::Term>& ks, const VertexSet& sum_over);

// max over context states of |sum_R p - 1|.
double normalization_error(const Kernel& k);

}  // namespace proxid
