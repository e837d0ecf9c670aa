#include "proxid/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "proxid/errors.hpp"
#include "proxid/oracle.hpp"

namespace proxid {

const Factor& Kernel::table() const {
  if (!term.value) throw Error("kernel " + label() + " carries no numbers");
  return *term.value;
}

std::string Kernel::label() const {
  std::string out = "p(";
  for (std::size_t i = 0; i < random.size(); ++i) out += (i ? "," : "") + random[i];
  if (!context.empty()) {
    out += " || ";
    for (std::size_t i = 0; i < context.size(); ++i) out += (i ? "," : "") + context[i];
  }
  return out + ")";
}

Kernel observational_kernel(const CausalGraph& g_full, const Factor* obs) {
  VertexSet v = g_full.observed();
  return {v, {}, expr::observed(v, {}, obs)};
}

Kernel kernel_marginal(const Kernel& k, const VertexSet& keep) {
  for (auto& v : keep)
    if (!set_contains(k.random, v)) throw Error("'" + v + "' is not random in " + k.label());
  VertexSet random = set_intersect(k.random, keep);
  return {random, k.context, expr::sum(k.term, set_minus(k.random, keep))};
}

expr::Term kernel_condition(const Kernel& k, const VertexSet& given) {
  for (auto& v : given)
    if (!set_contains(k.random, v)) throw Error("'" + v + "' is not random in " + k.label());
  auto den = expr::sum(k.term, set_minus(k.random, given));
  return expr::ratio(k.term, den);
}

Kernel fix(const Kernel& k, const std::string& b, const CausalGraph& g_full) {
  if (!set_contains(k.random, b)) throw ConditionFailed("'" + b + "' is not random in " + k.label());
  CausalGraph g = cadmg(g_full, k.random, k.context);
  VertexSet witness = fixability_witness(g, b);
  if (!witness.empty())
    throw ConditionFailed("'" + b + "' is not fixable: district and descendants share " +
                          format_set(witness));
  VertexSet mb = markov_blanket(g, b);
  VertexSet bm = set_union({b}, mb);
  auto joint = expr::sum(k.term, set_minus(k.random, bm));
  auto blanket = expr::sum(k.term, set_minus(k.random, mb));
  auto cond = expr::ratio(joint, blanket);
  VertexSet random = set_minus(k.random, {b});
  VertexSet context = g_full.ordered(set_union(k.context, {b}));
  return {random, context, expr::ratio(k.term, cond)};
}

Kernel cut(const Kernel& k, const std::string& b, const CausalGraph& g_full) {
  if (set_contains(k.context, b)) return k;
  VertexSet rest = set_minus(g_full.observed(), k.context);
  CausalGraph g = cadmg(g_full, rest, k.context);
  VertexSet de = kinship(g, {b}, Relation::Descendants);
  VertexSet random = set_minus(k.random, de);
  auto t = expr::sum(k.term, set_intersect(k.random, de));
  t = expr::product(t, expr::constant({{b, g_full.states(b)}}, 1.0));
  VertexSet context = g_full.ordered(set_union(k.context, {b}));
  return {random, context, t};
}

expr::Term kernel_product(const std::vector<expr::Term>& ks, const VertexSet& sum_over) {
  if (ks.empty()) throw Error("empty kernel product");
  expr::Term t = ks.front();
  for (std::size_t i = 1; i < ks.size(); ++i) t = expr::product(t, ks[i]);
  return expr::sum(t, sum_over);
}

double normalization_error(const Kernel& k) {
  Factor s = k.table().sum_out(k.random);
  double worst = 0;
  for (double v : s.values()) worst = std::max(worst, std::abs(v - 1.0));
  return worst;
}

}  // namespace proxid
