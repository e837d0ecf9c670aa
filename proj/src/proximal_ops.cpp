#include "proxid/proximal_ops.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "proxid/errors.hpp"

namespace proxid {

namespace {

std::string prime(const std::string& v) { return v + "'"; }

std::map<std::string, std::string> primes(const VertexSet& s) {
  std::map<std::string, std::string> out;
  for (auto& v : s) out[v] = prime(v);
  return out;
}

VertexSet primed(const VertexSet& s) {
  VertexSet out;
  for (auto& v : s) out.push_back(prime(v));
  return out;
}

std::string ci_text(const VertexSet& x, const VertexSet& y, const VertexSet& z,
                    const VertexSet& world) {
  std::string s = format_set(x) + " _||_ " + format_set(y);
  if (!z.empty()) s += " | " + format_set(z);
  return s + " in world " + format_set(world);
}

Check structural_failure(const std::string& what) {
  return {"structure", what, false, std::nullopt, ""};
}

// The variable roles shared by the three bridge operations.
struct Roles {
  VertexSet o, x, w_star, z_star, w_tilde, z_tilde;
};

struct CiSpec {
  std::string id;
  VertexSet x, y, z_extra;  // z_extra is joined with U*
  bool world_with_b;
};

// Tries every latent subset, smallest first, until one satisfies all CI
// statements. Returns the U* used and the graphical checks for it (the
// first candidate with the fewest failures when none passes).
std::pair<VertexSet, std::vector<Check>> graphical_checks(const CausalGraph& g_full,
                                                          const VertexSet& s,
                                                          const std::string& b,
                                                          const std::vector<CiSpec>& specs) {
  CausalGraph world_s = swig(g_full, s);
  VertexSet sb = g_full.ordered(set_union(s, {b}));
  CausalGraph world_sb = swig(g_full, sb);
  std::vector<Check> best;
  VertexSet best_u;
  int best_fail = std::numeric_limits<int>::max();
  for (auto& u : subsets_by_size(g_full.latent(), true)) {
    std::vector<Check> checks;
    int fails = 0;
    for (auto& c : specs) {
      VertexSet cond = g_full.ordered(set_union(u, c.z_extra));
      const CausalGraph& g = c.world_with_b ? world_sb : world_s;
      bool ok = d_separated(g, c.x, c.y, cond);
      if (!ok) ++fails;
      checks.push_back({c.id, ci_text(c.x, c.y, cond, c.world_with_b ? sb : s), ok,
                        std::nullopt, ""});
    }
    if (fails < best_fail) {
      best_fail = fails;
      best = checks;
      best_u = u;
    }
    if (fails == 0) break;
  }
  return {best_u, best};
}

Check declared(const std::string& id, const std::string& statement) {
  return {id, statement, true, std::nullopt, "declared"};
}

// p(U* | given ; S) from the model, for the completeness test.
Check completeness_check(const OpContext& ctx, const std::string& id, const VertexSet& u,
                         const VertexSet& given, const VertexSet& cols, const VertexSet& s) {
  std::string stmt = "rank p(" + format_set(u) + " | " + format_set(given) + " ; " +
                     format_set(s) + ") over columns " + format_set(cols);
  if (ctx.mode == Mode::Declared) return declared(id, stmt);
  Factor k = interventional(*ctx.model, set_union(u, given), s);
  Factor cond = divide(k, k.sum_out(u));
  CompletenessResult r = completeness_rank(cond, u, cols, ctx.tol);
  Check c{id, stmt, r.complete, static_cast<double>(r.rank), ""};
  if (!r.complete) c.note = "rank " + std::to_string(r.rank) + " < " +
                            std::to_string(r.needed) + " at " + r.context;
  return c;
}

Check positivity_check(const OpContext& ctx, const Kernel& p, const std::string& b,
                       const VertexSet& wx) {
  std::string stmt = "p(" + b + " | " + format_set(wx) + " ; " + format_set(p.context) + ") > 0";
  if (ctx.mode == Mode::Declared || !p.has_value()) return declared("positivity", stmt);
  Factor joint = p.table().marginal(set_union(set_union({b}, wx), p.context));
  Factor den = joint.sum_out({b});
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < joint.size(); ++i) {
    auto a = joint.assignment(i);
    double d = den.at(a);
    lo = std::min(lo, d > 0 ? joint[i] / d : 0.0);
  }
  return {"positivity", stmt, lo > 0, lo, ""};
}

// Solves a bridge term and records the outcome as a numerical check.
std::optional<expr::Term> bridge_check(const OpContext& ctx, BridgeKind kind,
                                       const VertexSet& rows, const VertexSet& cols,
                                       const std::map<std::string, std::string>& origin,
                                       const expr::Term& op, const expr::Term& rhs,
                                       const std::string& id, std::vector<Check>& checks,
                                       std::vector<BridgeSolution>& solutions) {
  std::string stmt = std::string(bridge_kind_name(kind)) + " bridge with rows " +
                     format_set(rows) + " and columns " + format_set(cols);
  if (ctx.mode == Mode::Declared || !op.value || !rhs.value) {
    checks.push_back(declared(id, stmt));
    return expr::bridge(kind, rows, cols, origin, op, rhs, ctx.tol);
  }
  BridgeSolution sol;
  try {
    auto t = expr::bridge(kind, rows, cols, origin, op, rhs, ctx.tol, &sol);
    Check c{id, stmt, true, sol.residual, ""};
    if (sol.ill_conditioned) c.note = "ill-conditioned";
    checks.push_back(c);
    solutions.push_back(std::move(sol));
    return t;
  } catch (const NoSolution& e) {
    checks.push_back({id, stmt, false, std::nullopt, e.what()});
    return std::nullopt;
  }
}

Check fixable_check(const CausalGraph& g, const std::string& b) {
  VertexSet witness = fixability_witness(g, b);
  Check c{"fixable", "dis(" + b + ") & de(" + b + ") = {" + b + "}", witness.empty(),
          std::nullopt, ""};
  if (!witness.empty()) c.note = "shared with " + format_set(witness);
  return c;
}

bool basic_proxy_shape(const OpStep& st, std::string& why) {
  if (st.w.empty() || st.z.empty()) {
    why = "bridge operations need nonempty W and Z";
    return false;
  }
  if (!set_intersect(st.w, st.z).empty() || set_contains(st.w, st.b) || set_contains(st.z, st.b)) {
    why = "B, W and Z must be disjoint";
    return false;
  }
  return true;
}

// Structural part of each bridge operation. Fills `roles` and returns an
// empty string on success, otherwise the reason.
std::string obf_roles(const OpStep& st, const Kernel& p1, const Kernel* p2,
                      const CausalGraph& g_full, Roles& r, bool& w_from_p2) {
  std::string why;
  if (!basic_proxy_shape(st, why)) return why;
  if (!set_contains(p1.random, st.b)) return st.b + " is not random in P1";
  if (!is_subset(st.z, p1.random)) return "Z is not random in P1";
  VertexSet de = kinship(cadmg(g_full, set_minus(p1.random, st.w), p1.context), {st.b},
                         Relation::Descendants);
  r.o = g_full.ordered(set_minus(set_minus(de, st.z), {st.b}));
  r.z_star = set_intersect(st.z, de);
  r.z_tilde = set_minus(st.z, r.z_star);
  r.x = set_minus(p1.random, set_union(set_union(r.o, {st.b}), set_union(st.z, st.w)));
  w_from_p2 = false;
  if (is_subset(st.w, p1.random)) return "";
  if (p2 && p2->context == p1.context &&
      is_subset(set_union(st.w, set_minus(p1.random, r.o)), p2->random)) {
    w_from_p2 = true;
    return "";
  }
  return "W is neither random in P1 nor available with R1 \\ O in P2";
}

std::string tbf_roles(const OpStep& st, const Kernel& p, const CausalGraph& g_full, Roles& r) {
  std::string why;
  if (!basic_proxy_shape(st, why)) return why;
  if (!is_subset(set_union(set_union({st.b}, st.w), st.z), p.random))
    return "B, W and Z must be random";
  VertexSet de = kinship(cadmg(g_full, set_minus(p.random, st.z), p.context), {st.b},
                         Relation::Descendants);
  r.o = g_full.ordered(set_minus(set_minus(de, st.w), {st.b}));
  r.w_star = set_intersect(st.w, de);
  r.w_tilde = set_minus(st.w, r.w_star);
  r.x = set_minus(p.random, set_union(set_union(r.o, {st.b}), set_union(st.z, st.w)));
  return "";
}

std::string ebf_roles(const OpStep& st, const Kernel& p, const CausalGraph& g_full, Roles& r) {
  std::string why;
  if (!basic_proxy_shape(st, why)) return why;
  if (!is_subset(set_union(set_union({st.b}, st.w), st.z), p.random))
    return "B, W and Z must be random";
  VertexSet de = kinship(cadmg(g_full, p.random, p.context), {st.b}, Relation::Descendants);
  r.w_star = set_intersect(st.w, de);
  r.z_star = set_intersect(st.z, de);
  r.w_tilde = set_minus(st.w, r.w_star);
  r.z_tilde = set_minus(st.z, r.z_star);
  r.o = g_full.ordered(set_minus(de, set_union(set_union(st.w, st.z), {st.b})));
  r.x = set_minus(p.random, set_union(set_union(r.o, {st.b}), set_union(st.z, st.w)));
  return "";
}

OpOutcome start(const OpStep& st, const OpContext& ctx) {
  OpOutcome out;
  out.report.op = st;
  out.report.mode = ctx.mode;
  return out;
}

Kernel make(const Kernel& p, const OpStep& st, const VertexSet& random, expr::Term t,
            const CausalGraph& g) {
  return {g.ordered(random), g.ordered(set_union(p.context, {st.b})), std::move(t)};
}

expr::Term cond(const Kernel& k, const VertexSet& target, const VertexSet& given) {
  return kernel_condition(kernel_marginal(k, set_union(target, given)), given);
}

}  // namespace

const char* op_kind_name(OpKind k) {
  switch (k) {
    case OpKind::Fix: return "Fix";
    case OpKind::Obf: return "Obf";
    case OpKind::Tbf: return "Tbf";
    case OpKind::Ebf: return "Ebf";
    case OpKind::Cut: return "Cut";
  }
  return "?";
}

std::optional<OpKind> parse_op_kind(const std::string& s) {
  for (OpKind k : {OpKind::Fix, OpKind::Obf, OpKind::Tbf, OpKind::Ebf, OpKind::Cut})
    if (s == op_kind_name(k)) return k;
  return std::nullopt;
}

std::string OpStep::label() const {
  std::string s = op_kind_name(k);
  if (k == OpKind::Obf || k == OpKind::Tbf || k == OpKind::Ebf)
    s += "_" + format_set(w) + "," + format_set(z);
  return s + "(" + b + ")";
}

bool PreconditionReport::pass() const {
  for (auto& c : graphical)
    if (!c.pass) return false;
  for (auto& c : numerical)
    if (!c.pass) return false;
  return true;
}

std::string PreconditionReport::first_failure() const {
  for (auto* list : {&graphical, &numerical})
    for (auto& c : *list)
      if (!c.pass) return c.id + ": " + c.statement + (c.note.empty() ? "" : " (" + c.note + ")");
  return "";
}

std::vector<VertexSet> subsets_by_size(const VertexSet& pool, bool include_empty) {
  std::vector<VertexSet> out;
  const std::size_t n = pool.size();
  if (n > 20) throw Error("subset enumeration over more than 20 elements");
  for (std::size_t size = include_empty ? 0 : 1; size <= n; ++size) {
    std::vector<bool> pick(n, false);
    std::fill(pick.begin(), pick.begin() + static_cast<long>(size), true);
    do {
      VertexSet s;
      for (std::size_t i = 0; i < n; ++i)
        if (pick[i]) s.push_back(pool[i]);
      out.push_back(s);
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
  return out;
}

std::optional<VertexSet> predict_output(const OpStep& st, const Kernel& p1, const Kernel* p2,
                                        const CausalGraph& g_full) {
  Roles r;
  switch (st.k) {
    case OpKind::Fix: {
      if (!set_contains(p1.random, st.b)) return std::nullopt;
      if (!fixable(cadmg(g_full, p1.random, p1.context), st.b)) return std::nullopt;
      return set_minus(p1.random, {st.b});
    }
    case OpKind::Cut: {
      if (!set_contains(p1.random, st.b)) return std::nullopt;
      CausalGraph g = cadmg(g_full, set_minus(g_full.observed(), p1.context), p1.context);
      return set_minus(p1.random, kinship(g, {st.b}, Relation::Descendants));
    }
    case OpKind::Obf: {
      bool from_p2 = false;
      if (!obf_roles(st, p1, p2, g_full, r, from_p2).empty()) return std::nullopt;
      return g_full.ordered(set_union(set_union(r.o, r.z_tilde), r.x));
    }
    case OpKind::Tbf:
      if (!tbf_roles(st, p1, g_full, r).empty()) return std::nullopt;
      return g_full.ordered(set_union(set_union(r.o, r.w_tilde), r.x));
    case OpKind::Ebf:
      if (!ebf_roles(st, p1, g_full, r).empty()) return std::nullopt;
      return g_full.ordered(set_union(set_union(set_union(r.o, r.w_tilde), r.z_tilde), r.x));
  }
  return std::nullopt;
}

OpOutcome apply_fix(const Kernel& p, const std::string& b, const OpContext& ctx) {
  OpOutcome out = start({b, OpKind::Fix, {}, {}}, ctx);
  if (!set_contains(p.random, b)) {
    out.report.graphical.push_back(structural_failure(b + " is not random in " + p.label()));
    return out;
  }
  out.report.graphical.push_back(fixable_check(cadmg(*ctx.g_full, p.random, p.context), b));
  if (!out.report.pass()) return out;
  try {
    out.kernel = fix(p, b, *ctx.g_full);
  } catch (const PositivityViolation& e) {
    out.report.numerical.push_back({"positivity", "p(" + b + " | mb(" + b + ")) > 0", false,
                                    std::nullopt, e.what()});
  }
  return out;
}

OpOutcome apply_cut(const Kernel& p, const std::string& b, const OpContext& ctx) {
  OpOutcome out = start({b, OpKind::Cut, {}, {}}, ctx);
  out.kernel = cut(p, b, *ctx.g_full);
  return out;
}

OpOutcome apply_obf(const Kernel& p1, const Kernel* p2, const OpStep& st, const OpContext& ctx) {
  OpOutcome out = start(st, ctx);
  const CausalGraph& g = *ctx.g_full;
  Roles r;
  bool from_p2 = false;
  std::string why = obf_roles(st, p1, p2, g, r, from_p2);
  if (!why.empty()) {
    out.report.graphical.push_back(structural_failure(why));
    return out;
  }
  const VertexSet& s = p1.context;
  auto [u, checks] = graphical_checks(
      g, s, st.b,
      {{"latent-ignorability", r.o, {st.b}, set_union(r.z_tilde, r.x), true},
       {"outcome-proxy", st.w, set_union(st.z, {st.b}), r.x, false},
       {"treatment-proxy", r.o, st.z, set_union({st.b}, r.x), false}});
  out.report.u_star = u;
  out.report.graphical = checks;
  if (!out.report.pass()) return out;

  VertexSet bzx = g.ordered(set_union(set_union({st.b}, st.z), r.x));
  out.report.numerical.push_back(completeness_check(ctx, "completeness", u, bzx, st.z, s));
  if (!out.report.pass()) return out;

  const Kernel& src = from_p2 ? *p2 : p1;
  try {
    auto op = cond(src, st.w, bzx);
    auto rhs = cond(p1, r.o, bzx);
    auto h = bridge_check(ctx, BridgeKind::Outcome, st.z, st.w, {}, op, rhs, "outcome-bridge",
                          out.report.numerical, out.bridges);
    if (!h) return out;
    auto wzx = kernel_marginal(src, set_union(set_union(st.w, r.z_tilde), r.x)).term;
    auto t = expr::sum(expr::product(*h, wzx), st.w);
    out.kernel = make(p1, st, set_union(set_union(r.o, r.z_tilde), r.x), t, g);
  } catch (const PositivityViolation& e) {
    out.report.numerical.push_back({"positivity", "conditioning sets have mass", false,
                                    std::nullopt, e.what()});
  }
  return out;
}

OpOutcome apply_tbf(const Kernel& p, const OpStep& st, const OpContext& ctx) {
  OpOutcome out = start(st, ctx);
  const CausalGraph& g = *ctx.g_full;
  Roles r;
  std::string why = tbf_roles(st, p, g, r);
  if (!why.empty()) {
    out.report.graphical.push_back(structural_failure(why));
    return out;
  }
  const VertexSet& s = p.context;
  auto [u, checks] = graphical_checks(
      g, s, st.b,
      {{"latent-ignorability", r.o, {st.b}, set_union(r.w_tilde, r.x), true},
       {"outcome-proxy", st.w, set_union(st.z, {st.b}), r.x, false},
       {"treatment-proxy", r.o, st.z, set_union(set_union(r.w_tilde, {st.b}), r.x), false}});
  out.report.u_star = u;
  out.report.graphical = checks;
  if (!out.report.pass()) return out;

  VertexSet bwx = g.ordered(set_union(set_union({st.b}, st.w), r.x));
  VertexSet wx = g.ordered(set_union(st.w, r.x));
  out.report.numerical.push_back(completeness_check(ctx, "completeness", u, bwx, st.w, s));
  out.report.numerical.push_back(positivity_check(ctx, p, st.b, wx));
  if (!out.report.pass()) return out;

  try {
    auto op = cond(p, st.z, bwx);
    auto rhs = expr::ratio(kernel_marginal(p, wx).term, kernel_marginal(p, bwx).term);
    auto q = bridge_check(ctx, BridgeKind::Treatment, st.w, st.z, {}, op, rhs,
                          "treatment-bridge", out.report.numerical, out.bridges);
    if (!q) return out;
    VertexSet keep = g.ordered(set_union(set_union(r.o, r.w_tilde), set_union(st.z, bwx)));
    keep = set_minus(keep, r.w_star);
    auto joint = kernel_marginal(p, keep).term;
    auto t = expr::sum(expr::product(*q, joint), st.z);
    out.kernel = make(p, st, set_union(set_union(r.o, r.w_tilde), r.x), t, g);
  } catch (const PositivityViolation& e) {
    out.report.numerical.push_back({"positivity", "conditioning sets have mass", false,
                                    std::nullopt, e.what()});
  }
  return out;
}

OpOutcome apply_ebf(const Kernel& p, const OpStep& st, const OpContext& ctx) {
  OpOutcome out = start(st, ctx);
  const CausalGraph& g = *ctx.g_full;
  Roles r;
  std::string why = ebf_roles(st, p, g, r);
  if (!why.empty()) {
    out.report.graphical.push_back(structural_failure(why));
    return out;
  }
  const VertexSet& s = p.context;
  auto [u, checks] = graphical_checks(
      g, s, st.b,
      {{"latent-ignorability", r.o, {st.b}, set_union(set_union(r.w_tilde, r.z_tilde), r.x),
        true},
       {"outcome-proxy", st.w, set_union(st.z, {st.b}), r.x, false},
       {"treatment-proxy", r.o, st.z, set_union(set_union(r.w_tilde, {st.b}), r.x), false}});
  out.report.u_star = u;
  out.report.graphical = checks;
  if (!out.report.pass()) return out;

  VertexSet random = set_union(set_union(set_union(r.o, r.w_tilde), r.z_tilde), r.x);
  VertexSet bzx = g.ordered(set_union(set_union({st.b}, st.z), r.x));
  VertexSet bwx = g.ordered(set_union(set_union({st.b}, st.w), r.x));
  VertexSet wx = g.ordered(set_union(st.w, r.x));

  auto outcome_route = [&](std::vector<Check>& list) -> std::optional<expr::Term> {
    list.push_back(completeness_check(ctx, "outcome-completeness", u, bzx, st.z, s));
    if (!list.back().pass) return std::nullopt;
    auto op = expr::relabel(cond(p, st.w, bzx), primes(st.w));
    auto rhs = cond(p, set_union(r.o, st.w), bzx);
    std::map<std::string, std::string> origin;
    for (auto& w : st.w) origin[prime(w)] = w;
    auto h = bridge_check(ctx, BridgeKind::ExtendedOutcome, st.z, primed(st.w), origin, op, rhs,
                          "extended-outcome-bridge", list, out.bridges);
    if (!h) return std::nullopt;
    if (!out.bridges.empty() && h->value) {
      // The marginalized solution must solve the standard outcome bridge.
      BridgeSolution m = marginalize_extended(out.bridges.back());
      auto std_op = cond(p, st.w, bzx);
      auto std_rhs = cond(p, r.o, bzx);
      BridgeProblem bp{BridgeKind::Outcome, *std_op.value, *std_rhs.value, st.z, st.w, {}};
      double res = bridge_residual(bp, m.values);
      list.push_back({"extended-marginal", "sum_w h(o,w,w',b,x) solves the outcome bridge",
                      res <= ctx.tol, res, ""});
    }
    auto wzx = expr::relabel(kernel_marginal(p, set_union(set_union(st.w, r.z_tilde), r.x)).term,
                             primes(st.w));
    return expr::sum(expr::product(*h, wzx), set_union(primed(st.w), r.w_star));
  };

  auto treatment_route = [&](std::vector<Check>& list) -> std::optional<expr::Term> {
    list.push_back(completeness_check(ctx, "treatment-completeness", u, bwx, st.w, s));
    list.push_back(positivity_check(ctx, p, st.b, wx));
    if (!list[list.size() - 2].pass || !list.back().pass) return std::nullopt;
    auto op = expr::relabel(cond(p, st.z, bwx), primes(st.z));
    VertexSet zwx = g.ordered(set_union(st.z, wx));
    auto rhs = expr::ratio(kernel_marginal(p, zwx).term, kernel_marginal(p, bwx).term);
    std::map<std::string, std::string> origin;
    for (auto& z : st.z) origin[prime(z)] = z;
    auto q = bridge_check(ctx, BridgeKind::ExtendedTreatment, st.w, primed(st.z), origin, op,
                          rhs, "extended-treatment-bridge", list, out.bridges);
    if (!q) return std::nullopt;
    if (!out.bridges.empty() && q->value) {
      BridgeSolution m = marginalize_extended(out.bridges.back());
      auto std_op = cond(p, st.z, bwx);
      auto std_rhs = expr::ratio(kernel_marginal(p, wx).term, kernel_marginal(p, bwx).term);
      BridgeProblem bp{BridgeKind::Treatment, *std_op.value, *std_rhs.value, st.w, st.z, {}};
      double res = bridge_residual(bp, m.values);
      list.push_back({"extended-marginal", "sum_z q(z,z',b,x) solves the treatment bridge",
                      res <= ctx.tol, res, ""});
    }
    VertexSet keep = set_minus(g.ordered(set_union(set_union(r.o, st.w), set_union(st.z, bwx))),
                               r.w_star);
    auto joint = expr::relabel(kernel_marginal(p, keep).term, primes(st.z));
    return expr::sum(expr::product(*q, joint), set_union(primed(st.z), r.z_star));
  };

  try {
    std::optional<expr::Term> t;
    if (ctx.route != EbfRoute::Treatment) {
      std::vector<Check> list;
      t = outcome_route(list);
      if (t || ctx.route == EbfRoute::Outcome) {
        out.report.numerical.insert(out.report.numerical.end(), list.begin(), list.end());
        out.report.route = "outcome";
      } else {
        out.report.abandoned = list;
      }
    }
    if (!t && ctx.route != EbfRoute::Outcome) {
      std::vector<Check> list;
      t = treatment_route(list);
      out.report.numerical.insert(out.report.numerical.end(), list.begin(), list.end());
      out.report.route = "treatment";
    }
    if (t && out.report.pass()) out.kernel = make(p, st, random, *t, g);
  } catch (const PositivityViolation& e) {
    out.report.numerical.push_back({"positivity", "conditioning sets have mass", false,
                                    std::nullopt, e.what()});
  }
  return out;
}

OpOutcome apply_step(const OpStep& step, const Kernel& p1, const Kernel* p2,
                     const OpContext& ctx) {
  if (!ctx.g_full) throw Error("operation context without a graph");
  if (ctx.mode == Mode::Oracle && !ctx.model) throw Error("oracle mode needs a model");
  switch (step.k) {
    case OpKind::Fix: return apply_fix(p1, step.b, ctx);
    case OpKind::Cut: return apply_cut(p1, step.b, ctx);
    case OpKind::Obf: return apply_obf(p1, p2, step, ctx);
    case OpKind::Tbf: return apply_tbf(p1, step, ctx);
    case OpKind::Ebf: return apply_ebf(p1, step, ctx);
  }
  throw Error("unknown operation");
}

PreconditionReport check_preconditions(const OpStep& step, const Kernel& p1, const Kernel* p2,
                                       const OpContext& ctx) {
  return apply_step(step, p1, p2, ctx).report;
}

}  // namespace proxid
