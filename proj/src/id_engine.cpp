#include "proxid/id_engine.hpp"

#include <algorithm>
#include <set>

#include "proxid/errors.hpp"

namespace proxid {

namespace {

struct BudgetHit {};

std::string key_of(const Kernel& p1, const Kernel& p2) {
  return format_set(p1.random) + "|" + format_set(p1.context) + "|" + format_set(p2.random);
}

std::string path_text(const std::vector<StepRecord>& path) {
  std::string s = "[";
  for (std::size_t i = 0; i < path.size(); ++i) s += (i ? ", " : "") + path[i].step.label();
  return s + "]";
}

// Second-sequence update of Algorithm 1: Fix when possible, Cut otherwise.
std::pair<Kernel, OpKind> update_p2(const Kernel& p2, const std::string& b,
                                    const CausalGraph& g) {
  if (set_contains(p2.random, b) && fixable(cadmg(g, p2.random, p2.context), b))
    return {fix(p2, b, g), OpKind::Fix};
  return {cut(p2, b, g), OpKind::Cut};
}

OpContext context_for(const IdentQuery& q, EbfRoute route) {
  OpContext ctx;
  ctx.g_full = &q.g_full;
  ctx.mode = q.mode;
  ctx.model = q.model.get();
  ctx.tol = q.tol;
  ctx.route = route;
  return ctx;
}

struct DistrictSearch {
  const IdentQuery& q;
  const SearchOptions& opt;
  const OpContext& ctx;
  const TargetSet& ts;
  const DistrictTarget& target;
  std::size_t& nodes;
  VertexSet wpool, zpool;
  std::set<std::string> failed;
  std::size_t deepest = 0;
  std::string witness;
  std::vector<StepRecord> best;

  bool allowed(OpKind k) const {
    return std::find(opt.allowed.begin(), opt.allowed.end(), k) != opt.allowed.end();
  }

  std::vector<OpStep> candidates(const VertexSet& remaining) const {
    std::vector<OpStep> out;
    if (allowed(OpKind::Fix))
      for (auto& b : remaining) out.push_back({b, OpKind::Fix, {}, {}});
    auto ws = subsets_by_size(wpool, false), zs = subsets_by_size(zpool, false);
    for (auto& b : remaining)
      for (OpKind k : {OpKind::Obf, OpKind::Tbf, OpKind::Ebf}) {
        if (!allowed(k)) continue;
        for (auto& w : ws) {
          if (set_contains(w, b)) continue;
          for (auto& z : zs) {
            if (set_contains(z, b) || !set_intersect(w, z).empty()) continue;
            out.push_back({b, k, w, z});
          }
        }
      }
    if (allowed(OpKind::Cut))
      for (auto& b : remaining) out.push_back({b, OpKind::Cut, {}, {}});
    return out;
  }

  bool dfs(const Kernel& p1, const Kernel& p2, const VertexSet& remaining,
           std::vector<StepRecord>& path, std::optional<Kernel>& result) {
    if (remaining.empty()) {
      result = kernel_marginal(p1, target.district);
      return true;
    }
    std::string key = key_of(p1, p2);
    if (failed.count(key)) return false;
    std::vector<std::string> notes;
    for (const OpStep& st : candidates(remaining)) {
      auto pred = predict_output(st, p1, &p2, q.g_full);
      if (!pred) continue;
      VertexSet covered = set_union(set_union(*pred, p1.context), {st.b});
      if (!is_subset(ts.v_star, covered)) continue;
      if (++nodes > opt.budget) throw BudgetHit{};
      OpOutcome o = apply_step(st, p1, &p2, ctx);
      if (!o.kernel) {
        notes.push_back(st.label() + ": " + o.report.first_failure());
        continue;
      }
      Kernel n2;
      OpKind upd;
      try {
        std::tie(n2, upd) = update_p2(p2, st.b, q.g_full);
      } catch (const PositivityViolation& e) {
        notes.push_back(st.label() + ": second sequence: " + e.what());
        continue;
      }
      path.push_back({st, o.report, o.kernel->label(), n2.label(), upd});
      if (dfs(*o.kernel, n2, set_minus(remaining, {st.b}), path, result)) return true;
      path.pop_back();
    }
    failed.insert(key);
    if (path.size() >= deepest || witness.empty()) {
      deepest = path.size();
      best = path;
      witness = "district " + format_set(target.district) + " after " + path_text(path) +
                ": no operation applies to " + format_set(remaining);
      std::size_t shown = 0;
      for (auto& n : notes) {
        if (++shown > 6) break;
        witness += "; " + n;
      }
    }
    return false;
  }
};

}  // namespace

void IdentQuery::validate() const {
  if (treatment.empty() || outcome.empty()) throw Error("query needs treatment and outcome");
  if (!g_full.bidirected_edges().empty())
    throw Error("query graph must be a hidden-variable DAG");
  for (auto* s : {&treatment, &outcome, &wpool, &zpool})
    for (auto& v : *s) {
      if (!g_full.contains(v)) throw GraphError("unknown vertex '" + v + "'");
      if (g_full.is_latent(v)) throw Error("query vertex '" + v + "' is latent");
    }
  if (!set_intersect(treatment, outcome).empty()) throw Error("treatment and outcome overlap");
  VertexSet ay = set_union(treatment, outcome);
  if (!set_intersect(wpool, ay).empty() || !set_intersect(zpool, ay).empty())
    throw Error("proxy candidates must avoid treatment and outcome");
  if (mode == Mode::Oracle) {
    if (!model) throw Error("oracle mode needs a model");
    if (model->graph.vertices() != g_full.vertices())
      throw Error("model graph does not match the query graph");
  }
}

IdentQuery make_query(const CausalGraph& g, VertexSet treatment, VertexSet outcome,
                      VertexSet wpool, VertexSet zpool) {
  IdentQuery q;
  q.g_full = g.bidirected_edges().empty() ? g : materialize_bidirected(g);
  q.treatment = q.g_full.ordered(treatment);
  q.outcome = q.g_full.ordered(outcome);
  q.wpool = q.g_full.ordered(wpool);
  q.zpool = q.g_full.ordered(zpool);
  return q;
}

TargetSet district_targets(const CausalGraph& g_full, const VertexSet& a, const VertexSet& y,
                           const VertexSet& h) {
  if (!is_subset(g_full.latent(), h)) throw Error("H must contain every latent vertex");
  if (!set_intersect(set_union(a, y), h).empty())
    throw Error("treatment and outcome must stay outside H");
  TargetSet ts;
  ts.h = g_full.ordered(h);
  ts.v_star = set_minus(g_full.observed(), h);
  ts.projected = latent_project(g_full, ts.v_star);
  CausalGraph no_a = induced_subgraph(ts.projected, set_minus(ts.v_star, a));
  ts.y_star = kinship(no_a, y, Relation::Ancestors);
  ts.averaged = set_minus(ts.v_star, set_union(ts.y_star, a));
  for (auto& d : districts(induced_subgraph(ts.projected, ts.y_star)))
    ts.targets.push_back({d, set_minus(ts.v_star, d)});
  return ts;
}

Algorithm1Result run_algorithm_1(const IdentQuery& q, const VertexSet& h,
                                 const VertexSet& district, const std::vector<OpStep>& steps,
                                 EbfRoute route) {
  q.validate();
  TargetSet ts = district_targets(q.g_full, q.treatment, q.outcome, h);
  VertexSet d = q.g_full.ordered(district);
  VertexSet rest = set_minus(ts.v_star, d);
  VertexSet seen;
  for (auto& st : steps) {
    if (!set_contains(rest, st.b) || set_contains(seen, st.b))
      throw Error("steps must enumerate " + format_set(rest) + " exactly once");
    seen.push_back(st.b);
  }
  if (seen.size() != rest.size())
    throw Error("steps must enumerate " + format_set(rest) + " exactly once");

  std::optional<Factor> obs;
  if (q.mode == Mode::Oracle) obs = observed_table(*q.model);
  OpContext ctx = context_for(q, route);
  Kernel p1 = observational_kernel(q.g_full, obs ? &*obs : nullptr);
  Kernel p2 = p1;

  Algorithm1Result out;
  for (auto& st : steps) {
    OpOutcome o = apply_step(st, p1, &p2, ctx);
    out.bridges.insert(out.bridges.end(), o.bridges.begin(), o.bridges.end());
    if (!o.kernel) {
      out.records.push_back({st, o.report, "", "", OpKind::Fix});
      out.failure = st.label() + ": " + o.report.first_failure();
      return out;
    }
    auto [n2, upd] = update_p2(p2, st.b, q.g_full);
    out.records.push_back({st, o.report, o.kernel->label(), n2.label(), upd});
    p1 = *o.kernel;
    p2 = n2;
    if (!is_subset(ts.v_star, p1.vars())) {
      out.failure = st.label() + ": " + format_set(set_minus(ts.v_star, p1.vars())) +
                    " dropped from P1";
      return out;
    }
  }
  out.kernel = kernel_marginal(p1, d);
  out.ok = true;
  return out;
}

const char* status_name(Status s) {
  switch (s) {
    case Status::Identified: return "identified";
    case Status::Fail: return "fail";
    case Status::BudgetExhausted: return "budget-exhausted";
  }
  return "?";
}

IdentResult search_identification(const IdentQuery& q, const SearchOptions& opt) {
  q.validate();
  std::optional<Factor> obs;
  if (q.mode == Mode::Oracle) obs = observed_table(*q.model);
  OpContext ctx = context_for(q, opt.route);
  const CausalGraph& g = q.g_full;
  VertexSet ay = set_union(q.treatment, q.outcome);

  std::vector<TargetSet> hs;
  if (opt.fixed_h) {
    hs.push_back(district_targets(g, q.treatment, q.outcome,
                                  g.ordered(set_union(g.latent(), *opt.fixed_h))));
  } else {
    hs.push_back(district_targets(g, q.treatment, q.outcome, g.latent()));
    VertexSet extras = set_minus(g.ordered(set_union(q.wpool, q.zpool)), ay);
    std::vector<TargetSet> more;
    for (auto& s : subsets_by_size(extras, false))
      more.push_back(district_targets(g, q.treatment, q.outcome, set_union(g.latent(), s)));
    std::stable_sort(more.begin(), more.end(), [](const TargetSet& a, const TargetSet& b) {
      return a.total_size() < b.total_size();
    });
    hs.insert(hs.end(), more.begin(), more.end());
  }

  IdentResult res;
  Kernel start = observational_kernel(g, obs ? &*obs : nullptr);
  for (const TargetSet& ts : hs) {
    HAttempt att{ts.h, ts.total_size(), false, ""};
    std::vector<DistrictCertificate> certs;
    bool all = true;
    try {
      for (const DistrictTarget& t : ts.targets) {
        DistrictSearch ds{q, opt, ctx, ts, t, res.nodes, {}, {}, {}, 0, "", {}};
        ds.wpool = set_minus(q.wpool, ay);
        ds.zpool = set_minus(q.zpool, ay);
        std::vector<StepRecord> path;
        std::optional<Kernel> k;
        if (!ds.dfs(start, start, t.context, path, k)) {
          att.note = ds.witness;
          all = false;
          break;
        }
        certs.push_back({t, path, *k});
      }
    } catch (const BudgetHit&) {
      att.note = "node budget of " + std::to_string(opt.budget) + " exhausted";
      res.attempts.push_back(att);
      res.status = Status::BudgetExhausted;
      res.fail_witness = att.note;
      return res;
    }
    att.identified = all;
    res.attempts.push_back(att);
    if (!all) {
      if (res.fail_witness.empty()) res.fail_witness = "H=" + format_set(ts.h) + ": " + att.note;
      continue;
    }
    std::vector<Kernel> ks;
    for (auto& c : certs) ks.push_back(c.kernel);
    res.functional = assemble_functional(ts, ks, g, q.treatment, q.outcome);
    res.districts = std::move(certs);
    res.h = ts.h;
    res.status = Status::Identified;
    res.fail_witness.clear();
    return res;
  }
  res.status = Status::Fail;
  return res;
}

expr::Term assemble_functional(const TargetSet& ts, const std::vector<Kernel>& kernels,
                               const CausalGraph& g_full, const VertexSet& a,
                               const VertexSet& y) {
  std::vector<expr::Term> parts;
  for (auto& k : kernels) {
    expr::Term t = k.term;
    VertexSet avg = set_intersect(ts.averaged, t.scope());
    if (!avg.empty()) {
      std::vector<Var> shape;
      double w = 1.0;
      for (auto& v : avg) {
        shape.push_back({v, g_full.states(v)});
        w /= g_full.states(v);
      }
      t = expr::sum(expr::product(t, expr::constant(shape, w)), avg);
    }
    parts.push_back(t);
  }
  expr::Term t = kernel_product(parts, set_minus(ts.y_star, y));
  VertexSet missing = set_minus(a, t.scope());
  if (!missing.empty()) {
    std::vector<Var> shape;
    for (auto& v : missing) shape.push_back({v, g_full.states(v)});
    t = expr::product(t, expr::constant(shape, 1.0));
  }
  return t;
}

Factor evaluate_functional(const expr::Term& f, const Factor& obs) {
  return expr::evaluate(f.node, obs);
}

Factor observed_table(const DiscreteModel& m) {
  return observational(m).marginal(m.graph.observed());
}

}  // namespace proxid
