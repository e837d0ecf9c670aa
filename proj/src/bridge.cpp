#include "proxid/bridge.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "proxid/errors.hpp"

namespace proxid {

namespace {

std::vector<Var> pick(const Factor& f, const VertexSet& names) {
  std::vector<Var> out;
  for (auto& n : names) out.push_back({n, f.card(n)});
  return out;
}

// Offset inside a table laid out over `layout` for each joint state of `sub`,
// enumerated row-major in the order of `sub`. Variables of `sub` missing from
// the layout contribute nothing (broadcast).
std::vector<std::size_t> offsets(const std::vector<Var>& layout, const std::vector<Var>& sub) {
  std::vector<std::size_t> stride(layout.size());
  std::size_t acc = 1;
  for (std::size_t i = layout.size(); i-- > 0;) {
    stride[i] = acc;
    acc *= layout[i].card;
  }
  std::vector<std::size_t> sub_stride(sub.size(), 0);
  for (std::size_t i = 0; i < sub.size(); ++i)
    for (std::size_t j = 0; j < layout.size(); ++j)
      if (layout[j].name == sub[i].name) sub_stride[i] = stride[j];
  std::vector<std::size_t> out;
  for_each_state(sub, [&](std::size_t, const std::vector<int>& st) {
    std::size_t o = 0;
    for (std::size_t i = 0; i < st.size(); ++i) o += sub_stride[i] * st[i];
    out.push_back(o);
  });
  return out;
}

VertexSet minus(const VertexSet& a, const VertexSet& b) { return set_minus(a, b); }

struct Layout {
  std::vector<Var> ctx, rows, cols, free;
};

Layout layout_of(const BridgeProblem& p) {
  for (auto& c : p.cols)
    if (p.rhs.has(c)) throw Error("bridge right-hand side depends on column '" + c + "'");
  for (auto& r : p.rows)
    if (!p.op.has(r)) throw Error("bridge operator misses row variable '" + r + "'");
  for (auto& c : p.cols)
    if (!p.op.has(c)) throw Error("bridge operator misses column variable '" + c + "'");
  Layout l;
  VertexSet ctx = minus(minus(p.op.names(), p.rows), p.cols);
  VertexSet free = minus(minus(p.rhs.names(), p.rows), ctx);
  l.ctx = pick(p.op, ctx);
  l.rows = pick(p.op, p.rows);
  l.cols = pick(p.op, p.cols);
  l.free = pick(p.rhs, free);
  return l;
}

std::vector<Var> cat(std::vector<Var> a, const std::vector<Var>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

const char* bridge_kind_name(BridgeKind kind) {
  switch (kind) {
    case BridgeKind::Outcome: return "outcome";
    case BridgeKind::Treatment: return "treatment";
    case BridgeKind::ExtendedOutcome: return "extended-outcome";
    case BridgeKind::ExtendedTreatment: return "extended-treatment";
  }
  return "?";
}

BridgeSolution solve_bridge(const BridgeProblem& p, double tol) {
  Layout l = layout_of(p);
  std::vector<Var> sol_vars = cat(cat(l.free, l.cols), l.ctx);
  Factor values = Factor::constant(sol_vars, 0.0);
  auto& sv = values.vars();

  auto op_ctx = offsets(p.op.vars(), l.ctx), op_row = offsets(p.op.vars(), l.rows),
       op_col = offsets(p.op.vars(), l.cols);
  auto rhs_ctx = offsets(p.rhs.vars(), l.ctx), rhs_row = offsets(p.rhs.vars(), l.rows),
       rhs_free = offsets(p.rhs.vars(), l.free);
  auto sol_ctx = offsets(sv, l.ctx), sol_col = offsets(sv, l.cols),
       sol_free = offsets(sv, l.free);

  const auto nr = static_cast<Eigen::Index>(op_row.size());
  const auto nc = static_cast<Eigen::Index>(op_col.size());
  const auto nf = static_cast<Eigen::Index>(rhs_free.size());

  BridgeSolution out;
  out.kind = p.kind;
  out.rows = p.rows;
  out.cols = p.cols;
  out.col_origin = p.col_origin;
  out.min_rank = std::numeric_limits<int>::max();

  std::vector<int> ctx_state(l.ctx.size(), 0);
  for (std::size_t k = 0; k < op_ctx.size(); ++k) {
    Eigen::MatrixXd m(nr, nc), b(nr, nf);
    for (Eigen::Index r = 0; r < nr; ++r) {
      for (Eigen::Index c = 0; c < nc; ++c) m(r, c) = p.op[op_ctx[k] + op_row[r] + op_col[c]];
      for (Eigen::Index f = 0; f < nf; ++f)
        b(r, f) = p.rhs[rhs_ctx[k] + rhs_row[r] + rhs_free[f]];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::MatrixXd x = svd.solve(b);
    double res = (m * x - b).cwiseAbs().maxCoeff();
    auto& s = svd.singularValues();
    double smax = s.size() ? s(0) : 0.0;
    double smin = s.size() ? s(s.size() - 1) : 0.0;
    double cond = smin > 0 ? smax / smin : std::numeric_limits<double>::infinity();
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) > tol * smax) ++rank;

    for (Eigen::Index c = 0; c < nc; ++c)
      for (Eigen::Index f = 0; f < nf; ++f)
        values[sol_ctx[k] + sol_col[c] + sol_free[f]] = x(c, f);

    ContextDiagnostics d;
    std::size_t rem = k;
    for (std::size_t i = l.ctx.size(); i-- > 0;) {
      ctx_state[i] = static_cast<int>(rem % l.ctx[i].card);
      rem /= l.ctx[i].card;
    }
    d.context = format_state(l.ctx, ctx_state);
    d.residual = res;
    d.cond = cond;
    d.rank = rank;
    out.contexts.push_back(d);
    out.residual = std::max(out.residual, res);
    out.max_cond = std::max(out.max_cond, cond);
    out.min_rank = std::min(out.min_rank, rank);
  }
  out.ill_conditioned = out.max_cond > kIllConditioned;
  out.values = std::move(values);
  if (!(out.residual <= tol)) {
    std::string where;
    for (auto& d : out.contexts)
      if (!(d.residual <= tol)) {
        where = d.context;
        break;
      }
    throw NoSolution(std::string(bridge_kind_name(p.kind)) + " bridge residual " +
                     std::to_string(out.residual) + " at " + where);
  }
  return out;
}

double bridge_residual(const BridgeProblem& p, const Factor& values) {
  // sum over columns of x * op, compared against rhs on the full scope.
  Factor lhs = (values * p.op).sum_out(p.cols);
  Factor rhs = p.rhs.broadcast(lhs.vars());
  lhs = lhs.broadcast(rhs.vars());
  return max_abs_diff(lhs, rhs);
}

BridgeSolution marginalize_extended(const BridgeSolution& sol) {
  BridgeSolution out = sol;
  switch (sol.kind) {
    case BridgeKind::ExtendedOutcome: out.kind = BridgeKind::Outcome; break;
    case BridgeKind::ExtendedTreatment: out.kind = BridgeKind::Treatment; break;
    default: throw Error("marginalization needs an extended bridge solution");
  }
  VertexSet originals;
  for (auto& [col, orig] : sol.col_origin) originals.push_back(orig);
  out.values = sol.values.sum_out(originals).relabel(sol.col_origin);
  out.cols.clear();
  for (auto& c : sol.cols) out.cols.push_back(sol.col_origin.at(c));
  out.col_origin.clear();
  return out;
}

CompletenessResult completeness_rank(const Factor& op, const VertexSet& latent,
                                     const VertexSet& cols, double tol) {
  std::vector<Var> u = pick(op, latent), c = pick(op, cols);
  std::vector<Var> ctx = pick(op, minus(minus(op.names(), latent), cols));
  auto o_ctx = offsets(op.vars(), ctx), o_u = offsets(op.vars(), u), o_c = offsets(op.vars(), c);
  const auto nu = static_cast<Eigen::Index>(o_u.size());
  const auto nc = static_cast<Eigen::Index>(o_c.size());

  CompletenessResult out;
  out.needed = static_cast<int>(nu);
  out.rank = static_cast<int>(nu);
  std::vector<int> ctx_state(ctx.size(), 0);
  for (std::size_t k = 0; k < o_ctx.size(); ++k) {
    Eigen::MatrixXd m(nu, nc);
    for (Eigen::Index i = 0; i < nu; ++i)
      for (Eigen::Index j = 0; j < nc; ++j) m(i, j) = op[o_ctx[k] + o_u[i] + o_c[j]];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU);
    auto& s = svd.singularValues();
    double smax = s.size() ? s(0) : 0.0;
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) > tol * smax) ++rank;
    out.rank = std::min(out.rank, rank);
    if (rank < nu && out.complete) {
      out.complete = false;
      std::size_t rem = k;
      for (std::size_t i = ctx.size(); i-- > 0;) {
        ctx_state[i] = static_cast<int>(rem % ctx[i].card);
        rem /= ctx[i].card;
      }
      out.context = format_state(ctx, ctx_state);
      // Left singular vectors past the numerical rank span the left null space.
      Eigen::VectorXd g = svd.matrixU().col(rank);
      std::vector<double> gv(g.data(), g.data() + g.size());
      out.witness = Factor(u, gv);
    }
  }
  return out;
}

}  // namespace proxid
