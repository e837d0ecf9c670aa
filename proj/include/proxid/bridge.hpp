#pragma once

#include <map>
#include <string>
#include <vector>

#include "proxid/factor.hpp"
#include "proxid/graph.hpp"

namespace proxid {

enum class BridgeKind { Outcome, Treatment, ExtendedOutcome, ExtendedTreatment };

const char* bridge_kind_name(BridgeKind kind);

// Discrete bridge equation
//
//   sum_c  x(f, c, k) * op(r, c, k) = rhs(r, f, k)   for every row state r,
//
// with rows r, unknown columns c, free variables f (the rest of rhs) and
// context k (the rest of op). For the outcome kind this is
// sum_w h(o,w,b,x) p(w | z,b,x) = p(o | z,b,x) with rows Z, columns W and free
// O; the treatment kind swaps the roles of W and Z and has 1/p(b | w,x) on
// the right. Extended kinds relabel the column proxies (W -> W') so the
// original proxies stay free.
struct BridgeProblem {
  BridgeKind kind = BridgeKind::Outcome;
  Factor op;
  Factor rhs;
  VertexSet rows;
  VertexSet cols;
  // Extended kinds: column variable -> original proxy it was relabelled from.
  std::map<std::string, std::string> col_origin;
};

struct ContextDiagnostics {
  std::string context;
  double residual = 0;
  double cond = 0;
  int rank = 0;
};

struct BridgeSolution {
  BridgeKind kind = BridgeKind::Outcome;
  Factor values;  // over free ∪ cols ∪ context
  VertexSet rows;
  VertexSet cols;
  std::map<std::string, std::string> col_origin;
  double residual = 0;
  double max_cond = 0;
  int min_rank = 0;
  bool ill_conditioned = false;
  std::vector<ContextDiagnostics> contexts;
};

inline constexpr double kBridgeTol = 1e-8;
inline constexpr double kIllConditioned = 1e8;

// Per context, minimum-norm least squares through an SVD; the exact solve
// when the operator is square and invertible. Throws NoSolution when the
// residual exceeds `tol`.
BridgeSolution solve_bridge(const BridgeProblem& p, double tol = kBridgeTol);

// Max absolute violation of the bridge equation by `values`.
double bridge_residual(const BridgeProblem& p, const Factor& values);

// Extended solution -> standard one: sum the free copy of each proxy and give
// the column copy its original name back.
BridgeSolution marginalize_extended(const BridgeSolution& sol);

struct CompletenessResult {
  bool complete = true;
  int rank = 0;
  int needed = 0;
  std::string context;  // first deficient context
  Factor witness;       // g(U*) with sum_u g(u) op(u, c, k) = 0 for all c
};

// Row-rank test of op(u, c, k) with rows over the latent variables `latent`
// and columns over `cols`, separately for every context k.
CompletenessResult completeness_rank(const Factor& op, const VertexSet& latent,
                                     const VertexSet& cols, double tol = kBridgeTol);

}  // namespace proxid
