#pragma once

#include <optional>
#include <string>
#include <vector>

#include "proxid/bridge.hpp"
#include "proxid/graph.hpp"
#include "proxid/kernel.hpp"
#include "proxid/oracle.hpp"

namespace proxid {

enum class OpKind { Fix, Obf, Tbf, Ebf, Cut };

const char* op_kind_name(OpKind k);
std::optional<OpKind> parse_op_kind(const std::string& s);

struct OpStep {
  std::string b;
  OpKind k = OpKind::Fix;
  VertexSet w;  // outcome-inducing proxies
  VertexSet z;  // treatment-inducing proxies

  std::string label() const;  // "Ebf_{W},{Z}(A)" / "Fix(M)"
  friend bool operator==(const OpStep&, const OpStep&) = default;
};

// Declared: graph only, completeness and bridge existence are asserted.
// Oracle: a model is available and the non-graphical conditions are computed.
enum class Mode { Declared, Oracle };

enum class EbfRoute { Auto, Outcome, Treatment };

struct Check {
  std::string id;
  std::string statement;
  bool pass = false;
  std::optional<double> value;  // residual, rank or minimum, when numerical
  std::string note;
};

struct PreconditionReport {
  OpStep op;
  Mode mode = Mode::Declared;
  VertexSet u_star;
  std::vector<Check> graphical;
  std::vector<Check> numerical;
  // Checks of an Ebf route that was tried and abandoned before the other
  // route succeeded; they do not affect pass().
  std::vector<Check> abandoned;
  std::string route;  // Ebf: "outcome" or "treatment"

  bool pass() const;
  std::string first_failure() const;
};

struct OpContext {
  const CausalGraph* g_full = nullptr;  // hidden-variable DAG (no bidirected edges)
  Mode mode = Mode::Declared;
  const DiscreteModel* model = nullptr;  // oracle mode
  double tol = kBridgeTol;
  EbfRoute route = EbfRoute::Auto;
};

struct OpOutcome {
  std::optional<Kernel> kernel;  // present iff report.pass()
  PreconditionReport report;
  std::vector<BridgeSolution> bridges;
};

// Random variables of the new P1 if the step's structural conditions hold
// (membership, disjointness, descendant bookkeeping); no CI or numerical
// checks. Used for pruning.
std::optional<VertexSet> predict_output(const OpStep& step, const Kernel& p1, const Kernel* p2,
                                        const CausalGraph& g_full);

// Full precondition check plus output computation. p2 is consulted only by
// Obf, whose proxy kernel may come from the second sequence.
OpOutcome apply_step(const OpStep& step, const Kernel& p1, const Kernel* p2,
                     const OpContext& ctx);

OpOutcome apply_fix(const Kernel& p, const std::string& b, const OpContext& ctx);
OpOutcome apply_obf(const Kernel& p1, const Kernel* p2, const OpStep& step, const OpContext& ctx);
OpOutcome apply_tbf(const Kernel& p, const OpStep& step, const OpContext& ctx);
OpOutcome apply_ebf(const Kernel& p, const OpStep& step, const OpContext& ctx);
OpOutcome apply_cut(const Kernel& p, const std::string& b, const OpContext& ctx);

PreconditionReport check_preconditions(const OpStep& step, const Kernel& p1, const Kernel* p2,
                                       const OpContext& ctx);

// Subsets of `pool` by increasing size, then lexicographic in pool order.
std::vector<VertexSet> subsets_by_size(const VertexSet& pool, bool include_empty);

}  // namespace proxid
