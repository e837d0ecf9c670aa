#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "proxid/expr.hpp"
#include "proxid/graph.hpp"
#include "proxid/kernel.hpp"
#include "proxid/oracle.hpp"
#include "proxid/proximal_ops.hpp"

namespace proxid {

// g_full must be a hidden-variable DAG; use make_query to materialize any
// bidirected edges of a parsed graph first.
struct IdentQuery {
  CausalGraph g_full;
  VertexSet treatment;
  VertexSet outcome;
  VertexSet wpool;  // outcome-inducing proxy candidates
  VertexSet zpool;  // treatment-inducing proxy candidates
  Mode mode = Mode::Declared;
  std::shared_ptr<const DiscreteModel> model;  // oracle mode; model->graph == g_full
  double tol = kBridgeTol;

  void validate() const;
};

IdentQuery make_query(const CausalGraph& g, VertexSet treatment, VertexSet outcome,
                      VertexSet wpool = {}, VertexSet zpool = {});

struct DistrictTarget {
  VertexSet district;
  VertexSet context;  // V* \ D
};

struct TargetSet {
  VertexSet h;
  VertexSet v_star;
  VertexSet y_star;
  VertexSet averaged;  // V* \ (Y* ∪ A): context values that do not matter
  CausalGraph projected;  // latent projection onto V*
  std::vector<DistrictTarget> targets;

  std::size_t total_size() const { return y_star.size(); }
};

// Throws Error unless the latent vertices are in H and A, Y avoid H.
TargetSet district_targets(const CausalGraph& g_full, const VertexSet& a, const VertexSet& y,
                           const VertexSet& h);

struct StepRecord {
  OpStep step;
  PreconditionReport report;
  std::string p1_after;
  std::string p2_after;
  OpKind p2_update = OpKind::Fix;  // Fix or Cut
};

struct Algorithm1Result {
  bool ok = false;
  std::optional<Kernel> kernel;  // p(D || V* \ D)
  std::vector<StepRecord> records;
  std::vector<BridgeSolution> bridges;
  std::string failure;
};

// Runs the dual-sequence loop for one district along a fixed step list.
Algorithm1Result run_algorithm_1(const IdentQuery& q, const VertexSet& h,
                                 const VertexSet& district, const std::vector<OpStep>& steps,
                                 EbfRoute route = EbfRoute::Auto);

enum class Status { Identified, Fail, BudgetExhausted };
const char* status_name(Status s);

struct SearchOptions {
  std::vector<OpKind> allowed{OpKind::Fix, OpKind::Obf, OpKind::Tbf, OpKind::Ebf};
  std::optional<VertexSet> fixed_h;
  std::size_t budget = 100000;  // operation applications across the whole search
  EbfRoute route = EbfRoute::Auto;
};

struct DistrictCertificate {
  DistrictTarget target;
  std::vector<StepRecord> steps;
  Kernel kernel;
};

struct HAttempt {
  VertexSet h;
  std::size_t total_size = 0;
  bool identified = false;
  std::string note;
};

struct IdentResult {
  Status status = Status::Fail;
  VertexSet h;
  std::vector<DistrictCertificate> districts;
  std::optional<expr::Term> functional;  // scope Y ∪ A
  std::vector<HAttempt> attempts;
  std::string fail_witness;
  std::size_t nodes = 0;
};

IdentResult search_identification(const IdentQuery& q, const SearchOptions& opt = {});

// Product of the district kernels with irrelevant context values averaged
// out, summed over Y* \ Y.
expr::Term assemble_functional(const TargetSet& ts, const std::vector<Kernel>& kernels,
                               const CausalGraph& g_full, const VertexSet& a,
                               const VertexSet& y);

// p(Y || A) from an observational table over the observed vertices.
Factor evaluate_functional(const expr::Term& f, const Factor& obs);

// Observational table of the query's model (observed vertices only).
Factor observed_table(const DiscreteModel& m);

}  // namespace proxid
