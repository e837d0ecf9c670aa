#include <doctest.h>

#include "fixtures.hpp"
#include "proxid/certificate.hpp"
#include "proxid/errors.hpp"
#include "proxid/id_engine.hpp"

using namespace proxid;

namespace {

OpStep fix(const std::string& b) { return {b, OpKind::Fix, {}, {}}; }
OpStep bridge(OpKind k, const std::string& b) { return {b, k, {"W"}, {"Z"}}; }

double functional_error(const IdentQuery& q, const IdentResult& r) {
  Factor got = evaluate_functional(*r.functional, observed_table(*q.model));
  Factor want = interventional(*q.model, q.outcome, q.treatment);
  return max_abs_diff(got.marginal(want.names()), want);
}

std::vector<std::string> step_labels(const DistrictCertificate& c) {
  std::vector<std::string> out;
  for (auto& s : c.steps) out.push_back(s.step.label());
  return out;
}

}  // namespace

TEST_CASE("targets for the proxy graph") {
  auto q = fixtures::bundled_query("fig1d");
  TargetSet ts = district_targets(q.g_full, {"A"}, {"Y"}, {"U"});
  CHECK(ts.v_star == VertexSet{"A", "Y", "W", "Z", "X"});
  CHECK(ts.y_star == VertexSet{"Y", "W", "X"});
  CHECK(ts.averaged == VertexSet{"Z"});
  REQUIRE(ts.targets.size() == 2);
  CHECK(ts.targets[0].district == VertexSet{"Y", "W"});
  CHECK(ts.targets[0].context == VertexSet{"A", "Z", "X"});
  CHECK(ts.targets[1].district == VertexSet{"X"});
  CHECK_THROWS_AS(district_targets(q.g_full, {"A"}, {"Y"}, {}), Error);
  CHECK_THROWS_AS(district_targets(q.g_full, {"A"}, {"Y"}, {"U", "A"}), Error);
}

TEST_CASE("targets for the front-door graph") {
  auto q = fixtures::bundled_query("fig3a");
  TargetSet ts = district_targets(q.g_full, {"A"}, {"Y"}, {"U"});
  REQUIRE(ts.targets.size() == 2);
  CHECK(ts.targets[0].district == VertexSet{"M"});
  CHECK(ts.targets[1].district == VertexSet{"Y", "W", "X"});
  TargetSet tw = district_targets(q.g_full, {"A"}, {"Y"}, {"U", "W"});
  REQUIRE(tw.targets.size() == 1);
  CHECK(tw.targets[0].district == VertexSet{"M", "Y", "X"});
}

TEST_CASE("a fixed step list runs the dual sequence") {
  auto q = fixtures::with_model(fixtures::bundled_query("fig1d"), 4);
  auto r = run_algorithm_1(q, {"U"}, {"Y", "W"},
                           {fix("X"), bridge(OpKind::Ebf, "A"), fix("Z")});
  REQUIRE_MESSAGE(r.ok, r.failure);
  CHECK(r.kernel->label() == "p(Y,W || A,Z,X)");
  Factor want = fixtures::brute_kernel(*q.model, {"Y", "W"}, {"A", "Z", "X"});
  CHECK(max_abs_diff(r.kernel->table().marginal(want.names()), want) < 1e-8);
  CHECK(r.records[0].p2_update == OpKind::Fix);
  CHECK(r.records[1].p2_update == OpKind::Cut);  // A is not fixable in P2

  CHECK_THROWS_AS(run_algorithm_1(q, {"U"}, {"Y", "W"}, {fix("X"), fix("Z")}), Error);
  CHECK_THROWS_AS(run_algorithm_1(q, {"U"}, {"Y", "W"}, {fix("X"), fix("X"), fix("Z"), fix("A")}),
                  Error);
}

TEST_CASE("a failing step is reported with its check") {
  auto q = fixtures::bundled_query("fig1d");
  auto r = run_algorithm_1(q, {"U"}, {"Y", "W"}, {fix("A"), fix("X"), fix("Z")});
  CHECK_FALSE(r.ok);
  CHECK(r.failure.find("Fix(A)") == 0);
  CHECK(r.failure.find("fixable") != std::string::npos);
}

TEST_CASE("front-door kernel through a treatment bridge with Z hidden") {
  auto q = fixtures::with_model(fixtures::bundled_query("fig3a"), 6);
  auto r = run_algorithm_1(q, {"U", "Z"}, {"Y", "W", "X"}, {fix("M"), bridge(OpKind::Tbf, "A")});
  REQUIRE_MESSAGE(r.ok, r.failure);
  Factor want = fixtures::brute_kernel(*q.model, {"Y", "W", "X"}, {"A", "M"});
  CHECK(max_abs_diff(r.kernel->table().marginal(want.names()), want) < 1e-8);

  // Keeping Z visible, the treatment bridge would drop it from P1.
  auto bad = run_algorithm_1(q, {"U"}, {"Y", "W", "X"},
                             {fix("M"), bridge(OpKind::Tbf, "A"), fix("Z")});
  CHECK_FALSE(bad.ok);
  CHECK(bad.failure.find("dropped from P1") != std::string::npos);
}

TEST_CASE("search finds the bundled certificates") {
  auto q = fixtures::bundled_query("fig1d");
  IdentResult r = search_identification(q);
  REQUIRE(r.status == Status::Identified);
  CHECK(r.h == VertexSet{"U"});
  REQUIRE(r.districts.size() == 2);
  CHECK(step_labels(r.districts[0]) ==
        std::vector<std::string>{"Fix(X)", "Ebf_{W},{Z}(A)", "Fix(Z)"});

  auto f3 = search_identification(fixtures::bundled_query("fig3a"));
  REQUIRE(f3.status == Status::Identified);
  CHECK(step_labels(f3.districts[1]) ==
        std::vector<std::string>{"Fix(M)", "Ebf_{W},{Z}(A)", "Fix(Z)"});
}

TEST_CASE("restricted searches") {
  SearchOptions obf;
  obf.allowed = {OpKind::Fix, OpKind::Obf};
  SearchOptions tbf;
  tbf.allowed = {OpKind::Fix, OpKind::Tbf};
  auto e = fixtures::bundled_query("fig4e");
  CHECK(search_identification(e, obf).status == Status::Fail);
  CHECK(search_identification(e, tbf).status == Status::Fail);
  CHECK(search_identification(e).status == Status::Identified);

  auto b = fixtures::bundled_query("fig3b");
  IdentResult rb = search_identification(b, obf);
  REQUIRE(rb.status == Status::Identified);
  CHECK(rb.h == VertexSet{"U", "W"});

  auto a = fixtures::bundled_query("fig3a");
  SearchOptions hw = obf;
  hw.fixed_h = VertexSet{"W"};
  CHECK(search_identification(a, hw).status == Status::Fail);
}

TEST_CASE("failures and budget") {
  IdentResult bow = search_identification(fixtures::bundled_query("bow"));
  CHECK(bow.status == Status::Fail);
  CHECK_FALSE(bow.fail_witness.empty());
  CHECK_FALSE(bow.functional);
  CHECK(search_identification(fixtures::bundled_query("fig1c")).status == Status::Fail);

  SearchOptions tiny;
  tiny.budget = 1;
  IdentResult r = search_identification(fixtures::bundled_query("fig1d"), tiny);
  CHECK(r.status == Status::BudgetExhausted);
}

TEST_CASE("identified functionals match the oracle") {
  for (auto name : {"fig1a", "fig1d", "fig3a", "fig4e", "fig3b", "frontdoor", "napkin"}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      auto q = fixtures::with_model(fixtures::bundled_query(name), seed);
      IdentResult r = search_identification(q);
      REQUIRE_MESSAGE(r.status == Status::Identified, name);
      CHECK_MESSAGE(functional_error(q, r) < 1e-8, name);
    }
  }
}

TEST_CASE("certificates are byte-for-byte deterministic") {
  auto q = fixtures::bundled_query("fig3a");
  std::string a = certificate_json(q, search_identification(q)).dump(2);
  std::string b = certificate_json(q, search_identification(q)).dump(2);
  CHECK(a == b);
  Json j = Json::parse(a);
  CHECK(j["status"] == "identified");
  CHECK(j["H"] == Json::array({"U"}));
  CHECK(j.contains("functional"));
  Json f = certificate_json(fixtures::bundled_query("bow"),
                            search_identification(fixtures::bundled_query("bow")));
  CHECK(f.contains("caveat"));
}

TEST_CASE("a ratio by one leaves a term unchanged") {
  auto q = fixtures::with_model(fixtures::bundled_query("fig1a"), 2);
  Factor obs = observed_table(*q.model);
  auto t = expr::observed({"Y"}, {"A", "X"}, &obs);
  auto one = expr::constant({{"A", 2}}, 1.0);
  auto r = expr::ratio(t, one);
  Factor direct = evaluate_functional(t, obs);
  Factor via = evaluate_functional(r, obs);
  CHECK(max_abs_diff(via.marginal(direct.names()), direct) < 1e-15);
  CHECK(max_abs_diff(*r.value, direct) < 1e-15);
}
