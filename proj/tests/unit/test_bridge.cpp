#include <doctest.h>

#include <cmath>

#include "proxid/bridge.hpp"
#include "proxid/errors.hpp"

using namespace proxid;

namespace {

// p(w | z) with rows z, and p(o | z).
Factor pw_z() { return Factor({{"Z", 2}, {"W", 2}}, {0.7, 0.3, 0.2, 0.8}); }
Factor po_z() { return Factor({{"Z", 2}, {"O", 2}}, {0.6, 0.4, 0.1, 0.9}); }

}  // namespace

TEST_CASE("square outcome bridge matches the closed-form inverse") {
  BridgeProblem p{BridgeKind::Outcome, pw_z(), po_z(), {"Z"}, {"W"}, {}};
  BridgeSolution s = solve_bridge(p);
  // h(o, .) = M^{-1} r(., o) with M = [[.7,.3],[.2,.8]], det = .5
  double inv[2][2] = {{0.8 / 0.5, -0.3 / 0.5}, {-0.2 / 0.5, 0.7 / 0.5}};
  double r[2][2] = {{0.6, 0.4}, {0.1, 0.9}};  // r[z][o]
  for (int o = 0; o < 2; ++o)
    for (int w = 0; w < 2; ++w) {
      double want = inv[w][0] * r[0][o] + inv[w][1] * r[1][o];
      CHECK(std::abs(s.values.at({{"O", o}, {"W", w}}) - want) < 1e-12);
    }
  CHECK(s.residual < 1e-12);
  CHECK(s.min_rank == 2);
  CHECK(bridge_residual(p, s.values) < 1e-12);
}

TEST_CASE("bridge contexts are solved separately") {
  // op over (B, Z, W): identity when B=0, swap when B=1.
  Factor op({{"B", 2}, {"Z", 2}, {"W", 2}}, {1, 0, 0, 1, 0, 1, 1, 0});
  Factor rhs({{"B", 2}, {"Z", 2}}, {0.25, 0.75, 0.5, 0.125});
  BridgeSolution s = solve_bridge({BridgeKind::Treatment, op, rhs, {"Z"}, {"W"}, {}});
  CHECK(s.contexts.size() == 2);
  CHECK(s.values.at({{"B", 0}, {"W", 1}}) == doctest::Approx(0.75));
  CHECK(s.values.at({{"B", 1}, {"W", 0}}) == doctest::Approx(0.125));
}

TEST_CASE("unconfounded proxy gives a bridge equal to the outcome regression") {
  // If W does not depend on Z, the bridge is any h with E[h | z] = p(o | z); a
  // constant-in-W solution exists only when p(o | z) is constant in z.
  Factor op({{"Z", 2}, {"W", 2}}, {0.4, 0.6, 0.4, 0.6});
  Factor rhs({{"Z", 2}, {"O", 2}}, {0.3, 0.7, 0.3, 0.7});
  BridgeSolution s = solve_bridge({BridgeKind::Outcome, op, rhs, {"Z"}, {"W"}, {}});
  CHECK(s.min_rank == 1);
  CHECK(s.residual < 1e-12);
  Factor bad({{"Z", 2}, {"O", 2}}, {0.3, 0.7, 0.6, 0.4});
  CHECK_THROWS_AS(solve_bridge({BridgeKind::Outcome, op, bad, {"Z"}, {"W"}, {}}), NoSolution);
}

TEST_CASE("column variables may not appear on the right-hand side") {
  Factor rhs({{"Z", 2}, {"W", 2}}, {0.1, 0.2, 0.3, 0.4});
  CHECK_THROWS_AS(solve_bridge({BridgeKind::Outcome, pw_z(), rhs, {"Z"}, {"W"}, {}}), Error);
}

TEST_CASE("extended solutions marginalize to standard ones") {
  // Columns are W' with W kept free; the rhs is p(o, w | z) and summing the
  // free W recovers the plain outcome bridge.
  Factor op = pw_z().relabel({{"W", "W'"}});
  Factor joint_rhs({{"Z", 2}, {"O", 2}, {"W", 2}}, {0.3, 0.3, 0.1, 0.3, 0.05, 0.05, 0.2, 0.7});
  BridgeProblem p{BridgeKind::ExtendedOutcome, op, joint_rhs, {"Z"}, {"W'"}, {{"W'", "W"}}};
  BridgeSolution ext = solve_bridge(p);
  BridgeSolution std_sol = marginalize_extended(ext);
  CHECK(std_sol.kind == BridgeKind::Outcome);
  BridgeProblem plain{BridgeKind::Outcome, pw_z(), joint_rhs.sum_out({"W"}), {"Z"}, {"W"}, {}};
  CHECK(bridge_residual(plain, std_sol.values) < 1e-12);
}

TEST_CASE("completeness rank and witness") {
  // three latent states, two proxy states: never complete
  Factor op({{"U", 3}, {"Z", 2}}, {0.9, 0.1, 0.5, 0.5, 0.2, 0.8});
  CompletenessResult r = completeness_rank(op, {"U"}, {"Z"});
  CHECK_FALSE(r.complete);
  CHECK(r.rank == 2);
  CHECK(r.needed == 3);
  for (int z = 0; z < 2; ++z) {
    double acc = 0;
    for (int u = 0; u < 3; ++u) acc += r.witness.at({{"U", u}}) * op.at({{"U", u}, {"Z", z}});
    CHECK(std::abs(acc) < 1e-12);
  }
  Factor sq({{"U", 2}, {"Z", 2}}, {0.9, 0.1, 0.2, 0.8});
  CHECK(completeness_rank(sq, {"U"}, {"Z"}).complete);
}
