#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "proxid/errors.hpp"
#include "proxid/graph.hpp"

using namespace proxid;

namespace {

CausalGraph chain() { return CausalGraph({{"A"}, {"M"}, {"Y"}}, {{"A", "M"}, {"M", "Y"}}, {}); }

CausalGraph bow() { return CausalGraph({{"A"}, {"Y"}}, {{"A", "Y"}}, {{"A", "Y"}}); }

std::string sw(const std::string& v) { return swig_context_name(v); }

}  // namespace

TEST_CASE("construction rejects malformed graphs") {
  CHECK_THROWS_AS(CausalGraph({{"A"}, {"A"}}, {}, {}), GraphError);
  CHECK_THROWS_AS(CausalGraph({{"A"}, {"B"}}, {{"A", "B"}, {"B", "A"}}, {}), GraphError);
  CHECK_THROWS_AS(CausalGraph({{"A"}}, {{"A", "A"}}, {}), GraphError);
  CHECK_THROWS_AS(CausalGraph({{"A"}, {"B"}}, {{"A", "B"}}, {}, {"B"}), GraphError);
  CHECK_THROWS_AS(CausalGraph({{"A", true}}, {}, {}, {"A"}), GraphError);
  CHECK_THROWS_AS(CausalGraph({{"A"}}, {{"A", "Q"}}, {}), GraphError);
}

TEST_CASE("kinship") {
  CHECK(kinship(chain(), {"A"}, Relation::Descendants) == VertexSet{"A", "M", "Y"});
  CHECK(kinship(chain(), {}, Relation::Ancestors).empty());
  CHECK(kinship(chain(), {"Y"}, Relation::Parents) == VertexSet{"M"});
  auto f = fixtures::bundled("fig3a").graph;
  CHECK(kinship(f, {"M"}, Relation::Descendants) == VertexSet{"M", "Y", "Z"});
  CHECK_THROWS_AS(kinship(f, {"Q"}, Relation::Parents), GraphError);
}

TEST_CASE("d-separation basics") {
  auto fig1a = fixtures::bundled("fig1a").graph;
  CHECK_FALSE(d_separated(fig1a, {"A"}, {"Y"}, {}));
  CausalGraph collider({{"A"}, {"B"}, {"C"}}, {{"A", "C"}, {"B", "C"}}, {});
  CHECK(d_separated(collider, {"A"}, {"B"}, {}));
  CHECK_FALSE(d_separated(collider, {"A"}, {"B"}, {"C"}));
  auto fig1d = fixtures::bundled("fig1d").graph;
  CHECK(d_separated(fig1d, {"W"}, {"Z", "A"}, {"U", "X"}));
  CHECK_THROWS_AS(d_separated(fig1d, {"W"}, {"W"}, {}), GraphError);
  // bidirected edges behave as latent common parents
  CHECK_FALSE(d_separated(bow(), {"A"}, {"Y"}, {}));
}

TEST_CASE("swig splits treatment vertices") {
  auto fig1a = fixtures::bundled("fig1a").graph;
  CausalGraph s = swig(fig1a, {"A"});
  CHECK(s.contains(sw("A")));
  CHECK(s.is_context(sw("A")));
  CHECK(s.has_directed(sw("A"), "Y"));
  CHECK_FALSE(s.has_directed("A", "Y"));
  CHECK(d_separated(s, {"Y"}, {"A"}, {"X"}));
  CHECK(swig(fig1a, {}) == fig1a);
  CHECK_THROWS(swig(s, {sw("A")}));

  auto fig1d = fixtures::bundled("fig1d").graph;
  CHECK(d_separated(swig(fig1d, {"A"}), {"Y"}, {"A"}, {"U", "X"}));
}

TEST_CASE("proxy assumptions hold on the proxy graph") {
  auto g = fixtures::bundled("fig1d").graph;
  auto ga = swig(g, {"A"});
  CHECK(d_separated(ga, {"Y"}, {"A"}, {"U", "X"}));            // latent ignorability
  CHECK(d_separated(g, {"W"}, {"Z", "A"}, {"U", "X"}));         // outcome-inducing proxy
  CHECK(d_separated(g, {"Z"}, {"Y"}, {"A", "U", "X"}));         // treatment-inducing proxy
  CHECK(d_separated(ga, {"Y"}, {"A"}, {"Z", "U", "X"}));        // ignorability given Z
  CHECK(d_separated(ga, {"Y"}, {"A"}, {"W", "U", "X"}));        // ignorability given W
  CHECK(d_separated(g, {"Z"}, {"Y"}, {"W", "A", "U", "X"}));    // treatment proxy given W
  CHECK(d_separated(ga, {"Y"}, {"A"}, {"W", "Z", "U", "X"}));   // ignorability given W, Z
  // exclusion restrictions: W, Z, X are not affected by A
  CHECK(set_intersect(kinship(g, {"A"}, Relation::Descendants), {"W", "Z", "X"}).empty());
}

TEST_CASE("front-door kernel assumptions hold after splitting M") {
  auto g = fixtures::bundled("fig3a").graph;
  auto gam = swig(g, {"A", "M"});
  auto gm = swig(g, {"M"});
  CHECK(d_separated(gam, {"M"}, {"Y", "A"}, {"W", "X"}));
  CHECK(d_separated(gm, {"Y", "Z"}, {"M"}, {"A", "W", "X"}));
  CHECK(d_separated(gam, {"Y"}, {"A"}, {"W", "U", "X"}));
  CHECK(d_separated(gm, {"W"}, {"Z", "A"}, {"U", "X"}));
  CHECK(d_separated(gm, {"Y"}, {"Z"}, {"W", "A", "U", "X"}));
  // without the split the W -> M -> Z path breaks the outcome proxy
  CHECK_FALSE(d_separated(g, {"W"}, {"Z", "A"}, {"U", "X"}));
}

TEST_CASE("latent projection") {
  auto g = fixtures::bundled("fig1d").graph;
  CausalGraph p = latent_project(g, {"A", "Y", "W", "Z", "X"});
  for (auto& a : VertexSet{"A", "Y", "W", "Z"})
    for (auto& b : VertexSet{"A", "Y", "W", "Z"})
      if (a != b) CHECK(p.has_bidirected(a, b));
  CHECK(p.has_directed("X", "A"));
  CHECK(p.has_directed("Z", "A"));
  CHECK(p.has_directed("W", "Y"));
  CHECK(p.has_directed("A", "Y"));
  CHECK_FALSE(p.has_bidirected("X", "A"));
  CHECK(p.latent().empty());

  CHECK(latent_project(chain(), chain().vertices()) == chain());
  CausalGraph acl({{"A"}, {"L", true}, {"Y"}}, {{"A", "L"}, {"L", "Y"}}, {});
  CausalGraph ay = latent_project(acl, {"A", "Y"});
  CHECK(ay.has_directed("A", "Y"));
  CHECK(ay.bidirected_edges().empty());
}

TEST_CASE("districts") {
  CHECK(districts(chain()).size() == 3);
  auto fig1d = fixtures::bundled("fig1d").graph;
  auto d = districts(latent_project(fig1d, fig1d.observed()));
  REQUIRE(d.size() == 2);
  CHECK(d[0] == VertexSet{"A", "Y", "W", "Z"});
  CHECK(d[1] == VertexSet{"X"});

  auto fig3a = fixtures::bundled("fig3a").graph;
  auto p = latent_project(fig3a, fig3a.observed());
  auto d3 = districts(induced_subgraph(p, {"M", "Y", "W", "X"}));
  REQUIRE(d3.size() == 2);
  CHECK(d3[0] == VertexSet{"M"});
  CHECK(d3[1] == VertexSet{"Y", "W", "X"});
  CHECK_THROWS(districts(fig3a));
}

TEST_CASE("conditional ADMG") {
  auto fig3a = fixtures::bundled("fig3a").graph;
  CausalGraph c = cadmg(fig3a, {"Y", "A", "W", "Z", "X"}, {"M"});
  CHECK(c.is_context("M"));
  CHECK(c.has_directed("M", "Y"));
  CHECK(c.has_directed("M", "Z"));
  CHECK(kinship(c, {"M"}, Relation::Parents).empty());
  CHECK(cadmg(fig3a, fig3a.observed(), {}) == latent_project(fig3a, fig3a.observed()));

  CausalGraph b = cadmg(materialize_bidirected(bow()), {"Y"}, {"A"});
  CHECK(b.has_directed("A", "Y"));
  CHECK(b.random() == VertexSet{"Y"});
  CHECK_THROWS(cadmg(fig3a, {"A", "M"}, {"M"}));
}

TEST_CASE("fixability") {
  CHECK_FALSE(fixable(bow(), "A"));
  CHECK(fixability_witness(bow(), "A") == VertexSet{"Y"});
  CausalGraph c = chain();
  for (auto& v : c.vertices()) CHECK(fixable(c, v));
  auto fig3a = fixtures::bundled("fig3a").graph;
  CHECK(fixable(latent_project(fig3a, fig3a.observed()), "M"));
  CHECK(markov_blanket(latent_project(fig3a, fig3a.observed()), "M") == VertexSet{"A", "W", "X"});
}

TEST_CASE("projection composes on random graphs") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    CausalGraph g = fixtures::random_dag(rng, 8, 0.35);
    std::uniform_real_distribution<double> u(0, 1);
    VertexSet mid, inner;
    for (auto& v : g.vertices())
      if (u(rng) < 0.75) {
        mid.push_back(v);
        if (u(rng) < 0.7) inner.push_back(v);
      }
    CHECK(latent_project(latent_project(g, mid), inner) == latent_project(g, inner));
  }
}

TEST_CASE("districts partition the random vertices") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    CausalGraph g = fixtures::random_admg(rng, 8, 0.3, 0.2);
    auto ds = districts(g);
    VertexSet all;
    for (auto& d : ds) {
      CHECK_FALSE(d.empty());
      CHECK(set_intersect(all, d).empty());
      all = set_union(all, d);
      for (auto& v : d) CHECK(district_of(g, v) == d);
    }
    CHECK(g.ordered(all) == g.random());
    for (std::size_t i = 0; i < ds.size(); ++i)
      for (std::size_t j = i + 1; j < ds.size(); ++j)
        for (auto& a : ds[i])
          for (auto& b : ds[j]) CHECK_FALSE(g.has_bidirected(a, b));
  }
}

TEST_CASE("d-separation is symmetric") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    CausalGraph g = fixtures::random_admg(rng, 7, 0.3, 0.15);
    std::uniform_int_distribution<int> pick(0, 6);
    int a = pick(rng), b = pick(rng), c = pick(rng);
    if (a == b || b == c || a == c) continue;
    VertexSet x{g.name(a)}, y{g.name(b)}, z{g.name(c)};
    CHECK(d_separated(g, x, y, z) == d_separated(g, y, x, z));
  }
}
