#include <doctest.h>

#include "fixtures.hpp"
#include "proxid/errors.hpp"
#include "proxid/text_format.hpp"

using namespace proxid;

namespace {

int error_line(const std::string& text, bool model = false) {
  try {
    if (model) parse_model(text);
    else parse_graph(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("graph files round trip") {
  for (auto name : {"fig1d", "fig3a", "bow", "napkin"}) {
    GraphFile f = fixtures::bundled(name);
    std::string text = serialize_graph(f.graph, f.query);
    GraphFile g = parse_graph(text);
    CHECK(g.graph == f.graph);
    REQUIRE(g.query);
    CHECK(g.query->treat == f.query->treat);
    CHECK(g.query->wproxy == f.query->wproxy);
    CHECK(serialize_graph(g.graph, g.query) == text);
  }
}

TEST_CASE("model files round trip exactly") {
  auto q = fixtures::bundled_query("fig1d");
  DiscreteModel m = random_model(q.g_full, 12, 1e-3, {{"U", 3}});
  std::string text = serialize_model(m);
  ModelFile back = parse_model(text);
  CHECK(back.model.graph == m.graph);
  for (auto& [v, f] : m.cpt) CHECK(max_abs_diff(back.model.cpt.at(v), f) == 0.0);
  CHECK(serialize_model(back.model) == text);
}

TEST_CASE("states and latent flags are read") {
  GraphFile f = parse_graph("var U latent states=3\nvar A\nedge U -> A\n");
  CHECK(f.graph.is_latent("U"));
  CHECK(f.graph.states("U") == 3);
  CHECK_FALSE(f.query);
}

TEST_CASE("parse errors carry the offending line") {
  CHECK(error_line("var A\nvar A\n") == 2);
  CHECK(error_line("var A\n\n# note\nedge A -> B\n") == 4);
  CHECK(error_line("var A\nvar B\nedge A => B\n") == 3);
  CHECK(error_line("var A\nvar B\nedge A -> B\nedge B -> A\n") == 4);
  CHECK(error_line("var 1A\n") == 1);
  CHECK(error_line("var A states=x\n") == 1);
  CHECK(error_line("var A\nvar B\nquery treat=A outcome=C\n") == 3);
  CHECK(error_line("var A\nfrobnicate\n") == 2);
  CHECK(error_line("var A\ncpt A | - : 0.5 0.5\n") == 2);
}

TEST_CASE("model errors") {
  CHECK(error_line("var A\nvar B\nedge A -> B\ncpt A | - : 0.5 0.5\n", true) == 2);
  CHECK(error_line("var A\ncpt A | - : 0.5 0.6\n", true) == 2);
  CHECK(error_line("var A\ncpt A | - : 0.5\n", true) == 2);
  CHECK(error_line("var A\nvar B\nedge A -> B\ncpt A | - : 0.5 0.5\ncpt B | 0 : 0.5 0.5\n",
                   true) == 2);
  CHECK(error_line("var A\nvar B\nedge A <-> B\n", true) == 3);
}

TEST_CASE("names") {
  CHECK(valid_name("W_1.b"));
  CHECK_FALSE(valid_name("1W"));
  CHECK_FALSE(valid_name(""));
  CHECK_FALSE(valid_name("a-b"));
  CHECK_THROWS_AS(read_file("/nonexistent/file"), Error);
}
