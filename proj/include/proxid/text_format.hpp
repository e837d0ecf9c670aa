#pragma once

#include <optional>
#include <string>

#include "proxid/graph.hpp"
#include "proxid/oracle.hpp"

// Line-oriented graph and model files.
//
//   # comment
//   var U latent
//   var A states=3
//   edge U -> A
//   edge A <-> Y
//   query treat=A outcome=Y wproxy=W zproxy=Z
//   cpt Y | 0,1 : 0.25 0.75        (model files; parent states in graph order)
//   cpt U | - : 0.5 0.5            (no parents)
//
// Names match [A-Za-z_][A-Za-z0-9_.]*. Parse errors carry line numbers.
namespace proxid {

struct QuerySpec {
  VertexSet treat;
  VertexSet outcome;
  VertexSet wproxy;
  VertexSet zproxy;
};

struct GraphFile {
  CausalGraph graph;
  std::optional<QuerySpec> query;
};

struct ModelFile {
  DiscreteModel model;
  std::optional<QuerySpec> query;
};

GraphFile parse_graph(const std::string& text);
ModelFile parse_model(const std::string& text);

std::string serialize_graph(const CausalGraph& g, const std::optional<QuerySpec>& q = {});
std::string serialize_model(const DiscreteModel& m, const std::optional<QuerySpec>& q = {});

std::string read_file(const std::string& path);  // throws Error when unreadable

bool valid_name(const std::string& s);

}  // namespace proxid
