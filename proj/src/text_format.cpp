#include "proxid/text_format.hpp"

#include <cstdio>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "proxid/errors.hpp"

namespace proxid {

namespace {

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

VertexSet split_names(const std::string& s, int line) {
  VertexSet out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, ',')) {
    if (!valid_name(cur)) throw ParseError(line, "bad vertex name '" + cur + "'");
    out.push_back(cur);
  }
  return out;
}

struct Raw {
  std::vector<CausalGraph::VertexSpec> vars;
  std::vector<std::pair<std::string, std::string>> directed, bidirected;
  std::optional<QuerySpec> query;
  struct CptLine {
    int line;
    std::string v;
    std::vector<int> parents;
    std::vector<double> probs;
  };
  std::vector<CptLine> cpts;
  std::vector<std::pair<int, bool>> edge_lines;  // line, directed
  std::map<std::string, int> declared_at;
  int query_line = 0;
};

Raw scan(const std::string& text, bool allow_cpt) {
  Raw r;
  std::istringstream is(text);
  std::string line;
  int no = 0;
  while (std::getline(is, line)) {
    ++no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto t = tokens(line);
    if (t.empty()) continue;
    const std::string& kw = t[0];
    if (kw == "var") {
      if (t.size() < 2) throw ParseError(no, "var needs a name");
      CausalGraph::VertexSpec s;
      s.name = t[1];
      if (!valid_name(s.name)) throw ParseError(no, "bad vertex name '" + s.name + "'");
      if (r.declared_at.count(s.name)) throw ParseError(no, "duplicate vertex '" + s.name + "'");
      for (std::size_t i = 2; i < t.size(); ++i) {
        if (t[i] == "latent") {
          s.latent = true;
        } else if (t[i].rfind("states=", 0) == 0) {
          try {
            std::size_t used = 0;
            s.states = std::stoi(t[i].substr(7), &used);
            if (used != t[i].size() - 7) throw std::invalid_argument("trailing");
          } catch (const std::exception&) {
            throw ParseError(no, "bad state count '" + t[i] + "'");
          }
          if (s.states < 1) throw ParseError(no, "state count must be positive");
        } else {
          throw ParseError(no, "unknown var attribute '" + t[i] + "'");
        }
      }
      r.declared_at[s.name] = no;
      r.vars.push_back(s);
    } else if (kw == "edge") {
      if (t.size() != 4 || (t[2] != "->" && t[2] != "<->"))
        throw ParseError(no, "expected 'edge <a> -> <b>' or 'edge <a> <-> <b>'");
      for (auto* n : {&t[1], &t[3]})
        if (!r.declared_at.count(*n)) throw ParseError(no, "undeclared vertex '" + *n + "'");
      (t[2] == "->" ? r.directed : r.bidirected).emplace_back(t[1], t[3]);
      r.edge_lines.emplace_back(no, t[2] == "->");
    } else if (kw == "query") {
      if (r.query) throw ParseError(no, "more than one query line");
      QuerySpec q;
      for (std::size_t i = 1; i < t.size(); ++i) {
        auto eq = t[i].find('=');
        if (eq == std::string::npos) throw ParseError(no, "expected key=value, got '" + t[i] + "'");
        std::string k = t[i].substr(0, eq);
        VertexSet v = split_names(t[i].substr(eq + 1), no);
        if (k == "treat") q.treat = v;
        else if (k == "outcome") q.outcome = v;
        else if (k == "wproxy") q.wproxy = v;
        else if (k == "zproxy") q.zproxy = v;
        else throw ParseError(no, "unknown query key '" + k + "'");
      }
      if (q.treat.empty() || q.outcome.empty())
        throw ParseError(no, "query needs treat= and outcome=");
      r.query = q;
      r.query_line = no;
    } else if (kw == "cpt" && allow_cpt) {
      // cpt <v> | <states|-> : p1 p2 ...
      if (t.size() < 6 || t[2] != "|" || t[4] != ":")
        throw ParseError(no, "expected 'cpt <v> | <parent states> : <probabilities>'");
      Raw::CptLine c{no, t[1], {}, {}};
      if (!r.declared_at.count(c.v)) throw ParseError(no, "undeclared vertex '" + c.v + "'");
      if (t[3] != "-") {
        std::istringstream ps(t[3]);
        std::string x;
        while (std::getline(ps, x, ',')) {
          try {
            c.parents.push_back(std::stoi(x));
          } catch (const std::exception&) {
            throw ParseError(no, "bad parent state '" + x + "'");
          }
        }
      }
      for (std::size_t i = 5; i < t.size(); ++i) {
        try {
          std::size_t used = 0;
          c.probs.push_back(std::stod(t[i], &used));
          if (used != t[i].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
          throw ParseError(no, "bad probability '" + t[i] + "'");
        }
      }
      r.cpts.push_back(c);
    } else {
      throw ParseError(no, "unknown directive '" + kw + "'");
    }
  }
  return r;
}

CausalGraph build(const Raw& r) {
  try {
    return CausalGraph(r.vars, r.directed, r.bidirected);
  } catch (const GraphError& e) {
    // Replay the edges to find the first line that breaks the graph.
    std::vector<std::pair<std::string, std::string>> d, b;
    std::size_t di = 0, bi = 0;
    for (auto& [line, directed] : r.edge_lines) {
      if (directed) d.push_back(r.directed[di++]);
      else b.push_back(r.bidirected[bi++]);
      try {
        CausalGraph(r.vars, d, b);
      } catch (const GraphError& e2) {
        throw ParseError(line, e2.what());
      }
    }
    throw ParseError(r.edge_lines.empty() ? 1 : r.edge_lines.back().first, e.what());
  }
}

void check_query(const Raw& r, const CausalGraph& g) {
  if (!r.query) return;
  for (auto* s : {&r.query->treat, &r.query->outcome, &r.query->wproxy, &r.query->zproxy})
    for (auto& v : *s) {
      if (!g.contains(v)) throw ParseError(r.query_line, "query names unknown vertex '" + v + "'");
      if (g.is_latent(v)) throw ParseError(r.query_line, "query vertex '" + v + "' is latent");
    }
}

std::string join(const VertexSet& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + s[i];
  return out;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

bool valid_name(const std::string& s) {
  static const std::regex re("[A-Za-z_][A-Za-z0-9_.]*");
  return std::regex_match(s, re);
}

GraphFile parse_graph(const std::string& text) {
  Raw r = scan(text, false);
  GraphFile out{build(r), r.query};
  check_query(r, out.graph);
  return out;
}

ModelFile parse_model(const std::string& text) {
  Raw r = scan(text, true);
  for (auto& [line, directed] : r.edge_lines)
    if (!directed) throw ParseError(line, "model files cannot contain bidirected edges");
  CausalGraph g = build(r);
  check_query(r, g);
  std::map<std::string, std::vector<Raw::CptLine>> by_var;
  for (auto& c : r.cpts) by_var[c.v].push_back(c);
  DiscreteModel m{g, {}};
  for (auto& v : g.vertices()) {
    auto it = by_var.find(v);
    if (it == by_var.end()) throw ParseError(r.declared_at.at(v), "missing cpt lines for '" + v + "'");
    VertexSet pa = kinship(g, {v}, Relation::Parents);
    std::vector<Var> pv = vars_of(g, pa);
    std::size_t rows = 1;
    for (auto& p : pv) rows *= p.card;
    const int k = g.states(v);
    std::vector<double> vals(rows * k, -1.0);
    std::set<std::size_t> seen;
    for (auto& c : it->second) {
      if (c.parents.size() != pv.size())
        throw ParseError(c.line, "expected " + std::to_string(pv.size()) + " parent states");
      std::size_t row = 0;
      for (std::size_t i = 0; i < pv.size(); ++i) {
        if (c.parents[i] < 0 || c.parents[i] >= pv[i].card)
          throw ParseError(c.line, "parent state out of range for '" + pv[i].name + "'");
        row = row * pv[i].card + c.parents[i];
      }
      if (!seen.insert(row).second) throw ParseError(c.line, "duplicate cpt row");
      if (c.probs.size() != static_cast<std::size_t>(k))
        throw ParseError(c.line, "expected " + std::to_string(k) + " probabilities");
      double tot = 0;
      for (int j = 0; j < k; ++j) {
        if (c.probs[j] < 0) throw ParseError(c.line, "negative probability");
        vals[row * k + j] = c.probs[j];
        tot += c.probs[j];
      }
      if (std::abs(tot - 1.0) > 1e-9) throw ParseError(c.line, "row does not sum to 1");
    }
    if (seen.size() != rows) throw ParseError(r.declared_at.at(v), "incomplete cpt for '" + v + "'");
    pv.push_back({v, k});
    m.cpt.emplace(v, Factor(pv, vals));
  }
  return {m, r.query};
}

std::string serialize_graph(const CausalGraph& g, const std::optional<QuerySpec>& q) {
  std::ostringstream os;
  for (auto& s : g.specs()) {
    os << "var " << s.name;
    if (s.latent) os << " latent";
    if (s.states != 2) os << " states=" << s.states;
    os << "\n";
  }
  for (auto& [a, b] : g.directed_edges()) os << "edge " << a << " -> " << b << "\n";
  for (auto& [a, b] : g.bidirected_edges()) os << "edge " << a << " <-> " << b << "\n";
  if (q) {
    os << "query treat=" << join(q->treat) << " outcome=" << join(q->outcome);
    if (!q->wproxy.empty()) os << " wproxy=" << join(q->wproxy);
    if (!q->zproxy.empty()) os << " zproxy=" << join(q->zproxy);
    os << "\n";
  }
  return os.str();
}

std::string serialize_model(const DiscreteModel& m, const std::optional<QuerySpec>& q) {
  std::string out = serialize_graph(m.graph, q);
  for (auto& v : m.graph.vertices()) {
    const Factor& f = m.cpt.at(v);
    VertexSet pa = kinship(m.graph, {v}, Relation::Parents);
    std::vector<Var> pv = vars_of(m.graph, pa);
    const int k = m.graph.states(v);
    for_each_state(pv, [&](std::size_t, const std::vector<int>& st) {
      std::map<std::string, int> a;
      std::string ps;
      for (std::size_t i = 0; i < pv.size(); ++i) {
        a[pv[i].name] = st[i];
        ps += (i ? "," : "") + std::to_string(st[i]);
      }
      out += "cpt " + v + " | " + (pv.empty() ? "-" : ps) + " :";
      for (int j = 0; j < k; ++j) {
        a[v] = j;
        out += " " + num(f.at(a));
      }
      out += "\n";
    });
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace proxid
