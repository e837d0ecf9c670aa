// proxid: identification of interventional distributions with proxies.
//
// Exit codes: 0 ok, 1 parse/IO/usage error, 2 no certificate found (or a
// checked step fails), 3 search budget exhausted, 4 verification error above
// tolerance.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "proxid/certificate.hpp"
#include "proxid/errors.hpp"
#include "proxid/id_engine.hpp"
#include "proxid/text_format.hpp"

using namespace proxid;

namespace {

constexpr int kOk = 0, kInput = 1, kFail = 2, kBudget = 3, kTolerance = 4;

struct Options {
  std::string graph_path;
  std::string model_path;
  std::string out_path;
  std::string mode;  // empty: oracle for verify, declared elsewhere
  std::string h_set = "auto";
  std::string ops = "Fix,Obf,Tbf,Ebf";
  std::string route = "auto";
  std::string step;
  std::string after;
  std::string treat, outcome;
  std::uint64_t seed = 1;
  int trials = 20;
  double tol = 1e-8;
  std::size_t budget = 100000;
};

VertexSet split(const std::string& s) {
  VertexSet out;
  std::stringstream ss(s);
  std::string x;
  while (std::getline(ss, x, ','))
    if (!x.empty()) out.push_back(x);
  return out;
}

struct Loaded {
  CausalGraph graph;
  QuerySpec query;
  std::optional<DiscreteModel> model;
};

// Graph files and model files are both accepted where a graph is needed.
Loaded load(const Options& o, bool need_query) {
  Loaded l;
  std::string text = read_file(o.graph_path);
  if (text.find("\ncpt ") != std::string::npos || text.rfind("cpt ", 0) == 0) {
    ModelFile m = parse_model(text);
    l.graph = m.model.graph;
    l.model = m.model;
    if (m.query) l.query = *m.query;
  } else {
    GraphFile g = parse_graph(text);
    l.graph = g.graph;
    if (g.query) l.query = *g.query;
  }
  if (!o.model_path.empty()) l.model = parse_model(read_file(o.model_path)).model;
  if (!o.treat.empty()) l.query.treat = split(o.treat);
  if (!o.outcome.empty()) l.query.outcome = split(o.outcome);
  if (need_query && (l.query.treat.empty() || l.query.outcome.empty()))
    throw Error("no query: add a 'query treat=... outcome=...' line or pass --treat/--outcome");
  return l;
}

IdentQuery query_of(const Loaded& l) {
  return make_query(l.graph, l.query.treat, l.query.outcome, l.query.wproxy, l.query.zproxy);
}

SearchOptions search_options(const Options& o, const CausalGraph& g) {
  SearchOptions s;
  s.budget = o.budget;
  s.allowed.clear();
  for (auto& k : split(o.ops)) {
    auto kind = parse_op_kind(k);
    if (!kind) throw Error("unknown operation '" + k + "'");
    s.allowed.push_back(*kind);
  }
  if (o.h_set != "auto") {
    VertexSet h = split(o.h_set);
    for (auto& v : h)
      if (!g.contains(v)) throw Error("--h-set names unknown vertex '" + v + "'");
    s.fixed_h = h;
  }
  if (o.route == "outcome") s.route = EbfRoute::Outcome;
  else if (o.route == "treatment") s.route = EbfRoute::Treatment;
  else if (o.route != "auto") throw Error("--route must be auto, outcome or treatment");
  return s;
}

void write_out(const Options& o, const std::string& text) {
  if (o.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out_path, std::ios::binary);
  if (!f) throw Error("cannot write '" + o.out_path + "'");
  f << text;
}

std::shared_ptr<const DiscreteModel> model_for(const Loaded& l, const IdentQuery& q,
                                               std::uint64_t seed) {
  if (l.model) {
    DiscreteModel m = *l.model;
    if (m.graph.vertices() != q.g_full.vertices())
      throw Error("model does not match the query graph");
    return std::make_shared<const DiscreteModel>(std::move(m));
  }
  return std::make_shared<const DiscreteModel>(random_model(q.g_full, seed));
}

int exit_for(Status s) {
  switch (s) {
    case Status::Identified: return kOk;
    case Status::Fail: return kFail;
    case Status::BudgetExhausted: return kBudget;
  }
  return kFail;
}

int cmd_identify(const Options& o) {
  Loaded l = load(o, true);
  IdentQuery q = query_of(l);
  if (o.mode == "oracle") {
    q.mode = Mode::Oracle;
    q.model = model_for(l, q, o.seed);
  }
  IdentResult r = search_identification(q, search_options(o, q.g_full));
  write_out(o, certificate_json(q, r).dump(2) + "\n");
  std::ostream& log = o.out_path.empty() ? std::cerr : std::cout;
  log << status_name(r.status);
  if (r.status == Status::Identified) {
    log << " with H=" << format_set(r.h) << "\n";
    for (auto& d : r.districts) {
      log << "  " << format_set(d.target.district) << ":";
      for (auto& s : d.steps) log << " " << s.step.label();
      log << "\n";
    }
  } else {
    log << ": " << r.fail_witness << "\n";
  }
  return exit_for(r.status);
}

struct Trial {
  bool pass = false;
  int code = kOk;
  std::string line;
};

double max_bridge_residual(const IdentResult& r) {
  double m = 0;
  for (auto& d : r.districts)
    for (auto& s : d.steps)
      for (auto& c : s.report.numerical)
        if (c.id.find("bridge") != std::string::npos && c.value) m = std::max(m, *c.value);
  return m;
}

int cmd_verify(const Options& o) {
  if (o.trials < 1) throw Error("--trials must be at least 1");
  if (!(o.tol > 0)) throw Error("--tol must be positive");
  Loaded l = load(o, true);
  IdentQuery base = query_of(l);
  SearchOptions so = search_options(o, base.g_full);
  const bool oracle = o.mode != "declared";

  // Declared mode: one graph-only certificate evaluated on every model.
  std::optional<IdentResult> declared;
  if (!oracle) {
    declared = search_identification(base, so);
    if (declared->status != Status::Identified) {
      std::cerr << status_name(declared->status) << ": " << declared->fail_witness << "\n";
      return exit_for(declared->status);
    }
  }

  std::vector<Trial> trials(o.trials);
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < o.trials; i = next++) {
      std::uint64_t seed = o.seed + static_cast<std::uint64_t>(i);
      Trial& t = trials[i];
      Json j;
      j["seed"] = seed;
      try {
        IdentQuery q = base;
        auto model = model_for(l, q, seed);
        const IdentResult* r = declared ? &*declared : nullptr;
        IdentResult local;
        if (oracle) {
          q.mode = Mode::Oracle;
          q.model = model;
          local = search_identification(q, so);
          r = &local;
          if (local.status != Status::Identified) {
            j["status"] = status_name(local.status);
            j["pass"] = false;
            t.code = exit_for(local.status);
            t.line = j.dump();
            continue;
          }
        }
        Factor got = evaluate_functional(*r->functional, observed_table(*model));
        Factor want = interventional(*model, q.outcome, q.treatment);
        double err = max_abs_diff(got, want);
        j["max_abs_error"] = err;
        if (oracle) j["bridge_residual"] = max_bridge_residual(*r);
        else j["bridge_residual"] = nullptr;
        t.pass = err < o.tol;
        j["pass"] = t.pass;
        t.code = t.pass ? kOk : kTolerance;
      } catch (const Error& e) {
        j["error"] = e.what();
        j["pass"] = false;
        t.code = kTolerance;
      }
      t.line = j.dump();
    }
  };
  unsigned n = std::max(1u, std::min(std::thread::hardware_concurrency(), 8u));
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < n; ++k) pool.emplace_back(work);
  for (auto& th : pool) th.join();

  std::string report;
  int code = kOk, failed = 0;
  for (auto& t : trials) {
    report += t.line + "\n";
    if (!t.pass) {
      ++failed;
      if (code == kOk || t.code == kTolerance) code = t.code;
    }
  }
  write_out(o, report);
  std::ostream& log = o.out_path.empty() ? std::cerr : std::cout;
  log << (o.trials - failed) << "/" << o.trials << " trials within " << o.tol << "\n";
  return code;
}

int cmd_districts(const Options& o) {
  Loaded l = load(o, true);
  IdentQuery q = query_of(l);
  VertexSet h = q.g_full.latent();
  if (o.h_set != "auto") h = q.g_full.ordered(set_union(h, split(o.h_set)));
  TargetSet ts = district_targets(q.g_full, q.treatment, q.outcome, h);
  std::cout << "H " << format_set(ts.h) << "\n";
  std::cout << "V* " << format_set(ts.v_star) << "\n";
  for (auto& [a, b] : ts.projected.directed_edges()) std::cout << "edge " << a << " -> " << b << "\n";
  for (auto& [a, b] : ts.projected.bidirected_edges())
    std::cout << "edge " << a << " <-> " << b << "\n";
  std::cout << "Y* " << format_set(ts.y_star) << "\n";
  std::cout << "districts";
  for (auto& t : ts.targets) std::cout << " " << format_set(t.district);
  std::cout << "\n";
  for (auto& t : ts.targets)
    std::cout << "target p(" << format_set(t.district) << " || " << format_set(t.context) << ")\n";
  return kOk;
}

// "Kind:B[:W1,W2[:Z1,Z2]]"
OpStep parse_step(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string x;
  while (std::getline(ss, x, ':')) parts.push_back(x);
  if (parts.size() < 2 || parts.size() > 4) throw Error("bad step '" + s + "'");
  auto k = parse_op_kind(parts[0]);
  if (!k) throw Error("unknown operation '" + parts[0] + "'");
  OpStep st{parts[1], *k, {}, {}};
  if (parts.size() > 2) st.w = split(parts[2]);
  if (parts.size() > 3) st.z = split(parts[3]);
  return st;
}

int cmd_check(const Options& o) {
  if (o.step.empty()) throw Error("check needs --step Kind:B[:W[:Z]]");
  Loaded l = load(o, false);
  IdentQuery q = make_query(l.graph, {}, {});
  OpContext ctx;
  ctx.g_full = &q.g_full;
  std::optional<Factor> obs;
  std::shared_ptr<const DiscreteModel> model;
  if (o.mode == "oracle") {
    model = model_for(l, q, o.seed);
    obs = observed_table(*model);
    ctx.mode = Mode::Oracle;
    ctx.model = model.get();
  }
  Kernel p1 = observational_kernel(q.g_full, obs ? &*obs : nullptr), p2 = p1;
  for (auto& s : split(o.after)) {
    OpStep st = parse_step(s);
    OpOutcome out = apply_step(st, p1, &p2, ctx);
    if (!out.kernel) throw Error("prior step " + st.label() + " fails: " + out.report.first_failure());
    p1 = *out.kernel;
    if (set_contains(p2.random, st.b) && fixable(cadmg(q.g_full, p2.random, p2.context), st.b))
      p2 = fix(p2, st.b, q.g_full);
    else
      p2 = cut(p2, st.b, q.g_full);
  }
  OpStep st = parse_step(o.step);
  OpOutcome out = apply_step(st, p1, &p2, ctx);
  std::cout << st.label() << " on " << p1.label() << ": " << (out.report.pass() ? "pass" : "fail")
            << "\n";
  if (!out.report.u_star.empty() || out.report.pass())
    std::cout << "  U* = " << format_set(out.report.u_star) << "\n";
  for (auto* list : {&out.report.graphical, &out.report.numerical})
    for (auto& c : *list)
      std::cout << "  [" << (c.pass ? "ok" : "FAILED") << "] " << c.id << ": " << c.statement
                << (c.note.empty() ? "" : " (" + c.note + ")") << "\n";
  if (out.kernel) std::cout << "  output " << out.kernel->label() << "\n";
  if (!o.out_path.empty()) write_out(o, report_json(out.report).dump(2) + "\n");
  return out.report.pass() ? kOk : kFail;
}

int cmd_oracle(const Options& o) {
  Loaded l = load(o, true);
  if (!l.model) throw Error("oracle needs a model file");
  const DiscreteModel& m = *l.model;
  m.validate(1e-9);
  VertexSet a = m.graph.ordered(l.query.treat), y = m.graph.ordered(l.query.outcome);
  std::vector<Var> av = vars_of(m.graph, a), yv = vars_of(m.graph, y);
  std::string text;
  for_each_state(av, [&](std::size_t, const std::vector<int>& as) {
    Factor py = g_formula(m, a, as).marginal(y);
    for_each_state(yv, [&](std::size_t, const std::vector<int>& ys) {
      std::map<std::string, int> asg;
      for (std::size_t i = 0; i < ys.size(); ++i) asg[y[i]] = ys[i];
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", py.at(asg));
      text += "p(" + format_state(yv, ys) + " || " + format_state(av, as) + ") = " + buf + "\n";
    });
  });
  write_out(o, text);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proximal identification of interventional distributions"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* c, bool graph) {
    if (graph) c->add_option("graph", o.graph_path, "graph or model file")->required();
    c->add_option("--model", o.model_path, "model file (oracle mode)");
    c->add_option("--out", o.out_path, "output file");
    c->add_option("--treat", o.treat, "treatment vertices, comma separated");
    c->add_option("--outcome", o.outcome, "outcome vertices, comma separated");
  };
  auto search = [&](CLI::App* c) {
    c->add_option("--mode", o.mode, "declared|oracle")->check(CLI::IsMember({"declared", "oracle"}));
    c->add_option("--h-set", o.h_set, "observed vertices to hide (comma separated) or auto");
    c->add_option("--budget", o.budget, "operation applications before giving up");
    c->add_option("--ops", o.ops, "allowed operations, e.g. Fix,Tbf");
    c->add_option("--route", o.route, "extended bridge route: auto|outcome|treatment");
    c->add_option("--seed", o.seed, "seed for random models");
  };

  auto* identify = app.add_subcommand("identify", "search for an identifying functional");
  common(identify, true);
  search(identify);

  auto* verify = app.add_subcommand("verify", "compare identified functionals with the oracle");
  common(verify, true);
  search(verify);
  verify->add_option("--trials", o.trials, "number of random models")->check(CLI::PositiveNumber);
  verify->add_option("--tol", o.tol, "maximum absolute error")->check(CLI::PositiveNumber);

  auto* dist = app.add_subcommand("districts", "latent projection, Y* and districts for an H");
  common(dist, true);
  dist->add_option("--h-set", o.h_set, "observed vertices to hide or auto");

  auto* check = app.add_subcommand("check", "check the conditions of one operation");
  common(check, true);
  check->add_option("--step", o.step, "Kind:B[:W[:Z]]")->required();
  check->add_option("--after", o.after, "prior steps, comma separated Kind:B[:W[:Z]] without lists");
  check->add_option("--mode", o.mode, "declared|oracle")->check(CLI::IsMember({"declared", "oracle"}));
  check->add_option("--seed", o.seed, "seed for the random model");

  auto* oracle = app.add_subcommand("oracle", "exact interventional marginals of a model");
  common(oracle, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }
  try {
    if (identify->parsed()) return cmd_identify(o);
    if (verify->parsed()) return cmd_verify(o);
    if (dist->parsed()) return cmd_districts(o);
    if (check->parsed()) return cmd_check(o);
    if (oracle->parsed()) return cmd_oracle(o);
  } catch (const ParseError& e) {
    std::cerr << o.graph_path << ": " << e.what() << "\n";
    return kInput;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  }
  return kInput;
}
