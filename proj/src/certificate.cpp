#include "proxid/certificate.hpp"

namespace proxid {

namespace {

Json checks_json(const std::vector<Check>& cs) {
  Json a = Json::array();
  for (auto& c : cs) {
    Json j;
    j["id"] = c.id;
    j["statement"] = c.statement;
    j["pass"] = c.pass;
    if (c.value) j["value"] = *c.value;
    if (!c.note.empty()) j["note"] = c.note;
    a.push_back(j);
  }
  return a;
}

}  // namespace

Json report_json(const PreconditionReport& r) {
  Json j;
  j["op"] = r.op.label();
  j["mode"] = r.mode == Mode::Oracle ? "oracle" : "declared";
  j["pass"] = r.pass();
  j["u_star"] = r.u_star;
  if (!r.route.empty()) j["route"] = r.route;
  j["graphical"] = checks_json(r.graphical);
  j["numerical"] = checks_json(r.numerical);
  if (!r.abandoned.empty()) j["abandoned"] = checks_json(r.abandoned);
  return j;
}

Json certificate_json(const IdentQuery& q, const IdentResult& r) {
  Json j;
  j["query"] = {{"treat", q.treatment},
                {"outcome", q.outcome},
                {"wproxy", q.wpool},
                {"zproxy", q.zpool},
                {"mode", q.mode == Mode::Oracle ? "oracle" : "declared"}};
  j["status"] = status_name(r.status);
  j["H"] = r.h;
  Json ds = Json::array();
  for (auto& d : r.districts) {
    Json dj;
    dj["district"] = d.target.district;
    dj["context"] = d.target.context;
    Json steps = Json::array();
    for (auto& s : d.steps) {
      Json sj;
      sj["op"] = op_kind_name(s.step.k);
      sj["b"] = s.step.b;
      sj["w"] = s.step.w;
      sj["z"] = s.step.z;
      sj["p1"] = s.p1_after;
      sj["p2"] = s.p2_after;
      sj["p2_update"] = op_kind_name(s.p2_update);
      sj["report"] = report_json(s.report);
      steps.push_back(sj);
    }
    dj["steps"] = steps;
    dj["kernel"] = d.kernel.label();
    ds.push_back(dj);
  }
  j["districts"] = ds;
  if (r.functional) j["functional"] = expr::render(r.functional->node);
  Json at = Json::array();
  for (auto& a : r.attempts) {
    Json aj;
    aj["H"] = a.h;
    aj["district_size"] = a.total_size;
    aj["identified"] = a.identified;
    if (!a.note.empty()) aj["note"] = a.note;
    at.push_back(aj);
  }
  j["attempts"] = at;
  j["nodes"] = r.nodes;
  if (r.status != Status::Identified) {
    j["fail_witness"] = r.fail_witness;
    j["caveat"] = "no certificate was found; this does not show that the effect is unidentifiable";
  }
  return j;
}

}  // namespace proxid
