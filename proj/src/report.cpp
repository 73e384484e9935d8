#include "nif/report.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>

#include "nif/trace_space.hpp"
#include "nif/unwinding.hpp"

namespace nif {

const std::vector<std::string>& known_properties() {
  static const std::vector<std::string> names{"ta",     "mayta", "mustta", "unwinding",          "locality", "static",
                                              "gk",     "lpurge", "isec",  "drm", "theorem-mustunwind", "certify"};
  return names;
}

std::string input_digest(std::string_view text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

Verdict theorem_verdict(const PolicyEnhancedSystem& sys, std::size_t depth, std::size_t margin) {
  const TraceSpace space(sys, depth);
  const TheoremReport rep = check_theorem_mustunwind(space, margin);
  Verdict v;
  v.property = "theorem-mustunwind";
  v.depth = depth;
  v.outcome = rep.agrees() ? Outcome::BoundedSecure : Outcome::Inconclusive;
  v.notes.push_back("unwinding and ta-box partitions compared on traces of length <= " +
                    std::to_string(depth > margin ? depth - margin : 0) + ": " +
                    std::to_string(rep.interior_mismatches) + " interior mismatch(es), " +
                    std::to_string(rep.boundary_mismatches) + " boundary mismatch(es)");
  if (!rep.saturated) v.notes.push_back("closure stopped before its fixpoint");
  if (!rep.samples.empty()) {
    const auto& m = rep.samples.front();
    Witness w;
    w.traces = {space.trace(m.a), space.trace(m.b)};
    w.domains = {m.domain};
    v.witness = w;
  }
  return v;
}

std::vector<Verdict> run_one(const std::string& name, const PolicyEnhancedSystem& sys, const RunOptions& o,
                             PropertyResult& out, const DrmSource& drm_source) {
  if (name == "ta") return {check_ta_static_security(sys, o.depth, o.exec)};
  if (name == "mayta") return {check_ta_may_security(sys, o.depth, o.exec)};
  if (name == "mustta") return {check_ta_must_security(sys, o.depth, o.exec)};
  if (name == "unwinding") return {check_unwinding_security(sys, o.depth, o.exec)};
  if (name == "locality") return {check_locality(sys, o.depth, o.locality)};
  if (name == "static") return {static_verdict(sys)};
  if (name == "lpurge") return {check_lpurge_security(sys, o.depth, o.exec)};
  if (name == "isec") return {check_i_security(sys, o.depth, o.exec)};
  if (name == "certify") return {state_unwinding_check(sys, o.mode)};
  if (name == "theorem-mustunwind") return {theorem_verdict(sys, o.depth, o.margin)};
  if (name == "gk") {
    if (!o.policy_domain) throw InputError("property gk needs --policy-domain");
    return {check_globally_known(sys, sys.signature().domain(*o.policy_domain), o.depth)};
  }
  if (name == "drm") {
    std::vector<std::string> notes;
    StructuredSystem ss = drm_source ? drm_source(notes) : ac_complete_construct(sys, o.depth, &notes);
    DrmReport rep = check_drm(ss, o.depth, true);
    auto verdicts = derive_security_from_drm(rep, ss);
    for (auto& v : verdicts) v.notes.insert(v.notes.begin(), notes.begin(), notes.end());
    out.drm = std::move(rep);
    out.structured.emplace(std::move(ss));
    return verdicts;
  }
  throw InputError("unknown property '" + name + "'");
}

}  // namespace

Report run_checks(const PolicyEnhancedSystem& sys, const RunOptions& options, const DrmSource& drm_source) {
  using clock = std::chrono::steady_clock;
  for (const auto& p : options.properties)
    if (std::find(known_properties().begin(), known_properties().end(), p) == known_properties().end())
      throw InputError("unknown property '" + p + "'");
  Report rep;
  rep.depth = options.depth;
  const auto start = clock::now();
  for (const auto& p : options.properties) {
    PropertyResult r;
    r.name = p;
    const auto t0 = clock::now();
    r.verdicts = run_one(p, sys, options, r, drm_source);
    r.seconds = std::chrono::duration<double>(clock::now() - t0).count();
    rep.results.push_back(std::move(r));
  }
  rep.seconds = std::chrono::duration<double>(clock::now() - start).count();
  return rep;
}

int exit_code(const Report& report) {
  bool inconclusive = false;
  for (const auto& r : report.results)
    for (const auto& v : r.verdicts) {
      if (v.outcome == Outcome::Insecure) return 1;
      if (v.outcome == Outcome::Inconclusive) inconclusive = true;
    }
  return inconclusive ? 3 : 0;
}

nlohmann::ordered_json to_json(const Verdict& v, const PolicyEnhancedSystem& sys) {
  const auto& sig = sys.signature();
  nlohmann::ordered_json j;
  j["property"] = v.property;
  j["outcome"] = to_string(v.outcome);
  if (v.witness) {
    const auto& w = *v.witness;
    nlohmann::ordered_json wj = nlohmann::ordered_json::object();
    if (!w.states.empty()) {
      wj["states"] = nlohmann::ordered_json::array();
      for (StateId s : w.states) wj["states"].push_back(sys.state_name(s));
    }
    if (!w.traces.empty()) {
      wj["traces"] = nlohmann::ordered_json::array();
      for (const auto& t : w.traces) wj["traces"].push_back(sig.format_trace(t));
    }
    if (!w.domains.empty()) {
      wj["domains"] = nlohmann::ordered_json::array();
      for (DomainId d : w.domains) wj["domains"].push_back(sig.domain_name(d));
    }
    if (w.purged) wj["purged"] = sig.format_trace(*w.purged);
    if (!w.observations.empty()) wj["observations"] = w.observations;
    j["witness"] = wj;
  } else {
    j["witness"] = nullptr;
  }
  j["depth"] = v.depth;
  j["notes"] = v.notes;
  return j;
}

nlohmann::ordered_json to_json(const DrmReport& r, const StructuredSystem& sys) {
  const auto& base = sys.base();
  nlohmann::ordered_json j;
  j["depth"] = r.depth;
  j["states_checked"] = r.states_checked;
  j["exhaustive"] = r.exhaustive;
  j["conditions"] = nlohmann::ordered_json::array();
  for (const auto& l : r.lines) {
    nlohmann::ordered_json lj;
    lj["condition"] = to_string(l.condition);
    lj["checked"] = l.checked;
    lj["holds"] = l.checked ? nlohmann::ordered_json(l.holds) : nlohmann::ordered_json(nullptr);
    lj["scope"] = l.scope;
    if (l.witness) {
      nlohmann::ordered_json wj;
      wj["states"] = nlohmann::ordered_json::array();
      for (StateId s : l.witness->states) wj["states"].push_back(base.state_name(s));
      if (l.witness->action) wj["action"] = base.signature().action_name(*l.witness->action);
      if (l.witness->object) wj["object"] = sys.object_name(*l.witness->object);
      wj["domains"] = nlohmann::ordered_json::array();
      for (DomainId d : l.witness->domains) wj["domains"].push_back(base.signature().domain_name(d));
      lj["witness"] = wj;
    } else {
      lj["witness"] = nullptr;
    }
    j["conditions"].push_back(lj);
  }
  return j;
}

nlohmann::ordered_json to_json(const Report& report, const PolicyEnhancedSystem& sys) {
  nlohmann::ordered_json j;
  j["tool"] = "nifcheck";
  j["version"] = kToolVersion;
  j["input"] = report.input;
  j["digest"] = report.digest;
  j["variant"] = report.variant ? nlohmann::ordered_json(*report.variant) : nlohmann::ordered_json(nullptr);
  j["depth"] = report.depth;
  j["verdicts"] = nlohmann::ordered_json::array();
  nlohmann::ordered_json drm = nlohmann::ordered_json::array();
  nlohmann::ordered_json timing = nlohmann::ordered_json::object();
  for (const auto& r : report.results) {
    for (const auto& v : r.verdicts) j["verdicts"].push_back(to_json(v, sys));
    if (r.drm && r.structured) drm.push_back(to_json(*r.drm, *r.structured));
    timing[r.name] = r.seconds;
  }
  if (!drm.empty()) j["drm"] = drm;
  j["notes"] = report.notes;
  timing["total"] = report.seconds;
  j["timing_seconds"] = timing;
  j["exit_code"] = exit_code(report);
  return j;
}

std::string to_text(const Report& report, const PolicyEnhancedSystem& sys) {
  std::ostringstream out;
  out << report.input << " (digest " << report.digest << ", depth " << report.depth;
  if (report.variant) out << ", variant " << *report.variant;
  out << ")\n";
  for (const auto& n : report.notes) out << "  note: " << n << '\n';
  for (const auto& r : report.results) {
    for (const auto& v : r.verdicts) {
      out << describe(v, sys) << '\n';
      for (const auto& n : v.notes) out << "  note: " << n << '\n';
    }
    if (r.drm && r.structured)
      for (const auto& l : r.drm->lines) out << "  " << describe(l, *r.structured) << '\n';
  }
  return out.str();
}

}  // namespace nif
