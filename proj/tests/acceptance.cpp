// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails or exceeds its time limit.

#include <chrono>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>
#include <sstream>

#include "nif/access_control.hpp"
#include "nif/capability.hpp"
#include "nif/checkers.hpp"
#include "nif/io.hpp"
#include "nif/purge.hpp"
#include "nif/ta_tree.hpp"
#include "nif/unwinding.hpp"
#include "test_support.hpp"

using namespace nif;
using namespace nif::testing;

namespace {

std::string g_corpus;

struct Check {
  bool pass = true;
  std::vector<std::string> problems;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (problems.size() < 5) problems.push_back(what);
    }
  }
};

// INSECURE verdicts from criteria 1-4, replayed by criterion 10.
struct Emitted {
  std::shared_ptr<PolicyEnhancedSystem> sys;
  Verdict verdict;
};
std::vector<Emitted> g_emitted;

PolicyEnhancedSystem load(const std::string& file, const std::optional<std::string>& variant = std::nullopt) {
  return parse_system_file(read_file(g_corpus + "/" + file)).select(variant);
}

Verdict record(const PolicyEnhancedSystem& sys, Verdict v) {
  if (v.insecure()) g_emitted.push_back({std::make_shared<PolicyEnhancedSystem>(sys), v});
  return v;
}

std::string fmt(const PolicyEnhancedSystem& sys, const Trace& t) { return sys.signature().format_trace(t); }
std::string dom(const PolicyEnhancedSystem& sys, DomainId u) { return sys.signature().domain_name(u); }

bool witness_is(const PolicyEnhancedSystem& sys, const Verdict& v, std::vector<std::string> traces,
                std::vector<std::string> domains) {
  if (!v.insecure() || !v.witness) return false;
  std::vector<std::string> t, d;
  for (const auto& x : v.witness->traces) t.push_back(fmt(sys, x));
  for (auto u : v.witness->domains) d.push_back(dom(sys, u));
  return t == traces && d == domains;
}

std::vector<PolicyEnhancedSystem> suite24() {
  std::vector<PolicyEnhancedSystem> out;
  for (int f = 1; f <= 4; ++f) out.push_back(load("figure" + std::to_string(f) + ".nif"));
  for (auto& s : random_suite()) out.push_back(s);
  return out;
}

Check criterion1() {
  Check c;
  const auto f1 = load("figure1.nif");
  const auto may = record(f1, check_ta_may_security(f1, 6));
  c.require(may.outcome == Outcome::BoundedSecure && !may.witness, "ta-diamond not BOUNDED_SECURE without witness");
  const auto unw = record(f1, check_unwinding_security(f1, 6));
  c.require(witness_is(f1, unw, {"pa", "a"}, {"B"}), "unwinding witness is not (pa, a, B)");
  const auto must = record(f1, check_ta_must_security(f1, 6));
  c.require(witness_is(f1, must, {"pa", "a"}, {"B"}), "ta-box witness is not (pa, a, B)");
  const auto lp = record(f1, check_lpurge_security(f1, 6));
  c.require(witness_is(f1, lp, {"pa"}, {"B"}) && lp.witness->purged && fmt(f1, *lp.witness->purged) == "a",
            "Lpurge witness is not (pa, B) purged to a");
  return c;
}

Check criterion2() {
  Check c;
  const auto dotted = load("figure2.nif", std::string("dotted"));
  const auto plain = load("figure2.nif");
  const auto d = record(dotted, check_lpurge_security(dotted, 6));
  c.require(witness_is(dotted, d, {"hd"}, {"L"}) && d.witness->purged && fmt(dotted, *d.witness->purged) == "d",
            "dotted Lpurge witness is not (hd, L) purged to d");
  const auto p = record(plain, check_lpurge_security(plain, 6));
  c.require(p.outcome == Outcome::BoundedSecure, "Lpurge without the dotted edge is not BOUNDED_SECURE");
  return c;
}

Check criterion3() {
  Check c;
  const auto f3 = load("figure3.nif");
  const auto is = record(f3, check_i_security(f3, 6));
  c.require(witness_is(f3, is, {"hd", "d"}, {"L"}) && f3.state_name(is.witness->states.at(0)) == "s0",
            "i-security witness is not (s0, hd, d, L)");
  c.require(record(f3, check_unwinding_security(f3, 6)).outcome == Outcome::BoundedSecure,
            "unwinding not BOUNDED_SECURE");
  c.require(state_unwinding_check(f3, StateUnwindingMode::Box).outcome == Outcome::CertifiedSecure,
            "box state unwinding not CERTIFIED_SECURE");
  c.require(record(f3, check_locality(f3, 6)).outcome == Outcome::BoundedSecure, "locality fails");
  return c;
}

Check criterion4() {
  Check c;
  const auto f4 = load("figure4.nif");
  const auto f4p = load("figure4.nif", std::string("prime"));
  c.require(record(f4, check_ta_may_security(f4, 8)).outcome == Outcome::BoundedSecure,
            "ta-diamond under the first policy not BOUNDED_SECURE");
  const auto loc = record(f4, check_locality(f4, 8));
  c.require(witness_is(f4, loc, {"ab", "ba"}, {"A", "B"}), "locality witness is not (ab, ba, A, B)");
  const auto may = record(f4p, check_ta_may_security(f4p, 8));
  c.require(witness_is(f4p, may, {"aba", "baa"}, {"B"}), "ta-diamond witness under the second policy is not (aba, baa, B)");
  c.require(policy_leq(f4, f4p, 8), "policy_leq is false");
  return c;
}

Check criterion5() {
  Check c;
  for (const auto& sys : suite24()) {
    const TraceSpace space(sys, 5);
    const auto rep = check_theorem_mustunwind(space, 1);
    c.require(rep.saturated && rep.interior_mismatches == 0,
              std::to_string(rep.interior_mismatches) + " interior mismatches");
  }
  return c;
}

Check criterion6() {
  Check c;
  const std::size_t k = 5;
  for (const auto& raw : suite24()) {
    const auto sys = normalize_inactive(raw);
    const TraceSpace space(sys, k);
    TreeTable trees;
    const auto may = partitions_from(ta_may_table(space, trees), space);
    const auto unw = unwinding_partition(space);
    const std::size_t interior = space.level_begin(k);
    for (std::size_t u = 0; u < may.size(); ++u) {
      // Class-wise refinement on interior traces: same ta-diamond tree
      // implies unwinding-related.
      std::map<TraceId, TraceId> to_unw;
      for (std::size_t i = 0; i < interior; ++i) {
        const auto t = make_id<TraceId>(i);
        const auto r = unw.partitions()[u].find(t);
        auto [it, fresh] = to_unw.try_emplace(may[u].find(t), r);
        c.require(fresh || it->second == r, "ta-diamond class split by the unwinding relation");
      }
    }
    const bool box = !check_unwinding_security(raw, 4).insecure();
    const bool dia = !check_ta_may_security(raw, 4).insecure();
    const bool lp = !check_lpurge_security(raw, 4).insecure();
    const bool is = !check_i_security(raw, 4).insecure();
    c.require(!box || dia, "ta-box secure but not ta-diamond secure");
    c.require(!box || lp, "ta-box secure but not Lpurge secure");
    c.require(!is || lp, "i-secure but not Lpurge secure");

    // The same system under its initial policy everywhere.
    const auto st = normalize_inactive(raw.with_edges(std::vector<EdgeSet>(raw.state_count(), raw.edges(raw.initial()))));
    const TraceSpace sspace(st, 4);
    TreeTable strees;
    const auto p_ta = partitions_from(ta_static_table(sspace, strees, st.edges(st.initial())), sspace);
    const auto p_may = partitions_from(ta_may_table(sspace, strees), sspace);
    const auto p_unw = unwinding_partition(sspace);
    for (std::size_t u = 0; u < p_ta.size(); ++u)
      c.require(p_ta[u] == p_may[u] && p_may[u] == p_unw.partitions()[u], "static partitions differ");
  }
  return c;
}

Check criterion7() {
  Check c;
  const std::size_t k = 4;
  std::mt19937 rng(777);
  int found = 0;
  while (found < 20) {
    const auto sys = normalize_inactive(random_system(rng));
    if (!check_locality(sys, k).insecure()) continue;
    ++found;
    const auto out = restrict_to_local(sys, k);
    c.require(policy_leq(out, sys, k), "restricted policy not below the input");
    // ta-diamond trees of a trace depend only on its prefixes, so locality
    // at depth k-1 is locality on the interior traces of the depth-k space.
    c.require(!check_locality(out, k - 1).insecure(), "restricted policy not local on interior traces");
    const TraceSpace s_in(sys, k), s_out(out, k);
    const auto u_in = unwinding_partition(s_in), u_out = unwinding_partition(s_out);
    const std::size_t interior = s_in.level_begin(k);
    for (std::size_t u = 0; u < sys.signature().domain_count(); ++u) {
      const auto du = make_id<DomainId>(u);
      bool secure_in = true, secure_out = true;
      for (std::size_t i = 0; i < interior; ++i)
        for (std::size_t j = i + 1; j < interior; ++j) {
          const auto a = make_id<TraceId>(i), b = make_id<TraceId>(j);
          if (u_in.partition(du).same(a, b) && sys.obs(du, s_in.state(a)) != sys.obs(du, s_in.state(b)))
            secure_in = false;
          if (u_out.partition(du).same(a, b) && out.obs(du, s_out.state(a)) != out.obs(du, s_out.state(b)))
            secure_out = false;
        }
      c.require(secure_in == secure_out, "interior unwinding verdicts differ");
    }
  }
  return c;
}

Check criterion8() {
  Check c;
  const auto f3 = ac_complete_construct(load("figure3.nif"), 4);
  const auto r3 = check_drm(f3, 4, true);
  c.require(r3.base_conditions_hold() && r3.holds(DrmCondition::Drm5Strong), "figure 3 construction fails a condition");
  const auto f1sys = load("figure1.nif");
  const auto f1 = ac_complete_construct(f1sys, 4);
  const auto r1 = check_drm(f1, 4, true);
  c.require(r1.base_conditions_hold(), "figure 1 construction fails DRM-1..6");
  const auto& strong = r1.line(DrmCondition::Drm5Strong);
  c.require(!strong.holds && strong.witness, "figure 1 construction satisfies DRM-5'");
  if (strong.witness) {
    // The witness states are unfold states, named by their traces; they must
    // form the locality witness of the system.
    const auto loc = check_locality(f1sys, 4);
    const auto& w = *strong.witness;
    c.require(loc.witness && f1.base().state_name(w.states.at(0)) == fmt(f1sys, loc.witness->traces[0]) &&
                  f1.base().state_name(w.states.at(1)) == fmt(f1sys, loc.witness->traces[1]),
              "DRM-5' witness is not the locality witness");
  }
  return c;
}

Check criterion9() {
  using namespace nif::cap;
  Check c;
  const auto cfg = parse_cap_config(read_file(g_corpus + "/capability_full.cap"));
  c.require(cfg.alphabet.size() == 64, "full alphabet does not have 64 actions");
  const std::size_t k = 4;
  const auto built = build_pes(cfg, k);
  const auto sys = capability_drm_interpretation(built, cfg);
  const auto rep = check_drm(sys, k, true);
  for (const auto& l : rep.lines) c.require(l.holds, describe(l, sys));
  c.require(check_locality(built.pes, k).outcome == Outcome::BoundedSecure, "associated policy not local");
  c.require(check_unwinding_security(built.pes, k).outcome == Outcome::BoundedSecure, "unwinding not BOUNDED_SECURE");

  auto alphabet = cfg.alphabet;
  for (std::size_t p = 0; p < cfg.tags.process_count(); ++p)
    alphabet.push_back(data_action(p, "mix", [](const ObjView& v) {
      DataObjects d = v.data;
      d.message = v.data.in.empty() ? "0" : v.data.in.front();
      d.named["s"] = std::to_string(v.secrecy ^ v.caps);
      return d;
    }));
  std::mt19937 rng(9);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  for (int run = 0; run < 10000; ++run) {
    auto s = cfg.initial;
    for (int step = 0; step < 12; ++step) {
      const auto& a = alphabet[pick(rng)];
      const auto t = cap_step(cfg.tags, s, a);
      for (std::size_t q = 0; q < s.procs.size(); ++q) {
        if (q == a.process) continue;
        const bool flow = (s.procs[a.process].secrecy & ~s.procs[q].secrecy) == 0;
        if (t.procs[q].data.in != s.procs[q].data.in || t.procs[q].caps != s.procs[q].caps)
          c.require(flow, "guard soundness violated by " + action_name(a, cfg.tags));
      }
      if (a.kind == ActionKind::Data) {
        auto expect = s;
        expect.procs[a.process].data = t.procs[a.process].data;
        c.require(t == expect, "data action changed objects outside Data_p");
      }
      s = t;
    }
  }
  return c;
}

struct Plain {
  std::shared_ptr<Plain> l, r;
  std::uint32_t a = 0;
};

bool plain_equal(const std::shared_ptr<Plain>& x, const std::shared_ptr<Plain>& y) {
  if (!x || !y) return !x && !y;
  return x->a == y->a && plain_equal(x->l, y->l) && plain_equal(x->r, y->r);
}

bool replays(const PolicyEnhancedSystem& sys, const Verdict& v) {
  const auto& w = *v.witness;
  if (!w.states.empty() && w.traces.size() == 2 && w.domains.size() == 1) {  // i-security
    const StateId s = w.states[0];
    return sys.obs(w.domains[0], sys.run_from(s, w.traces[0])) != sys.obs(w.domains[0], sys.run_from(s, w.traces[1]));
  }
  if (w.purged)
    return sys.obs(w.domains[0], sys.run(w.traces[0])) != sys.obs(w.domains[0], sys.run(*w.purged));
  if (w.traces.size() == 2 && w.domains.size() == 2)  // locality: the edge differs
    return sys.permits(sys.run(w.traces[0]), w.domains[0], w.domains[1]) !=
           sys.permits(sys.run(w.traces[1]), w.domains[0], w.domains[1]);
  if (w.traces.size() == 2 && w.domains.size() == 1)
    return sys.obs(w.domains[0], sys.run(w.traces[0])) != sys.obs(w.domains[0], sys.run(w.traces[1]));
  return false;
}

Check criterion10() {
  Check c;
  std::mt19937 rng(1234);
  TreeTable table;
  std::bernoulli_distribution stop(0.35);
  std::uniform_int_distribution<std::uint32_t> action(0, 1);
  std::function<std::pair<TreeId, std::shared_ptr<Plain>>(int)> gen = [&](int depth) {
    if (depth == 0 || stop(rng)) return std::make_pair(TreeTable::leaf(), std::shared_ptr<Plain>());
    auto l = gen(depth - 1);
    auto r = gen(depth - 1);
    const std::uint32_t a = action(rng);
    return std::make_pair(table.node(l.first, r.first, make_id<ActionId>(a)),
                          std::make_shared<Plain>(Plain{l.second, r.second, a}));
  };
  std::vector<std::pair<TreeId, std::shared_ptr<Plain>>> trees;
  for (int i = 0; i < 10000; ++i) trees.push_back(gen(4));
  std::uniform_int_distribution<std::size_t> pick(0, trees.size() - 1);
  for (const auto& x : trees) {
    const auto& y = trees[pick(rng)];
    c.require((x.first == y.first) == plain_equal(x.second, y.second), "tree id equality differs from structure");
  }

  for (const char* name : {"figure1.nif", "figure2.nif", "figure3.nif", "figure4.nif"}) {
    const auto file = parse_system_file(read_file(g_corpus + "/" + name));
    std::vector<const PolicyEnhancedSystem*> all{&file.base};
    for (const auto& [_, v] : file.variants) all.push_back(&v);
    for (const auto* sys : all)
      c.require(structurally_equal(parse_system(print_system(*sys)), *sys), std::string("round trip fails on ") + name);
  }

  c.require(!g_emitted.empty(), "criteria 1-4 emitted no INSECURE verdicts");
  for (const auto& e : g_emitted)
    c.require(e.verdict.witness && replays(*e.sys, e.verdict), "witness of " + e.verdict.property + " does not replay");
  return c;
}

struct Criterion {
  int number;
  const char* text;
  double limit_seconds;
  Check (*run)();
};

}  // namespace

int main(int argc, char** argv) {
  g_corpus = argc > 1 ? argv[1] : corpus_dir();
  const std::vector<Criterion> criteria = {
      {1, "figure 1: ta-diamond secure, unwinding (pa, a, B), Lpurge (pa, B) -> a", 5, criterion1},
      {2, "figure 2: Lpurge non-monotonicity (hd, L) -> d", 5, criterion2},
      {3, "figure 3: i-security (s0, hd, d, L), unwinding secure, box certificate, locality", 5, criterion3},
      {4, "figure 4: locality (ab, ba, A, B), prime ta-diamond (aba, baa, B), policy order", 10, criterion4},
      {5, "unwinding relations equal ta-box equality on interior traces (k=5, m=1, 24 systems)", 60, criterion5},
      {6, "refinement and implication suite on 24 systems", 60, criterion6},
      {7, "restrict_to_local on 20 random nonlocal policies (depth 4)", 60, criterion7},
      {8, "access-control completeness round trip on figures 3 and 1", 10, criterion8},
      {9, "capability system end to end (full alphabet, depth 4)", 120, criterion9},
      {10, "hash-consing, parse/print round trip, witness replay", 60, criterion10},
  };
  int failures = 0;
  for (const auto& cr : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Check result;
    try {
      result = cr.run();
    } catch (const std::exception& e) {
      result.pass = false;
      result.problems.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > cr.limit_seconds) {
      result.pass = false;
      std::ostringstream os;
      os << "time limit " << cr.limit_seconds << " s exceeded";
      result.problems.push_back(os.str());
    }
    std::printf("[%s] %d %s (%.2f s)\n", result.pass ? "PASS" : "FAIL", cr.number, cr.text, secs);
    for (const auto& p : result.problems) std::printf("       %s\n", p.c_str());
    std::fflush(stdout);
    failures += result.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
