#include <doctest.h>

#include "nif/access_control.hpp"
#include "nif/checkers.hpp"
#include "test_support.hpp"

using namespace nif;
using namespace nif::testing;

namespace {

// Domains A (action a) and B (no actions). a moves s0 to s1 and rewrites x.
// A reads and, when allowed, writes x; B only sees its own oset.
StructuredSystem writer(bool a_may_alter_x, bool oset_in_observe = true) {
  Signature sig({"A", "B"}, {{"a", "A"}});
  Automaton base(sig, {"s0", "s1"}, StateId{}, {make_id<StateId>(1), make_id<StateId>(1)});
  PolicyEnhancedSystem pes(base, {{"0", "-"}, {"1", "-"}}, {EdgeSet(2), EdgeSet(2)});
  const auto x = make_id<ObjectId>(0), oa = make_id<ObjectId>(1), ob = make_id<ObjectId>(2);
  const ObjectSet obs_a = oset_in_observe ? ObjectSet{x, oa} : ObjectSet{x};
  const std::string enc_a = oset_in_observe ? "{x,oset(A)}" : "{x}";
  StructuredSystem::Spec spec{pes,
                              {"x", "oset(A)", "oset(B)"},
                              {oa, ob},
                              {{"0", enc_a, "{oset(B)}"}, {"1", enc_a, "{oset(B)}"}},
                              {{obs_a, {ob}}, {obs_a, {ob}}},
                              {{a_may_alter_x ? ObjectSet{x} : ObjectSet{}, {}},
                               {a_may_alter_x ? ObjectSet{x} : ObjectSet{}, {}}}};
  return StructuredSystem(std::move(spec));
}

bool all_hold(const DrmReport& r, bool with_strong) {
  for (const auto& l : r.lines) {
    if (l.condition == DrmCondition::Drm5Strong && !with_strong) continue;
    if (!l.holds) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("condition names") {
  CHECK(std::string(to_string(DrmCondition::Drm1)) == "DRM-1");
  CHECK(std::string(to_string(DrmCondition::Drm5Strong)) == "DRM-5'");
  CHECK(std::string(to_string(DrmCondition::Drm6)) == "DRM-6");
}

TEST_CASE("a well-formed finite system is certified by the conditions") {
  const auto sys = writer(true);
  CHECK(sys.encode({make_id<ObjectId>(0), make_id<ObjectId>(1)}) == "{x,oset(A)}");
  CHECK_NOTHROW(sys.validate());
  const auto rep = check_drm(sys, 3, true);
  CHECK(rep.exhaustive);
  CHECK(rep.states_checked == 2);
  CHECK(all_hold(rep, true));
  const auto vs = derive_security_from_drm(rep, sys);
  REQUIRE(vs.size() == 2);
  CHECK(vs[0].property == "drm-mayta");
  CHECK(vs[1].property == "drm-mustta");
  for (const auto& v : vs) CHECK(v.outcome == Outcome::CertifiedSecure);
  // The certificate agrees with the direct checks.
  CHECK_FALSE(check_ta_may_security(sys.base(), 4).insecure());
  CHECK_FALSE(check_unwinding_security(sys.base(), 4).insecure());

  // At depth 0 the successor s1 lies outside the explored region.
  const auto shallow = check_drm(sys, 0, true);
  CHECK_FALSE(shallow.exhaustive);
  for (const auto& v : derive_security_from_drm(shallow, sys)) CHECK(v.outcome == Outcome::BoundedSecure);
}

TEST_CASE("an action writing an object outside its alter set violates DRM-3") {
  const auto sys = writer(false);
  const auto rep = check_drm(sys, 3, true);
  const auto& l = rep.line(DrmCondition::Drm3);
  CHECK_FALSE(l.holds);
  REQUIRE(l.witness.has_value());
  CHECK(sys.base().state_name(l.witness->states.at(0)) == "s0");
  CHECK(sys.base().signature().action_name(*l.witness->action) == "a");
  CHECK(sys.object_name(*l.witness->object) == "x");
  CHECK(describe(l, sys).find("DRM-3") != std::string::npos);
  const auto vs = derive_security_from_drm(rep, sys);
  for (const auto& v : vs) {
    CHECK(v.outcome == Outcome::Inconclusive);
    REQUIRE_FALSE(v.notes.empty());
    CHECK(v.notes[0].find("no certificate") == 0);
  }
}

TEST_CASE("structural invariants are checked before the conditions") {
  const auto missing_oset = writer(true, false);
  CHECK_THROWS_AS(missing_oset.validate(), StructuralError);
  CHECK_THROWS_AS(check_drm(missing_oset, 2, true), StructuralError);

  Signature sig({"A"}, {{"a", "A"}});
  Automaton base(sig, {"s0"}, StateId{}, {StateId{}});
  PolicyEnhancedSystem pes(base, {{"0"}}, {EdgeSet(1)});
  const auto o = make_id<ObjectId>(0);
  // oset contents disagree with the observe set.
  StructuredSystem wrong_contents({pes, {"oset(A)"}, {o}, {{"{}"}}, {{{o}}}, {{{}}}});
  CHECK_THROWS_AS(wrong_contents.validate(), StructuralError);
  StructuredSystem ok({pes, {"oset(A)"}, {o}, {{"{oset(A)}"}}, {{{o}}}, {{{}}}});
  CHECK_NOTHROW(ok.validate());
  CHECK_THROWS_AS(StructuredSystem({pes, {"oset(A)"}, {}, {{"x"}}, {{{o}}}, {{{}}}}), InputError);
}

TEST_CASE("dynacrel compares the contents of observed objects") {
  const auto sys = writer(true);
  const auto A = sys.base().signature().domain("A");
  const auto B = sys.base().signature().domain("B");
  const auto s0 = sys.base().state("s0"), s1 = sys.base().state("s1");
  CHECK(dynacrel(sys, A, s0, s0));
  CHECK_FALSE(dynacrel(sys, A, s0, s1));
  CHECK(dynacrel(sys, B, s0, s1));
}

TEST_CASE("equal oset contents force equal observe sets under dynacrel") {
  for (int f = 1; f <= 4; ++f) {
    const auto sys = ac_complete_construct(figure(f), 3);
    const auto& base = sys.base();
    for (std::size_t u = 0; u < base.signature().domain_count(); ++u) {
      const auto du = make_id<DomainId>(u);
      for (std::size_t a = 0; a < base.state_count(); ++a)
        for (std::size_t b = 0; b < base.state_count(); ++b) {
          const auto sa = make_id<StateId>(a), sb = make_id<StateId>(b);
          if (dynacrel(sys, du, sa, sb)) CHECK(sys.observe(du, sa) == sys.observe(du, sb));
        }
    }
  }
}

TEST_CASE("completeness construction on figure 3 passes every condition") {
  std::vector<std::string> notes;
  const auto sys = ac_complete_construct(figure(3), 4, &notes);
  CHECK(notes.empty());
  const auto rep = check_drm(sys, 4, true);
  CHECK(all_hold(rep, true));
  CHECK_FALSE(rep.exhaustive);
  const auto vs = derive_security_from_drm(rep, sys);
  REQUIRE(vs.size() == 2);
  for (const auto& v : vs) CHECK(v.outcome == Outcome::BoundedSecure);
}

TEST_CASE("completeness construction on figure 1 fails only the strong fifth condition") {
  const auto f1 = figure(1);
  const auto sys = ac_complete_construct(f1, 4);
  const auto rep = check_drm(sys, 4, true);
  CHECK(rep.base_conditions_hold());
  const auto& l = rep.line(DrmCondition::Drm5Strong);
  CHECK_FALSE(l.holds);
  REQUIRE(l.witness.has_value());
  // The states of the unfold are named by their traces: the witness is the
  // locality witness (e, p) lifted to the structured system.
  CHECK(sys.base().state_name(l.witness->states.at(0)) == "e");
  CHECK(sys.base().state_name(l.witness->states.at(1)) == "p");
  CHECK(describe(l, sys) == "DRM-5': fails (e, p, B, A)");
  const auto vs = derive_security_from_drm(rep, sys);
  CHECK(vs[0].outcome == Outcome::BoundedSecure);
  CHECK(vs[1].outcome == Outcome::Inconclusive);

  const auto weak = check_drm(sys, 4, false);
  CHECK_FALSE(weak.line(DrmCondition::Drm5Strong).checked);
  CHECK(weak.line(DrmCondition::Drm5Strong).scope == "not requested");
}

TEST_CASE("an insecure system yields a warning and a failing construction") {
  const auto f4p = figure(4, "prime");
  std::vector<std::string> notes;
  const auto sys = ac_complete_construct(f4p, 4, &notes);
  REQUIRE_FALSE(notes.empty());
  CHECK_FALSE(check_drm(sys, 4, false).base_conditions_hold());
}

TEST_CASE("a one-domain system") {
  Signature sig({"A"}, {{"a", "A"}, {"b", "A"}});
  Automaton base(sig, {"s0", "s1"}, StateId{},
                 {make_id<StateId>(1), StateId{}, StateId{}, make_id<StateId>(1)});
  const PolicyEnhancedSystem pes(base, {{"0"}, {"1"}}, {EdgeSet(1), EdgeSet(1)});
  const auto sys = ac_complete_construct(pes, 3);
  CHECK(sys.object_count() == 2);
  CHECK(sys.object_name(sys.oset(sig.domain("A"))) == "oset(A)");
  CHECK(all_hold(check_drm(sys, 3, true), true));
}

TEST_CASE("round trip: ta-diamond secure systems give constructions satisfying DRM-1..6") {
  std::vector<PolicyEnhancedSystem> systems;
  for (int f = 1; f <= 4; ++f) systems.push_back(figure(f));
  systems.push_back(figure(2, "dotted"));
  for (auto& s : random_suite(40, 31)) systems.push_back(s);
  int secure = 0;
  for (const auto& sys : systems) {
    const std::size_t k = 3;
    if (check_ta_may_security(sys, k).insecure()) continue;
    ++secure;
    std::vector<std::string> notes;
    const auto st = ac_complete_construct(sys, k, &notes);
    CHECK(notes.empty());
    CHECK(check_drm(st, k, false).base_conditions_hold());
  }
  CHECK(secure >= 10);
}

TEST_CASE("ta-box secure systems restricted to their local policy also satisfy DRM-5'") {
  int checked = 0;
  std::mt19937 rng(13);
  for (int i = 0; i < 60 && checked < 12; ++i) {
    const auto sys = random_system(rng);
    const std::size_t k = 3;
    if (check_unwinding_security(sys, k + 1).insecure()) continue;
    ++checked;
    const auto local = restrict_to_local(sys, k, k + 1);
    const auto st = ac_complete_construct(local, k);
    const auto rep = check_drm(st, k, true);
    CHECK(rep.base_conditions_hold());
    CHECK(rep.holds(DrmCondition::Drm5Strong));
  }
  CHECK(checked >= 5);
}
