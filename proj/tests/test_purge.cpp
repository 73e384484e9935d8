#include <doctest.h>

#include "nif/checkers.hpp"
#include "nif/comparison.hpp"
#include "nif/purge.hpp"
#include "test_support.hpp"

using namespace nif;
using namespace nif::testing;

namespace {

std::vector<PolicyEnhancedSystem> systems_under_test() {
  std::vector<PolicyEnhancedSystem> out;
  for (int f = 1; f <= 4; ++f) out.push_back(figure(f));
  out.push_back(figure(2, "dotted"));
  out.push_back(figure(4, "prime"));
  for (auto& s : random_suite(30, 11)) out.push_back(s);
  return out;
}

}  // namespace

TEST_CASE("ta-diamond table matches the recursive definition") {
  for (const auto& sys : systems_under_test()) {
    const std::size_t k = 4;
    const TraceSpace space(sys, k);
    TreeTable trees;
    const auto table = ta_may_table(space, trees);
    for (std::size_t i = 0; i < space.size(); ++i) {
      const auto t = make_id<TraceId>(i);
      const Trace trace = space.trace(t);
      for (std::size_t u = 0; u < sys.signature().domain_count(); ++u) {
        const auto du = make_id<DomainId>(u);
        const std::string expect = naive_ta(sys, trace, du, nullptr);
        CHECK(trees.to_string(table.at(t, du), sys.signature()) == expect);
        CHECK(ta_may(trees, sys, trace, du) == table.at(t, du));
      }
    }
  }
}

TEST_CASE("static ta table matches the recursive definition with the initial edges") {
  for (const auto& sys : systems_under_test()) {
    const TraceSpace space(sys, 4);
    TreeTable trees;
    const EdgeSet& e = sys.edges(sys.initial());
    const auto table = ta_static_table(space, trees, e);
    for (std::size_t i = 0; i < space.size(); ++i) {
      const auto t = make_id<TraceId>(i);
      for (std::size_t u = 0; u < sys.signature().domain_count(); ++u) {
        const auto du = make_id<DomainId>(u);
        CHECK(trees.to_string(table.at(t, du), sys.signature()) == naive_ta(sys, space.trace(t), du, &e));
        CHECK(ta_static(trees, sys.signature(), e, space.trace(t), du) == table.at(t, du));
      }
    }
  }
}

TEST_CASE("figure 1 purge values") {
  const auto f1 = figure(1);
  TreeTable trees;
  const auto B = f1.signature().domain("B");
  CHECK(trees.to_string(ta_may(trees, f1, tr(f1, "a"), B), f1.signature()) == "e");
  CHECK(trees.to_string(ta_may(trees, f1, tr(f1, "pa"), B), f1.signature()) == "(e,e,a)");
  CHECK(trees.to_string(ta_may(trees, f1, tr(f1, "p"), B), f1.signature()) == "e");
}

TEST_CASE("f-security verdicts agree with brute-force pair checks") {
  for (const auto& sys : systems_under_test()) {
    const std::size_t k = 4;
    const bool may_secure = brute_secure(sys, k, [&](const Trace& t, DomainId u) { return naive_ta(sys, t, u, nullptr); });
    const EdgeSet e = normalize_inactive(sys).edges(sys.initial());
    const auto clean = normalize_inactive(sys);
    const bool ta_secure = brute_secure(sys, k, [&](const Trace& t, DomainId u) { return naive_ta(clean, t, u, &e); });
    CHECK(check_ta_may_security(sys, k).insecure() == !may_secure);
    CHECK(check_ta_static_security(sys, k).insecure() == !ta_secure);
  }
}

TEST_CASE("insecure f-security witnesses replay") {
  for (const auto& sys : systems_under_test()) {
    const auto v = check_ta_may_security(sys, 4);
    if (!v.insecure()) continue;
    REQUIRE(v.witness.has_value());
    const auto& w = *v.witness;
    REQUIRE(w.traces.size() == 2);
    REQUIRE(w.domains.size() == 1);
    const auto u = w.domains[0];
    CHECK(naive_ta(sys, w.traces[0], u, nullptr) == naive_ta(sys, w.traces[1], u, nullptr));
    CHECK(sys.obs(u, sys.run(w.traces[0])) != sys.obs(u, sys.run(w.traces[1])));
  }
}

TEST_CASE("views collapse stuttering observations and keep own actions") {
  const auto f1 = figure(1);
  const auto B = f1.signature().domain("B");
  const auto A = f1.signature().domain("A");
  CHECK(view(f1, tr(f1, "ap"), B) == view(f1, tr(f1, "e"), B));
  CHECK(view(f1, tr(f1, "pa"), B) != view(f1, tr(f1, "e"), B));
  CHECK(view(f1, tr(f1, "a"), A).size() == 3);  // obs, a, obs
  const TraceSpace space(f1, 3);
  const auto ids = view_ids(space, B);
  for (std::size_t i = 0; i < space.size(); ++i)
    for (std::size_t j = 0; j < space.size(); ++j) {
      const auto ti = make_id<TraceId>(i), tj = make_id<TraceId>(j);
      CHECK((ids[i] == ids[j]) == (view(f1, space.trace(ti), B) == view(f1, space.trace(tj), B)));
    }
}

TEST_CASE("dsrc, Lpurge and dipurge on the figures") {
  const auto f1 = figure(1);
  const auto B = f1.signature().domain("B");
  CHECK(lpurge(f1, tr(f1, "pa"), B, f1.initial()) == tr(f1, "a"));
  const auto src = dsrc(f1, tr(f1, "pa"), B, f1.initial());
  CHECK(src[idx(f1.signature().domain("A"))]);
  CHECK_FALSE(src[idx(f1.signature().domain("P"))]);
  CHECK(src[idx(B)]);

  const auto f2d = figure(2, "dotted");
  const auto L = f2d.signature().domain("L");
  CHECK(lpurge(f2d, tr(f2d, "hd"), L, f2d.initial()) == tr(f2d, "d"));
  const auto f3 = figure(3);
  CHECK(dipurge(f3, tr(f3, "hd"), f3.signature().domain("L"), f3.initial()) == tr(f3, "d"));
}

TEST_CASE("partitions from a purge table group equal trees") {
  const auto f4 = figure(4);
  const TraceSpace space(f4, 5);
  TreeTable trees;
  const auto table = ta_may_table(space, trees);
  const auto parts = partitions_from(table, space);
  REQUIRE(parts.size() == f4.signature().domain_count());
  for (std::size_t u = 0; u < parts.size(); ++u)
    for (std::size_t i = 0; i < space.size(); i += 3)
      for (std::size_t j = 0; j < space.size(); j += 5) {
        const auto ti = make_id<TraceId>(i), tj = make_id<TraceId>(j);
        const auto du = make_id<DomainId>(u);
        CHECK(parts[u].same(ti, tj) == (table.at(ti, du) == table.at(tj, du)));
      }
}
