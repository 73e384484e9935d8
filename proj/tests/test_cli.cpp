#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sys/wait.h>

#include "nif/io.hpp"
#include "nif/report.hpp"
#include "test_support.hpp"

using namespace nif;
using namespace nif::testing;

namespace {

const char* kHeader =
    "domains: A B\n"
    "actions: a@A\n"
    "states: s0 s1 s2\n"
    "initial: s0\n";

ParseError parse_error(const std::string& text) {
  try {
    parse_system(text);
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("expected a parse error");
  return ParseError(0, 0, "");
}

const Verdict& verdict(const Report& r, const std::string& property) {
  for (const auto& res : r.results)
    for (const auto& v : res.verdicts)
      if (v.property == property) return v;
  throw std::runtime_error("no verdict " + property);
}

struct Run {
  int code;
  std::string out;
};

Run nifcheck(const std::string& args) {
  const std::string cmd = std::string(NIFCHECK_PATH) + " " + args + " 2>&1";
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

}  // namespace

TEST_CASE("the bundled figure 1 parses to a 3-state, 2-action system") {
  const auto f1 = figure(1);
  CHECK(f1.state_count() == 3);
  CHECK(f1.signature().action_count() == 2);
  CHECK(f1.signature().domain_count() == 3);
}

TEST_CASE("parse errors carry line and column") {
  SUBCASE("determinism") {
    const auto e = parse_error(std::string(kHeader) + "obs-default: 0\ntrans: s0 a s1\ntrans: s0 a s2\n");
    CHECK(e.line() == 7);
    CHECK(e.column() == 13);
    CHECK(std::string(e.what()).find("nondeterministic transition") != std::string::npos);
  }
  SUBCASE("repeating a transition with the same target is accepted") {
    CHECK_NOTHROW(parse_system(std::string(kHeader) + "obs-default: 0\ntrans: s0 a s1\ntrans: s0 a s1\n"));
  }
  SUBCASE("unknown identifier") {
    const auto e = parse_error(std::string(kHeader) + "obs-default: 0\ntrans: s0 b s1\n");
    CHECK(e.line() == 6);
    CHECK(e.column() == 11);
    CHECK(std::string(e.what()).find("unknown action 'b'") != std::string::npos);
    const auto d = parse_error(std::string(kHeader) + "obs-default: 0\nedge: s0 A C\n");
    CHECK(d.line() == 6);
    CHECK(d.column() == 12);
  }
  SUBCASE("missing observation") {
    const auto e = parse_error(std::string(kHeader) + "obs: s0 A 0\n");
    CHECK(std::string(e.what()).find("observation missing for state s0 and domain B") != std::string::npos);
  }
  SUBCASE("malformed lines") {
    CHECK(parse_error("domains A\n").line() == 1);
    CHECK(parse_error(std::string(kHeader) + "obs-default: 0\nfrobnicate: 1\n").line() == 6);
    CHECK(parse_error("domains: A\nactions: a\n").line() == 2);
  }
}

TEST_CASE("missing transitions become self-loops") {
  const auto sys = parse_system(std::string(kHeader) + "obs-default: 0\ntrans: s0 a s1\n");
  CHECK(sys.state_name(sys.step(sys.state("s1"), sys.signature().action("a"))) == "s1");
  CHECK(sys.state_name(sys.step(sys.state("s2"), sys.signature().action("a"))) == "s2");
}

TEST_CASE("variants replace or remove edges") {
  const auto file = load_corpus("figure2.nif");
  CHECK(file.variant_names == std::vector<std::string>{"dotted"});
  const auto& dotted = file.select(std::string("dotted"));
  const auto D = dotted.signature().domain("D"), L = dotted.signature().domain("L");
  CHECK(dotted.permits(dotted.state("s1"), D, L));
  CHECK_FALSE(file.base.permits(file.base.state("s1"), D, L));
  CHECK_THROWS_AS(file.select(std::string("nope")), InputError);
}

TEST_CASE("parse and print round-trip on the corpus") {
  for (const char* name : {"figure1.nif", "figure2.nif", "figure3.nif", "figure4.nif"}) {
    const auto file = load_corpus(name);
    std::vector<const PolicyEnhancedSystem*> all{&file.base};
    for (const auto& [_, v] : file.variants) all.push_back(&v);
    for (const auto* sys : all) {
      const std::string text = print_system(*sys);
      CHECK(structurally_equal(parse_system(text), *sys));
      CHECK(print_system(parse_system(text)) == text);
    }
  }
  std::mt19937 rng(5);
  for (int i = 0; i < 20; ++i) {
    const auto sys = random_system(rng);
    CHECK(structurally_equal(parse_system(print_system(sys)), sys));
  }
}

TEST_CASE("run_checks reproduces the figure examples") {
  RunOptions opts;
  opts.properties = {"mayta", "unwinding"};
  const auto f1 = figure(1);
  const auto r1 = run_checks(f1, opts);
  CHECK(verdict(r1, "mayta").outcome == Outcome::BoundedSecure);
  const auto& unw = verdict(r1, "unwinding");
  REQUIRE(unw.insecure());
  CHECK(f1.signature().format_trace(unw.witness->traces[0]) == "pa");
  CHECK(f1.signature().format_trace(unw.witness->traces[1]) == "a");
  CHECK(exit_code(r1) == 1);

  opts.properties = {"isec", "unwinding"};
  const auto f3 = figure(3);
  const auto r3 = run_checks(f3, opts);
  const auto& is = verdict(r3, "isec");
  REQUIRE(is.insecure());
  CHECK(f3.signature().format_trace(is.witness->traces[0]) == "hd");
  CHECK(f3.signature().format_trace(is.witness->traces[1]) == "d");
  CHECK(f3.signature().domain_name(is.witness->domains[0]) == "L");
  CHECK(verdict(r3, "unwinding").outcome == Outcome::BoundedSecure);

  opts.properties = {"unwinding", "certify"};
  CHECK(exit_code(run_checks(f3, opts)) == 0);
  opts.properties = {"certify"};
  CHECK(exit_code(run_checks(f1, opts)) == 3);

  opts.properties = {"bogus"};
  CHECK_THROWS_AS(run_checks(f1, opts), InputError);
  opts.properties = {"gk"};
  CHECK_THROWS_AS(run_checks(f1, opts), InputError);
  opts.policy_domain = "P";
  CHECK(verdict(run_checks(f1, opts), "gk").insecure());
}

TEST_CASE("every property runs and its witnesses replay") {
  RunOptions opts;
  opts.depth = 5;
  opts.properties = known_properties();
  for (int f = 1; f <= 4; ++f) {
    const auto sys = figure(f);
    opts.policy_domain = sys.signature().domain_name(make_id<DomainId>(0));
    const auto rep = run_checks(sys, opts);
    CHECK(rep.results.size() == known_properties().size());
    for (const auto& res : rep.results)
      for (const auto& v : res.verdicts) {
        if (!v.insecure() || !v.witness) continue;
        const auto& w = *v.witness;
        // Relation-based witnesses: same key, different observations.
        if (w.traces.size() == 2 && w.domains.size() == 1 && w.states.empty()) {
          const auto u = w.domains[0];
          CHECK_MESSAGE(sys.obs(u, sys.run(w.traces[0])) != sys.obs(u, sys.run(w.traces[1])), v.property);
        }
        if (w.purged) {
          const auto u = w.domains[0];
          CHECK(sys.obs(u, sys.run(w.traces[0])) != sys.obs(u, sys.run(*w.purged)));
        }
      }
  }
}

TEST_CASE("JSON report fields") {
  RunOptions opts;
  opts.depth = 4;
  opts.properties = {"unwinding", "drm"};
  const auto f1 = figure(1);
  auto rep = run_checks(f1, opts);
  rep.input = "figure1.nif";
  rep.digest = input_digest("abc");
  const auto j = to_json(rep, f1);
  CHECK(j["tool"] == "nifcheck");
  CHECK(j["version"] == kToolVersion);
  CHECK(j["digest"] == input_digest("abc"));
  CHECK(j["depth"] == 4);
  CHECK(j["exit_code"] == 1);
  REQUIRE(j["verdicts"].is_array());
  const auto& v0 = j["verdicts"][0];
  CHECK(v0["property"] == "unwinding");
  CHECK(v0["outcome"] == "INSECURE");
  CHECK(v0["witness"]["traces"] == nlohmann::ordered_json::array({"pa", "a"}));
  CHECK(v0["witness"]["domains"] == nlohmann::ordered_json::array({"B"}));
  bool saw_drm = false;
  for (const auto& v : j["verdicts"]) saw_drm |= v["property"] == "drm-mustta" && v["outcome"] == "INCONCLUSIVE";
  CHECK(saw_drm);
  REQUIRE(j.contains("drm"));
  REQUIRE(j["drm"].size() == 1);
  CHECK(j["drm"][0]["conditions"].size() == 7);
  CHECK(j["drm"][0]["exhaustive"] == false);
  CHECK(input_digest("abc") != input_digest("abd"));
  CHECK(input_digest("") == "cbf29ce484222325");
  CHECK(to_text(rep, f1).find("unwinding") != std::string::npos);
}

TEST_CASE("the nifcheck binary: exit codes and outputs") {
  const std::string c = corpus_dir();
  auto r = nifcheck(c + "/figure1.nif --property mayta,unwinding --depth 6");
  CHECK(r.code == 1);
  CHECK(r.out.find("INSECURE") != std::string::npos);
  r = nifcheck(c + "/figure3.nif --property unwinding --depth 6");
  CHECK(r.code == 0);
  r = nifcheck(c + "/figure1.nif --property certify");
  CHECK(r.code == 3);
  r = nifcheck(c + "/does-not-exist.nif");
  CHECK(r.code == 2);
  r = nifcheck(c + "/figure1.nif --property nonsense");
  CHECK(r.code == 2);
  r = nifcheck(c + "/figure4.nif --variant prime --property mayta --depth 8 --json");
  CHECK(r.code == 1);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["variant"] == "prime");
  CHECK(j["verdicts"][0]["witness"]["traces"][0] == "aba");
  r = nifcheck(c + "/capability.cap --property locality,drm --depth 3");
  CHECK(r.code == 0);
  r = nifcheck(c + "/capability.cap --replay " + c + "/narrative.trace");
  CHECK(r.code == 0);
  CHECK(r.out.find("q{S={n,n_p};O={n-,n_p+};m=1;in=[1]}") != std::string::npos);
  r = nifcheck(c + "/figure1.nif --print");
  CHECK(r.code == 0);
  CHECK(structurally_equal(parse_system(r.out), figure(1)));
}
