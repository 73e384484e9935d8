#include "nif/checkers.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <tuple>
#include <unordered_map>

#include "nif/comparison.hpp"
#include "nif/purge.hpp"

namespace nif {

namespace {

struct Prepared {
  PolicyEnhancedSystem sys;
  std::vector<std::string> notes;
};

Prepared prepare(const PolicyEnhancedSystem& in) {
  std::size_t removed = 0;
  Prepared p{normalize_inactive(in, &removed), {}};
  if (removed > 0)
    p.notes.push_back("removed " + std::to_string(removed) + " policy edge(s) leaving inactive domains");
  if (auto d = in.truncation_depth())
    p.notes.push_back("system is a bounded construction truncated at depth " + std::to_string(*d));
  return p;
}

Verdict finish(Verdict v, const Prepared& p) {
  v.notes.insert(v.notes.begin(), p.notes.begin(), p.notes.end());
  return v;
}

Verdict secure(const std::string& property, std::size_t depth) {
  Verdict v;
  v.property = property;
  v.depth = depth;
  v.outcome = Outcome::BoundedSecure;
  return v;
}

Verdict insecure(const std::string& property, std::size_t depth, Witness w) {
  Verdict v = secure(property, depth);
  v.outcome = Outcome::Insecure;
  v.witness = std::move(w);
  return v;
}

std::uint64_t key2(std::size_t x, std::size_t y) { return (static_cast<std::uint64_t>(x) << 32) | y; }

}  // namespace

Verdict check_ta_static_security(const PolicyEnhancedSystem& in, std::size_t depth, Exec exec) {
  const Prepared p = prepare(in);
  const TraceSpace space(p.sys, depth);
  TreeTable trees;
  const auto table = ta_static_table(space, trees, p.sys.edges(p.sys.initial()));
  Verdict v = check_f_security(partitions_from(table, space), space, ObsMode::FinalObs, "ta", exec);
  if (!check_static(p.sys)) v.notes.push_back("policy is not static; checked against the initial state's policy");
  return finish(std::move(v), p);
}

Verdict check_ta_may_security(const PolicyEnhancedSystem& in, std::size_t depth, Exec exec) {
  const Prepared p = prepare(in);
  const TraceSpace space(p.sys, depth);
  TreeTable trees;
  const auto table = ta_may_table(space, trees);
  return finish(check_f_security(partitions_from(table, space), space, ObsMode::FinalObs, "mayta", exec), p);
}

Verdict check_ta_must_security(const PolicyEnhancedSystem& in, std::size_t depth, Exec exec) {
  const Prepared p = prepare(in);
  const TraceSpace space(p.sys, depth);
  const auto unw = unwinding_partition(space);
  TreeTable trees;
  const auto table = ta_must_table(unw, trees);
  Verdict v = check_f_security(partitions_from(table, space), space, ObsMode::FinalObs, "mustta", exec);
  if (v.insecure()) {
    // The rule instance is preferred when its two traces also share a tree.
    if (auto w = unwinding_rule_witness(unw)) {
      const DomainId u = w->domains[0];
      if (table.at(space.id(w->traces[0]), u) == table.at(space.id(w->traces[1]), u)) v.witness = std::move(w);
    }
  }
  return finish(std::move(v), p);
}

Verdict check_unwinding_security(const PolicyEnhancedSystem& in, std::size_t depth, Exec exec) {
  const Prepared p = prepare(in);
  const TraceSpace space(p.sys, depth);
  const auto unw = unwinding_partition(space);
  Verdict v = check_f_security(unw.partitions(), space, ObsMode::FinalObs, "unwinding", exec);
  if (v.insecure()) {
    // Report the rule instance that joins the two traces directly.
    if (auto w = unwinding_rule_witness(unw)) v.witness = std::move(w);
  }
  const auto& st = unw.stats();
  v.notes.push_back("closure: " + std::to_string(st.dlr_merges) + " DLR merges, " + std::to_string(st.wsc_merges) +
                    " WSC merges, " + std::to_string(st.sweeps) + " sweeps" +
                    (unw.saturated() ? ", saturated" : ", not saturated"));
  return finish(std::move(v), p);
}

Verdict check_locality(const PolicyEnhancedSystem& in, std::size_t depth, LocalityVariant variant) {
  const Prepared p = prepare(in);
  const auto& sys = p.sys;
  const TraceSpace space(sys, depth);
  TreeTable trees;
  const auto may = ta_may_table(space, trees);
  const std::size_t nd = sys.signature().domain_count();
  const char* name = variant == LocalityVariant::Pairwise        ? "locality"
                     : variant == LocalityVariant::KnownToSender ? "locality-sender"
                                                                 : "locality-receiver";

  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::tuple<std::size_t, std::size_t, std::size_t, std::size_t> best{none, none, none, none};
  std::vector<std::pair<std::uint64_t, std::uint32_t>> order(space.size());
  for (std::size_t u = 0; u < nd; ++u) {
    for (std::size_t v = 0; v < nd; ++v) {
      if (u == v) continue;
      const auto du = make_id<DomainId>(u);
      const auto dv = make_id<DomainId>(v);
      // Sorting by (group, trace) puts each group's first member in front.
      for (std::size_t i = 0; i < space.size(); ++i) {
        const auto t = make_id<TraceId>(i);
        const std::size_t tu = idx(may.at(t, du));
        const std::size_t tv = idx(may.at(t, dv));
        const std::uint64_t key = variant == LocalityVariant::Pairwise        ? key2(tu, tv)
                                  : variant == LocalityVariant::KnownToSender ? key2(tu, 0)
                                                                              : key2(tv, 0);
        order[i] = {key, static_cast<std::uint32_t>(i)};
      }
      std::sort(order.begin(), order.end());
      for (std::size_t g = 0; g < order.size();) {
        std::size_t end = g + 1;
        while (end < order.size() && order[end].first == order[g].first) ++end;
        const TraceId f = make_id<TraceId>(order[g].second);
        const bool edge = sys.permits(space.state(f), du, dv);
        for (std::size_t j = g + 1; j < end; ++j) {
          if (sys.permits(space.state(make_id<TraceId>(order[j].second)), du, dv) != edge) {
            best = std::min(best, std::make_tuple(idx(f), std::size_t{order[j].second}, u, v));
            break;
          }
        }
        g = end;
      }
    }
  }
  if (std::get<0>(best) == none) return finish(secure(name, depth), p);
  const auto [a, b, u, v] = best;
  Witness w;
  w.traces = {space.trace(make_id<TraceId>(a)), space.trace(make_id<TraceId>(b))};
  w.domains = {make_id<DomainId>(u), make_id<DomainId>(v)};
  auto atom = [&](std::size_t t) {
    return sys.permits(space.state(make_id<TraceId>(t)), make_id<DomainId>(u), make_id<DomainId>(v)) ? "edge"
                                                                                                        : "no-edge";
  };
  w.observations = {atom(a), atom(b)};
  return finish(insecure(name, depth, std::move(w)), p);
}

std::optional<std::pair<StateId, StateId>> static_counterexample(const PolicyEnhancedSystem& sys) {
  const EdgeSet& first = sys.edges(sys.initial());
  for (StateId s : sys.reachable())
    if (!(sys.edges(s) == first)) return std::make_pair(sys.initial(), s);
  return std::nullopt;
}

bool check_static(const PolicyEnhancedSystem& sys) { return !static_counterexample(sys).has_value(); }

Verdict static_verdict(const PolicyEnhancedSystem& in) {
  const Prepared p = prepare(in);
  Verdict v = secure("static", 0);
  v.notes.push_back("checked exactly over all reachable states");
  if (auto cx = static_counterexample(p.sys)) {
    v.outcome = Outcome::Insecure;
    Witness w;
    w.states = {cx->first, cx->second};
    v.witness = std::move(w);
  }
  return finish(std::move(v), p);
}

Verdict check_globally_known(const PolicyEnhancedSystem& in, DomainId pd, std::size_t depth) {
  const Prepared p = prepare(in);
  const auto& sys = p.sys;
  const auto& sig = sys.signature();
  if (idx(pd) >= sig.domain_count()) throw InputError("unknown policy domain");
  // GK1: the policy domain may flow everywhere, at every reachable state.
  for (StateId s : sys.reachable()) {
    for (std::size_t u = 0; u < sig.domain_count(); ++u) {
      if (!sys.permits(s, pd, make_id<DomainId>(u))) {
        Witness w;
        w.states = {s};
        w.domains = {pd, make_id<DomainId>(u)};
        Verdict v = insecure("gk", depth, std::move(w));
        v.notes.push_back("GK1 fails: policy domain has no edge to " + sig.domain_name(make_id<DomainId>(u)) +
                          " at state " + sys.state_name(s));
        return finish(std::move(v), p);
      }
    }
  }
  // GK2: equal projections onto the policy domain's actions give equal edges.
  const TraceSpace space(sys, depth);
  std::vector<std::uint32_t> proj(space.size(), 0);
  std::unordered_map<std::uint64_t, std::uint32_t> trie;
  std::unordered_map<std::uint32_t, TraceId> first;
  first.emplace(0, TraceSpace::root());
  for (std::size_t i = 1; i < space.size(); ++i) {
    const auto t = make_id<TraceId>(i);
    const std::uint32_t parent = proj[idx(space.parent(t))];
    const ActionId a = space.last(t);
    if (sig.dom(a) == pd) {
      auto [it, fresh] = trie.try_emplace(key2(parent, idx(a)), static_cast<std::uint32_t>(trie.size() + 1));
      proj[i] = it->second;
    } else {
      proj[i] = parent;
    }
    const TraceId f = first.try_emplace(proj[i], t).first->second;
    if (!(sys.edges(space.state(f)) == sys.edges(space.state(t)))) {
      Witness w;
      w.traces = {space.trace(f), space.trace(t)};
      w.domains = {pd};
      Verdict v = insecure("gk", depth, std::move(w));
      v.notes.push_back("GK2 fails: traces with equal policy-domain projection reach different policies");
      return finish(std::move(v), p);
    }
  }
  Verdict v = secure("gk", depth);
  if (check_locality(sys, depth).insecure())
    v.notes.push_back("cross-check failed: globally known policy is not local at this depth");
  else
    v.notes.push_back("locality cross-check passed");
  return finish(std::move(v), p);
}

bool policy_leq(const PolicyEnhancedSystem& a, const PolicyEnhancedSystem& b, std::size_t depth) {
  if (!(a.signature() == b.signature())) throw InputError("policy_leq: signature mismatch");
  const std::size_t na = a.signature().action_count();
  // Breadth-first over reachable state pairs; a pair needs visiting once,
  // at its smallest depth.
  std::map<std::pair<StateId, StateId>, std::size_t> seen;
  std::vector<std::pair<StateId, StateId>> frontier{{a.initial(), b.initial()}};
  seen[frontier[0]] = 0;
  for (std::size_t d = 0; !frontier.empty(); ++d) {
    std::vector<std::pair<StateId, StateId>> next;
    for (auto [x, y] : frontier) {
      if (!a.edges(x).subset_of(b.edges(y))) return false;
      if (d == depth) continue;
      for (std::size_t i = 0; i < na; ++i) {
        const auto act = make_id<ActionId>(i);
        const std::pair<StateId, StateId> nxt{a.step(x, act), b.step(y, act)};
        if (seen.emplace(nxt, d + 1).second) next.push_back(nxt);
      }
    }
    frontier.swap(next);
  }
  return true;
}

PolicyEnhancedSystem restrict_to_local(const PolicyEnhancedSystem& in, std::size_t depth,
                                       std::optional<std::size_t> class_depth) {
  const Prepared p = prepare(in);
  const std::size_t cd = std::max(depth, class_depth.value_or(depth + 2));
  const TraceSpace big(p.sys, cd);
  const auto unw = unwinding_partition(big);
  const DistributedKnowledge know(unw);
  PolicyEnhancedSystem out = unfold(p.sys, depth);
  const std::size_t nd = p.sys.signature().domain_count();
  std::vector<EdgeSet> edges;
  edges.reserve(out.state_count());
  // Unfold state i is the trace with id i; ids agree between the two spaces
  // for every length up to depth.
  for (std::size_t i = 0; i < out.state_count(); ++i) {
    EdgeSet e(nd);
    for (std::size_t u = 0; u < nd; ++u)
      for (std::size_t v = 0; v < nd; ++v)
        if (u != v && know.at(make_id<TraceId>(i), make_id<DomainId>(u), make_id<DomainId>(v)))
          e.add(make_id<DomainId>(u), make_id<DomainId>(v));
    edges.push_back(std::move(e));
  }
  return out.with_edges(std::move(edges));
}

namespace {

class StateUnionFind {
 public:
  explicit StateUnionFind(std::size_t n) : parent_(n) {
    for (std::size_t i = 0; i < n; ++i) parent_[i] = static_cast<std::uint32_t>(i);
  }
  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  bool unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    return true;
  }

 private:
  std::vector<std::uint32_t> parent_;
};

}  // namespace

StateUnwinding state_unwinding(const PolicyEnhancedSystem& sys, StateUnwindingMode mode) {
  const auto& sig = sys.signature();
  const std::size_t nd = sig.domain_count();
  const std::size_t na = sig.action_count();
  auto reach = sys.reachable();
  std::sort(reach.begin(), reach.end());
  std::vector<StateUnionFind> uf(nd, StateUnionFind(sys.state_count()));
  auto id = [](StateId s) { return static_cast<std::uint32_t>(idx(s)); };

  bool changed = true;
  while (changed) {
    changed = false;
    for (StateId s : reach)
      for (std::size_t a = 0; a < na; ++a) {
        const auto act = make_id<ActionId>(a);
        for (std::size_t u = 0; u < nd; ++u)
          if (!sys.permits(s, sig.dom(act), make_id<DomainId>(u)))
            changed |= uf[u].unite(id(sys.step(s, act)), id(s));
      }
    for (std::size_t u = 0; u < nd; ++u)
      for (std::size_t a = 0; a < na; ++a) {
        const auto act = make_id<ActionId>(a);
        const DomainId actor = sig.dom(act);
        std::unordered_map<std::uint64_t, StateId> first;
        for (StateId s : reach) {
          if (mode == StateUnwindingMode::Diamond && !sys.permits(s, actor, make_id<DomainId>(u))) continue;
          const auto [it, fresh] = first.try_emplace(key2(uf[u].find(id(s)), uf[idx(actor)].find(id(s))), s);
          if (!fresh) changed |= uf[u].unite(id(sys.step(it->second, act)), id(sys.step(s, act)));
        }
      }
  }
  StateUnwinding out{mode, std::vector<std::vector<std::uint32_t>>(nd)};
  for (std::size_t u = 0; u < nd; ++u)
    for (std::size_t s = 0; s < sys.state_count(); ++s) out.root[u].push_back(uf[u].find(static_cast<std::uint32_t>(s)));
  return out;
}

Verdict state_unwinding_check(const PolicyEnhancedSystem& in, StateUnwindingMode mode) {
  const Prepared p = prepare(in);
  const auto& sys = p.sys;
  const auto unw = state_unwinding(sys, mode);
  const bool box = mode == StateUnwindingMode::Box;
  Verdict v;
  v.property = box ? "certify-box" : "certify-diamond";
  v.outcome = Outcome::CertifiedSecure;
  auto reach = sys.reachable();
  std::sort(reach.begin(), reach.end());
  for (StateId s : reach) {
    for (std::size_t u = 0; u < sys.signature().domain_count(); ++u) {
      const auto du = make_id<DomainId>(u);
      const auto root = make_id<StateId>(unw.root[u][idx(s)]);
      if (sys.obs(du, root) != sys.obs(du, s)) {
        v.outcome = Outcome::Inconclusive;
        Witness w;
        w.states = {root, s};
        w.domains = {du};
        w.observations = {sys.obs_name(du, root), sys.obs_name(du, s)};
        v.witness = std::move(w);
        v.notes.push_back("output consistency fails for the smallest state unwinding; the method is complete only on "
                          "the unfolding, so this does not by itself prove insecurity");
        return finish(std::move(v), p);
      }
    }
  }
  v.notes.push_back(box ? "state unwinding certifies ta-box security (all depths)"
                        : "state unwinding certifies ta-diamond security (all depths)");
  if (sys.truncation_depth())
    v.notes.push_back("certificate applies to the truncated system, not to the untruncated original");
  return finish(std::move(v), p);
}

Verdict check_lpurge_security(const PolicyEnhancedSystem& in, std::size_t depth, Exec exec) {
  const Prepared p = prepare(in);
  const auto& sys = p.sys;
  const TraceSpace space(sys, depth);
  const std::size_t nd = sys.signature().domain_count();
  const auto flags = lpurge_failures(space, exec);
  const auto hit = std::find(flags.begin(), flags.end(), std::uint8_t{1});
  if (hit == flags.end()) return finish(secure("lpurge", depth), p);
  const std::size_t i = static_cast<std::size_t>(hit - flags.begin());
  const auto t = make_id<TraceId>(i / nd);
  const auto u = make_id<DomainId>(i % nd);
  Witness w;
  w.traces = {space.trace(t)};
  w.domains = {u};
  w.purged = lpurge(sys, w.traces[0], u, sys.initial());
  w.observations = {sys.obs_name(u, sys.run(*w.purged)), sys.obs_name(u, space.state(t))};
  return finish(insecure("lpurge", depth, std::move(w)), p);
}

Verdict check_i_security(const PolicyEnhancedSystem& in, std::size_t depth, Exec exec) {
  const Prepared p = prepare(in);
  const auto& sys = p.sys;
  const TraceSpace space(sys, depth);
  auto starts = sys.reachable();
  std::sort(starts.begin(), starts.end());
  const auto hits = isec_scan(space, starts, exec);
  Verdict v = secure("isec", depth);
  v.notes.push_back("start states range over the " + std::to_string(starts.size()) + " reachable state(s)");
  for (std::size_t i = 0; i < starts.size(); ++i) {
    if (!hits[i]) continue;
    const auto& h = *hits[i];
    Witness w;
    w.states = {starts[i]};
    w.traces = {space.trace(h.trace), space.trace(h.reference)};
    w.domains = {h.domain};
    w.purged = dipurge(sys, w.traces[0], h.domain, starts[i]);
    w.observations = {sys.obs_name(h.domain, sys.run_from(starts[i], w.traces[0])),
                      sys.obs_name(h.domain, sys.run_from(starts[i], w.traces[1]))};
    v.outcome = Outcome::Insecure;
    v.witness = std::move(w);
    break;
  }
  return finish(std::move(v), p);
}

}  // namespace nif
