#include "nif/purge.hpp"

#include <limits>
#include <unordered_map>

namespace nif {

std::vector<TreeId> PurgeTable::column(DomainId u) const {
  const std::size_t n = values_.size() / (domains_ ? domains_ : 1);
  std::vector<TreeId> out(n);
  for (std::size_t t = 0; t < n; ++t) out[t] = values_[t * domains_ + idx(u)];
  return out;
}

PurgeTable ta_static_table(const TraceSpace& space, TreeTable& trees, const EdgeSet& edges) {
  const auto& sig = space.system().signature();
  return compute_purge(space, trees,
                       [&](TraceId, ActionId a, DomainId u) { return edges.has(sig.dom(a), u); });
}

PurgeTable ta_may_table(const TraceSpace& space, TreeTable& trees) {
  const auto& sys = space.system();
  const auto& sig = sys.signature();
  return compute_purge(space, trees, [&](TraceId p, ActionId a, DomainId u) {
    return sys.permits(space.state(p), sig.dom(a), u);
  });
}

namespace {

// Walks the trace keeping the purge value of every domain for the current
// prefix; branch(prefix_state, action, observer) picks the node case.
template <class Branch>
TreeId purge_along(TreeTable& trees, const Signature& sig, const Trace& trace, DomainId target, Branch branch,
                   const PolicyEnhancedSystem* sys) {
  const std::size_t nd = sig.domain_count();
  if (idx(target) >= nd) throw InputError("unknown domain id");
  std::vector<TreeId> cur(nd, TreeTable::leaf());
  std::vector<TreeId> next(nd);
  StateId s = sys ? sys->initial() : StateId{};
  for (ActionId a : trace) {
    if (idx(a) >= sig.action_count()) throw InputError("trace mentions an unknown action");
    const DomainId actor = sig.dom(a);
    for (std::size_t u = 0; u < nd; ++u) {
      const auto du = make_id<DomainId>(u);
      next[u] = branch(s, a, du) ? trees.node(cur[u], cur[idx(actor)], a) : cur[u];
    }
    cur.swap(next);
    if (sys) s = sys->step(s, a);
  }
  return cur[idx(target)];
}

}  // namespace

TreeId ta_static(TreeTable& trees, const Signature& sig, const EdgeSet& edges, const Trace& trace, DomainId u) {
  return purge_along(
      trees, sig, trace, u, [&](StateId, ActionId a, DomainId v) { return edges.has(sig.dom(a), v); }, nullptr);
}

TreeId ta_may(TreeTable& trees, const PolicyEnhancedSystem& sys, const Trace& trace, DomainId u) {
  const auto& sig = sys.signature();
  return purge_along(
      trees, sig, trace, u, [&](StateId s, ActionId a, DomainId v) { return sys.permits(s, sig.dom(a), v); }, &sys);
}

View view(const PolicyEnhancedSystem& sys, const Trace& trace, DomainId u) {
  const auto& sig = sys.signature();
  StateId s = sys.initial();
  View out{{false, static_cast<std::uint32_t>(idx(sys.obs(u, s)))}};
  for (ActionId a : trace) {
    s = sys.step(s, a);
    const ViewEntry o{false, static_cast<std::uint32_t>(idx(sys.obs(u, s)))};
    if (sig.dom(a) == u) {
      out.push_back({true, static_cast<std::uint32_t>(idx(a))});
      out.push_back(o);
    } else if (!(out.back() == o)) {
      out.push_back(o);
    }
  }
  return out;
}

std::string format_view(const View& v, const PolicyEnhancedSystem& sys) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += v[i].own_action ? sys.signature().action_name(make_id<ActionId>(v[i].value))
                           : sys.obs_token(make_id<ObsId>(v[i].value));
  }
  return out + "]";
}

std::vector<std::uint32_t> view_ids(const TraceSpace& space, DomainId u) {
  // A view is interned as (previous view id, appended entry); absorption
  // needs the last observation, which is kept per view id.
  const auto& sys = space.system();
  const auto& sig = sys.signature();
  std::vector<std::uint32_t> out(space.size());
  std::vector<std::uint32_t> last_obs;
  std::unordered_map<std::uint64_t, std::uint32_t> index;
  auto extend = [&](std::uint32_t prev, bool action, std::uint32_t value, std::uint32_t obs_after) {
    const std::uint64_t key = (static_cast<std::uint64_t>(prev) << 32) ^
                              (static_cast<std::uint64_t>(value) << 1) ^ (action ? 1u : 0u);
    auto [it, fresh] = index.try_emplace(key, static_cast<std::uint32_t>(last_obs.size()));
    if (fresh) last_obs.push_back(obs_after);
    return it->second;
  };
  // Root views: one per initial observation; encode with a sentinel parent.
  const std::uint32_t root_parent = std::numeric_limits<std::uint32_t>::max();
  const auto o0 = static_cast<std::uint32_t>(idx(sys.obs(u, space.state(TraceSpace::root()))));
  out[0] = extend(root_parent, false, o0, o0);
  for (std::size_t i = 1; i < space.size(); ++i) {
    const auto t = make_id<TraceId>(i);
    const std::uint32_t prev = out[idx(space.parent(t))];
    const ActionId a = space.last(t);
    const auto o = static_cast<std::uint32_t>(idx(sys.obs(u, space.state(t))));
    if (sig.dom(a) == u) {
      out[i] = extend(extend(prev, true, static_cast<std::uint32_t>(idx(a)), last_obs[prev]), false, o, o);
    } else {
      out[i] = last_obs[prev] == o ? prev : extend(prev, false, o, o);
    }
  }
  return out;
}

std::vector<TracePartition> partitions_from(const PurgeTable& table, const TraceSpace& space) {
  std::vector<TracePartition> out;
  for (std::size_t u = 0; u < table.domain_count(); ++u) {
    out.push_back(partition_by(table.column(make_id<DomainId>(u)), make_id<DomainId>(u), space.depth()));
    out.back().flatten();
  }
  return out;
}

Verdict check_f_security(const std::vector<TracePartition>& partitions, const TraceSpace& space, ObsMode mode,
                         const std::string& property, Exec exec) {
  const auto& sys = space.system();
  Verdict v;
  v.property = property;
  v.depth = space.depth();
  v.outcome = Outcome::BoundedSecure;

  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::size_t best_a = none, best_b = none, best_u = none;
  for (const auto& part : partitions) {
    const DomainId u = part.domain();
    std::vector<std::uint32_t> keys;
    if (mode == ObsMode::View) {
      keys = view_ids(space, u);
    } else {
      keys.resize(space.size());
      for (std::size_t t = 0; t < space.size(); ++t)
        keys[t] = static_cast<std::uint32_t>(idx(sys.obs(u, space.state(make_id<TraceId>(t)))));
    }
    const auto flags = class_conflicts(part, keys, exec);
    // First differing member of each class; the class root is its first member.
    std::vector<std::size_t> first_diff(space.size(), none);
    for (std::size_t t = 0; t < space.size(); ++t) {
      if (!flags[t]) continue;
      const std::size_t r = idx(part.find(make_id<TraceId>(t)));
      if (first_diff[r] == none) first_diff[r] = t;
    }
    for (std::size_t r = 0; r < space.size(); ++r) {
      if (first_diff[r] == none) continue;
      const auto cand = std::make_tuple(r, first_diff[r], idx(u));
      if (best_a == none || cand < std::make_tuple(best_a, best_b, best_u)) {
        best_a = r;
        best_b = first_diff[r];
        best_u = idx(u);
      }
      break;  // roots ascend, later classes cannot beat this one for this domain
    }
  }
  if (best_a != none) {
    v.outcome = Outcome::Insecure;
    Witness w;
    const auto ta = make_id<TraceId>(best_a);
    const auto tb = make_id<TraceId>(best_b);
    const auto du = make_id<DomainId>(best_u);
    w.traces = {space.trace(ta), space.trace(tb)};
    w.domains = {du};
    if (mode == ObsMode::View) {
      w.observations = {format_view(view(sys, w.traces[0], du), sys), format_view(view(sys, w.traces[1], du), sys)};
    } else {
      w.observations = {sys.obs_name(du, space.state(ta)), sys.obs_name(du, space.state(tb))};
    }
    v.witness = std::move(w);
  }
  return v;
}

}  // namespace nif
