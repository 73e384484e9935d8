#include "nif/unwinding.hpp"

#include <algorithm>
#include <unordered_map>

namespace nif {

UnwindingResult::UnwindingResult(const TraceSpace& space, std::vector<TracePartition> parts, ClosureStats stats,
                                 bool saturated)
    : space_(&space), parts_(std::move(parts)), stats_(stats), saturated_(saturated) {}

namespace {

std::uint64_t pair_key(TraceId x, TraceId y) {
  return (static_cast<std::uint64_t>(idx(x)) << 32) | idx(y);
}

}  // namespace

UnwindingResult unwinding_partition(const TraceSpace& space, std::optional<std::size_t> sweep_limit) {
  const auto& sys = space.system();
  const auto& sig = sys.signature();
  const std::size_t nd = sig.domain_count();
  const std::size_t na = sig.action_count();
  std::vector<TracePartition> parts;
  for (std::size_t u = 0; u < nd; ++u) parts.emplace_back(make_id<DomainId>(u), space.depth(), space.size());

  ClosureStats stats;
  const std::size_t parents_end = space.depth() == 0 ? 0 : space.level_begin(space.depth());
  bool saturated = false;
  std::unordered_map<std::uint64_t, TraceId> group_first;
  group_first.reserve(parents_end);
  std::vector<TraceId> leader(parents_end);
  // Actions grouped by actor: the WSC grouping depends only on the actor.
  std::vector<std::vector<ActionId>> by_actor(nd);
  for (std::size_t a = 0; a < na; ++a) by_actor[idx(sig.dom(make_id<ActionId>(a)))].push_back(make_id<ActionId>(a));
  while (!sweep_limit || stats.sweeps < *sweep_limit) {
    ++stats.sweeps;
    std::size_t merged = 0;
    // DLR: an action that may not flow to u leaves u's class unchanged. The
    // rule only reads the policy, so one pass is enough.
    if (stats.sweeps == 1) {
      for (std::size_t i = 1; i < space.size(); ++i) {
        const auto t = make_id<TraceId>(i);
        const TraceId p = space.parent(t);
        const DomainId actor = sig.dom(space.last(t));
        for (std::size_t u = 0; u < nd; ++u) {
          if (sys.permits(space.state(p), actor, make_id<DomainId>(u))) continue;
          ++stats.rule_applications;
          if (parts[u].unite(t, p)) {
            ++stats.dlr_merges;
            ++merged;
          }
        }
      }
    }
    // WSC: parents equivalent for u and for the actor have u-equivalent
    // children. Leaders are taken before this (u, actor) round merges
    // anything; merged pairs stay merged, so a stale leader is still sound
    // and the next sweep picks up whatever it missed.
    for (std::size_t u = 0; u < nd; ++u) {
      for (std::size_t x = 0; x < nd; ++x) {
        if (by_actor[x].empty()) continue;
        group_first.clear();
        bool any = false;
        for (std::size_t i = 0; i < parents_end; ++i) {
          const auto p = make_id<TraceId>(i);
          const auto key = pair_key(parts[u].find(p), parts[x].find(p));
          leader[i] = group_first.try_emplace(key, p).first->second;
          any = any || leader[i] != p;
        }
        if (!any) continue;
        for (ActionId act : by_actor[x]) {
          for (std::size_t i = 0; i < parents_end; ++i) {
            const auto p = make_id<TraceId>(i);
            if (leader[i] == p) continue;
            ++stats.rule_applications;
            if (parts[u].unite(space.child(leader[i], act), space.child(p, act))) {
              ++stats.wsc_merges;
              ++merged;
            }
          }
        }
      }
    }
    if (merged == 0) {
      saturated = true;
      break;
    }
  }
  for (auto& p : parts) p.flatten();
  return UnwindingResult(space, std::move(parts), stats, saturated);
}

bool holds_distributed(const UnwindingResult& result, const std::vector<DomainId>& group, DomainId u, DomainId v,
                       TraceId t) {
  const auto& space = result.space();
  const auto& sys = space.system();
  if (idx(t) >= space.size()) throw BoundError("trace beyond the enumerated depth");
  if (group.empty()) {
    // Empty group: every trace is a candidate.
    for (std::size_t i = 0; i < space.size(); ++i)
      if (!sys.permits(space.state(make_id<TraceId>(i)), u, v)) return false;
    return true;
  }
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto b = make_id<TraceId>(i);
    const bool member = std::all_of(group.begin(), group.end(),
                                    [&](DomainId g) { return result.partition(g).same(b, t); });
    if (member && !sys.permits(space.state(b), u, v)) return false;
  }
  return true;
}

bool holds_distributed(const UnwindingResult& result, const std::vector<DomainId>& group, DomainId u, DomainId v,
                       const Trace& t) {
  return holds_distributed(result, group, u, v, result.space().id(t));
}

DistributedKnowledge::DistributedKnowledge(const UnwindingResult& result)
    : nd_(result.space().system().signature().domain_count()) {
  const auto& space = result.space();
  const auto& sys = space.system();
  bits_.assign(space.size() * nd_ * nd_, false);
  std::unordered_map<std::uint64_t, bool> all_hold;
  for (std::size_t x = 0; x < nd_; ++x) {
    for (std::size_t y = 0; y < nd_; ++y) {
      const auto dx = make_id<DomainId>(x);
      const auto dy = make_id<DomainId>(y);
      all_hold.clear();
      const auto& px = result.partition(dx);
      const auto& py = result.partition(dy);
      for (std::size_t i = 0; i < space.size(); ++i) {
        const auto t = make_id<TraceId>(i);
        const bool atom = sys.permits(space.state(t), dx, dy);
        auto [it, fresh] = all_hold.try_emplace(pair_key(px.find(t), py.find(t)), atom);
        if (!fresh) it->second = it->second && atom;
      }
      for (std::size_t i = 0; i < space.size(); ++i) {
        const auto t = make_id<TraceId>(i);
        bits_[(i * nd_ + x) * nd_ + y] = all_hold.at(pair_key(px.find(t), py.find(t)));
      }
    }
  }
}

PurgeTable ta_must_table(const UnwindingResult& result, TreeTable& trees) {
  const auto& space = result.space();
  const auto& sig = space.system().signature();
  const DistributedKnowledge know(result);
  return compute_purge(space, trees,
                       [&](TraceId p, ActionId a, DomainId u) { return know.at(p, sig.dom(a), u); });
}

TreeId ta_must(const UnwindingResult& result, TreeTable& trees, const Trace& trace, DomainId u) {
  const auto& space = result.space();
  if (trace.size() > space.depth()) throw BoundError("trace beyond the enumerated depth");
  const auto& sig = space.system().signature();
  if (idx(u) >= sig.domain_count()) throw InputError("unknown domain id");
  const DistributedKnowledge know(result);
  std::vector<TreeId> cur(sig.domain_count(), TreeTable::leaf());
  std::vector<TreeId> next(cur.size());
  TraceId prefix = TraceSpace::root();
  for (ActionId a : trace) {
    const DomainId actor = sig.dom(a);
    for (std::size_t v = 0; v < cur.size(); ++v) {
      next[v] = know.at(prefix, actor, make_id<DomainId>(v)) ? trees.node(cur[v], cur[idx(actor)], a) : cur[v];
    }
    cur.swap(next);
    prefix = space.child(prefix, a);
  }
  return cur[idx(u)];
}

TheoremReport check_theorem_mustunwind(const TraceSpace& space, std::size_t margin) {
  if (margin > space.depth()) throw InputError("margin exceeds depth");
  const auto unw = unwinding_partition(space);
  TreeTable trees;
  const auto must = ta_must_table(unw, trees);
  TheoremReport rep;
  rep.depth = space.depth();
  rep.margin = margin;
  rep.saturated = unw.saturated();
  const std::size_t interior = space.depth() - margin;
  const auto& sig = space.system().signature();
  for (std::size_t u = 0; u < sig.domain_count(); ++u) {
    const auto du = make_id<DomainId>(u);
    const auto& part = unw.partition(du);
    // Two traces mismatch when exactly one of the relations joins them. Each
    // trace is compared with the first trace of its class in either relation.
    std::unordered_map<std::uint32_t, TraceId> first_by_tree;
    for (std::size_t i = 0; i < space.size(); ++i) {
      const auto t = make_id<TraceId>(i);
      const auto tree = static_cast<std::uint32_t>(idx(must.at(t, du)));
      const TraceId tree_first = first_by_tree.try_emplace(tree, t).first->second;
      const TraceId unw_first = part.find(t);
      auto record = [&](TraceId other) {
        const bool boundary = space.length(t) > interior || space.length(other) > interior;
        (boundary ? rep.boundary_mismatches : rep.interior_mismatches)++;
        if (rep.samples.size() < 16) rep.samples.push_back({other, t, du, boundary});
      };
      if (tree_first != t && part.find(tree_first) != unw_first) record(tree_first);
      if (unw_first != t && must.at(unw_first, du) != must.at(t, du)) record(unw_first);
    }
  }
  return rep;
}

std::optional<Witness> unwinding_rule_witness(const UnwindingResult& result) {
  const auto& space = result.space();
  const auto& sys = space.system();
  const auto& sig = sys.signature();
  const std::size_t nd = sig.domain_count();
  // Members of each class by root, per domain, to enumerate WSC neighbours.
  std::vector<std::unordered_map<std::uint32_t, std::vector<TraceId>>> members(nd);
  for (std::size_t u = 0; u < nd; ++u)
    for (std::size_t i = 0; i < space.size(); ++i) {
      const auto t = make_id<TraceId>(i);
      members[u][static_cast<std::uint32_t>(idx(result.partition(make_id<DomainId>(u)).find(t)))].push_back(t);
    }

  for (std::size_t i = 1; i < space.size(); ++i) {
    const auto x = make_id<TraceId>(i);
    const TraceId p = space.parent(x);
    const ActionId a = space.last(x);
    const DomainId actor = sig.dom(a);
    for (std::size_t u = 0; u < nd; ++u) {
      const auto du = make_id<DomainId>(u);
      const ObsId ox = sys.obs(du, space.state(x));
      auto report = [&](TraceId y) {
        Witness w;
        w.traces = {space.trace(x), space.trace(y)};
        w.domains = {du};
        w.observations = {sys.obs_name(du, space.state(x)), sys.obs_name(du, space.state(y))};
        return w;
      };
      // Neighbours below x: the DLR parent and WSC partners q·a with q < p.
      // Among those with a different observation the smallest is reported.
      std::optional<TraceId> best;
      if (!sys.permits(space.state(p), actor, du) && sys.obs(du, space.state(p)) != ox) best = p;
      const auto& part_u = result.partition(du);
      const auto& part_actor = result.partition(actor);
      for (TraceId q : members[u].at(static_cast<std::uint32_t>(idx(part_u.find(p))))) {
        if (idx(q) >= idx(p)) break;
        if (!part_actor.same(q, p)) continue;
        const TraceId y = space.child(q, a);
        if (sys.obs(du, space.state(y)) != ox && (!best || idx(y) < idx(*best))) best = y;
      }
      if (best) return report(*best);
    }
  }
  return std::nullopt;
}

}  // namespace nif
