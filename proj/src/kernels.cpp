#include "nif/kernels.hpp"

#include <unordered_map>

#include "nif/comparison.hpp"

namespace nif {

namespace {

std::uint8_t conflict_at(const TracePartition& part, const std::vector<std::uint32_t>& keys, std::size_t t) {
  return keys[t] != keys[idx(part.find(make_id<TraceId>(t)))] ? 1 : 0;
}

std::uint8_t lpurge_fails(const TraceSpace& space, std::size_t t, DomainId u) {
  const auto& sys = space.system();
  const auto tid = make_id<TraceId>(t);
  const Trace alpha = space.trace(tid);
  const Trace purged = lpurge(sys, alpha, u, sys.initial());
  return sys.obs(u, sys.run(purged)) != sys.obs(u, space.state(tid)) ? 1 : 0;
}

std::optional<IsecHit> isec_from(const TraceSpace& space, StateId start) {
  const auto& sys = space.system();
  const std::size_t nd = sys.signature().domain_count();
  const auto ends = states_from(space, start, Exec::Serial);
  // purged[u][t]: trace id of dipurge(t, u, start); always within the bound.
  std::vector<std::vector<TraceId>> purged(nd, std::vector<TraceId>(space.size()));
  for (std::size_t t = 0; t < space.size(); ++t) {
    const Trace alpha = space.trace(make_id<TraceId>(t));
    for (std::size_t u = 0; u < nd; ++u)
      purged[u][t] = space.id(dipurge(sys, alpha, make_id<DomainId>(u), start));
  }
  // Reference member of each purge group: the purged trace itself when it
  // belongs to the group, else the group's first member.
  std::vector<std::unordered_map<std::uint32_t, TraceId>> reference(nd);
  for (std::size_t u = 0; u < nd; ++u) {
    for (std::size_t t = 0; t < space.size(); ++t) {
      const TraceId p = purged[u][t];
      if (purged[u][idx(p)] == p) {
        reference[u].try_emplace(static_cast<std::uint32_t>(idx(p)), p);
      }
    }
    for (std::size_t t = 0; t < space.size(); ++t)
      reference[u].try_emplace(static_cast<std::uint32_t>(idx(purged[u][t])), make_id<TraceId>(t));
  }
  for (std::size_t t = 0; t < space.size(); ++t) {
    for (std::size_t u = 0; u < nd; ++u) {
      const auto du = make_id<DomainId>(u);
      const TraceId ref = reference[u].at(static_cast<std::uint32_t>(idx(purged[u][t])));
      if (sys.obs(du, ends[t]) != sys.obs(du, ends[idx(ref)])) return IsecHit{make_id<TraceId>(t), ref, du};
    }
  }
  return std::nullopt;
}

}  // namespace

std::vector<std::uint8_t> class_conflicts(const TracePartition& part, const std::vector<std::uint32_t>& keys,
                                          Exec exec) {
  const auto n = static_cast<std::ptrdiff_t>(keys.size());
  std::vector<std::uint8_t> flags(keys.size(), 0);
  if (exec == Exec::Serial) {
    for (std::ptrdiff_t t = 0; t < n; ++t) flags[t] = conflict_at(part, keys, t);
  } else {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t t = 0; t < n; ++t) flags[t] = conflict_at(part, keys, t);
  }
  return flags;
}

std::vector<std::uint8_t> lpurge_failures(const TraceSpace& space, Exec exec) {
  const std::size_t nd = space.system().signature().domain_count();
  const auto n = static_cast<std::ptrdiff_t>(space.size() * nd);
  std::vector<std::uint8_t> flags(space.size() * nd, 0);
  if (exec == Exec::Serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) flags[i] = lpurge_fails(space, i / nd, make_id<DomainId>(i % nd));
  } else {
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t i = 0; i < n; ++i) flags[i] = lpurge_fails(space, i / nd, make_id<DomainId>(i % nd));
  }
  return flags;
}

std::vector<std::optional<IsecHit>> isec_scan(const TraceSpace& space, const std::vector<StateId>& starts,
                                              Exec exec) {
  const auto n = static_cast<std::ptrdiff_t>(starts.size());
  std::vector<std::optional<IsecHit>> hits(starts.size());
  if (exec == Exec::Serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) hits[i] = isec_from(space, starts[i]);
  } else {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) hits[i] = isec_from(space, starts[i]);
  }
  return hits;
}

std::vector<StateId> states_from(const TraceSpace& space, StateId start, Exec exec) {
  const auto& sys = space.system();
  std::vector<StateId> out(space.size());
  out[0] = start;
  // Level by level: every trace of one level depends only on the previous one.
  for (std::size_t n = 1; n <= space.depth(); ++n) {
    const auto begin = static_cast<std::ptrdiff_t>(space.level_begin(n));
    const auto end = static_cast<std::ptrdiff_t>(space.level_begin(n + 1));
    if (exec == Exec::Serial) {
      for (std::ptrdiff_t i = begin; i < end; ++i) {
        const auto t = make_id<TraceId>(i);
        out[i] = sys.step(out[idx(space.parent(t))], space.last(t));
      }
    } else {
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t i = begin; i < end; ++i) {
        const auto t = make_id<TraceId>(i);
        out[i] = sys.step(out[idx(space.parent(t))], space.last(t));
      }
    }
  }
  return out;
}

}  // namespace nif
