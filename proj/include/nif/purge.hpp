#pragma once

#include <cstdint>
#include <vector>

#include "nif/kernels.hpp"
#include "nif/ta_tree.hpp"
#include "nif/trace_space.hpp"
#include "nif/verdict.hpp"

namespace nif {

/// Purge value of every (trace, domain) pair in a trace space.
class PurgeTable {
 public:
  PurgeTable(std::size_t traces, std::size_t domains) : domains_(domains), values_(traces * domains) {}

  TreeId at(TraceId t, DomainId u) const { return values_[idx(t) * domains_ + idx(u)]; }
  TreeId& at(TraceId t, DomainId u) { return values_[idx(t) * domains_ + idx(u)]; }
  std::vector<TreeId> column(DomainId u) const;
  std::size_t domain_count() const noexcept { return domains_; }

 private:
  std::size_t domains_;
  std::vector<TreeId> values_;
};

/// Fills a purge table level by level. branch(parent, action, observer)
/// decides whether the action is recorded for the observer after parent.
template <class Branch>
PurgeTable compute_purge(const TraceSpace& space, TreeTable& trees, Branch branch) {
  const auto& sig = space.system().signature();
  const std::size_t nd = sig.domain_count();
  PurgeTable out(space.size(), nd);
  for (std::size_t i = 1; i < space.size(); ++i) {
    const auto t = make_id<TraceId>(i);
    const TraceId p = space.parent(t);
    const ActionId a = space.last(t);
    const DomainId actor = sig.dom(a);
    for (std::size_t u = 0; u < nd; ++u) {
      const auto du = make_id<DomainId>(u);
      out.at(t, du) = branch(p, a, du) ? trees.node(out.at(p, du), out.at(p, actor), a) : out.at(p, du);
    }
  }
  return out;
}

PurgeTable ta_static_table(const TraceSpace& space, TreeTable& trees, const EdgeSet& edges);
PurgeTable ta_may_table(const TraceSpace& space, TreeTable& trees);

TreeId ta_static(TreeTable& trees, const Signature& sig, const EdgeSet& edges, const Trace& trace, DomainId u);
TreeId ta_may(TreeTable& trees, const PolicyEnhancedSystem& sys, const Trace& trace, DomainId u);

struct ViewEntry {
  bool own_action = false;  // true: action id; false: observation id
  std::uint32_t value = 0;
  friend bool operator==(const ViewEntry&, const ViewEntry&) = default;
};
using View = std::vector<ViewEntry>;

View view(const PolicyEnhancedSystem& sys, const Trace& trace, DomainId u);
std::string format_view(const View& v, const PolicyEnhancedSystem& sys);

/// Interned view of every trace for one domain; equal ids mean equal views.
std::vector<std::uint32_t> view_ids(const TraceSpace& space, DomainId u);

std::vector<TracePartition> partitions_from(const PurgeTable& table, const TraceSpace& space);

enum class ObsMode { FinalObs, View };

/// Insecure iff some class of some domain holds traces with different
/// observations (or views). Witness: the class's first trace and its first
/// member that differs, minimal over (first, second, domain).
Verdict check_f_security(const std::vector<TracePartition>& partitions, const TraceSpace& space, ObsMode mode,
                         const std::string& property, Exec exec = Exec::Parallel);

}  // namespace nif
