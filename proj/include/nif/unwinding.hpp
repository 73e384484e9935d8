#pragma once

#include <optional>
#include <vector>

#include "nif/purge.hpp"
#include "nif/trace_space.hpp"

namespace nif {

struct ClosureStats {
  std::size_t dlr_merges = 0;
  std::size_t wsc_merges = 0;
  std::size_t rule_applications = 0;  // rule instances examined whose premises held
  std::size_t sweeps = 0;
};

/// Least per-domain trace equivalences within the bound that are closed
/// under DLR and WSC.
class UnwindingResult {
 public:
  UnwindingResult(const TraceSpace& space, std::vector<TracePartition> parts, ClosureStats stats, bool saturated);

  const TraceSpace& space() const noexcept { return *space_; }
  const TracePartition& partition(DomainId u) const { return parts_.at(idx(u)); }
  const std::vector<TracePartition>& partitions() const noexcept { return parts_; }
  const ClosureStats& stats() const noexcept { return stats_; }
  bool saturated() const noexcept { return saturated_; }
  std::size_t depth() const noexcept { return space_->depth(); }

 private:
  const TraceSpace* space_;
  std::vector<TracePartition> parts_;
  ClosureStats stats_;
  bool saturated_;
};

/// Runs DLR sweeps then WSC sweeps until nothing merges. A sweep limit makes
/// the result unsaturated if it is hit.
UnwindingResult unwinding_partition(const TraceSpace& space, std::optional<std::size_t> sweep_limit = std::nullopt);
UnwindingResult unwinding_partition(TraceSpace&&, std::optional<std::size_t> = std::nullopt) = delete;

/// D_G(u->v) at trace t: every trace in the intersection of the group's
/// classes of t has u->v at its end state.
bool holds_distributed(const UnwindingResult& result, const std::vector<DomainId>& group, DomainId u, DomainId v,
                       TraceId t);
bool holds_distributed(const UnwindingResult& result, const std::vector<DomainId>& group, DomainId u, DomainId v,
                       const Trace& t);

/// Fast table of D_{x,y}(x->y) for every trace of length < depth:
/// at(t, x, y).
class DistributedKnowledge {
 public:
  explicit DistributedKnowledge(const UnwindingResult& result);
  bool at(TraceId t, DomainId x, DomainId y) const { return bits_[(idx(t) * nd_ + idx(x)) * nd_ + idx(y)]; }

 private:
  std::size_t nd_;
  std::vector<bool> bits_;
};

PurgeTable ta_must_table(const UnwindingResult& result, TreeTable& trees);
TreeId ta_must(const UnwindingResult& result, TreeTable& trees, const Trace& trace, DomainId u);

struct TheoremMismatch {
  TraceId a;
  TraceId b;
  DomainId domain;
  bool boundary;  // true when either trace is longer than depth - margin
};

struct TheoremReport {
  std::size_t depth = 0;
  std::size_t margin = 0;
  std::size_t interior_mismatches = 0;
  std::size_t boundary_mismatches = 0;
  std::vector<TheoremMismatch> samples;  // first few, shortlex
  bool saturated = true;
  bool agrees() const noexcept { return interior_mismatches == 0; }
};

/// Compares the unwinding partition with the partition induced by ta_must
/// values. Interior means both traces have length <= depth - margin.
TheoremReport check_theorem_mustunwind(const TraceSpace& space, std::size_t margin);

/// First rule instance (DLR or WSC, in the final partition) that joins two
/// traces with different observations: (later trace, earlier trace, domain).
std::optional<Witness> unwinding_rule_witness(const UnwindingResult& result);

}  // namespace nif
