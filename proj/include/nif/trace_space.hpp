#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "nif/model.hpp"

namespace nif {

enum class TraceId : std::uint32_t {};

/// All traces of length <= depth, numbered breadth-first with children in
/// action order. Trace ids therefore follow shortlex order, and the end state
/// of each trace is precomputed.
class TraceSpace {
 public:
  TraceSpace(const PolicyEnhancedSystem& sys, std::size_t depth);
  TraceSpace(PolicyEnhancedSystem&&, std::size_t) = delete;

  const PolicyEnhancedSystem& system() const noexcept { return *sys_; }
  std::size_t depth() const noexcept { return depth_; }
  std::size_t size() const noexcept { return parent_.size(); }

  static constexpr TraceId root() noexcept { return TraceId{}; }
  TraceId parent(TraceId t) const { return parent_[idx(t)]; }
  ActionId last(TraceId t) const { return last_[idx(t)]; }
  std::size_t length(TraceId t) const { return length_[idx(t)]; }
  StateId state(TraceId t) const { return state_[idx(t)]; }
  const std::vector<StateId>& states() const noexcept { return state_; }

  /// Child trace t·a; requires length(t) < depth.
  TraceId child(TraceId t, ActionId a) const;
  bool has_children(TraceId t) const { return length(t) < depth_; }

  /// Ids [level_begin(n), level_begin(n+1)) are the traces of length n.
  std::size_t level_begin(std::size_t n) const { return level_start_.at(n); }

  Trace trace(TraceId t) const;
  TraceId id(const Trace& t) const;  // throws BoundError beyond depth

 private:
  const PolicyEnhancedSystem* sys_;
  std::size_t depth_;
  std::size_t actions_;
  std::vector<TraceId> parent_;
  std::vector<ActionId> last_;
  std::vector<std::uint32_t> length_;
  std::vector<StateId> state_;
  std::vector<std::size_t> level_start_;
};

/// Equivalence on the traces of a TraceSpace, kept as union-find. Roots are
/// always the smallest trace id of their class, so find() is stable and the
/// representative is the shortlex-first member. Const queries never write,
/// so a finished partition can be read from several threads.
class TracePartition {
 public:
  TracePartition() = default;
  TracePartition(DomainId domain, std::size_t depth, std::size_t traces);

  DomainId domain() const noexcept { return domain_; }
  std::size_t depth() const noexcept { return depth_; }
  std::size_t size() const noexcept { return parent_.size(); }

  TraceId find(TraceId t) const;
  /// Returns true when two different classes were merged.
  bool unite(TraceId a, TraceId b);
  bool same(TraceId a, TraceId b) const { return find(a) == find(b); }
  /// Points every trace directly at its root.
  void flatten();

  /// Classes as sorted member lists, ordered by first member.
  std::vector<std::vector<TraceId>> classes() const;
  std::size_t class_count() const;
  /// True when every class of *this lies inside a class of coarser.
  bool refines(const TracePartition& coarser) const;
  bool operator==(const TracePartition& other) const;

 private:
  DomainId domain_{};
  std::size_t depth_ = 0;
  TraceId find_compress(TraceId t);

  std::vector<TraceId> parent_;
};

/// Groups traces by equal value: trace t's class is given by values[t].
template <class Value>
TracePartition partition_by(const std::vector<Value>& values, DomainId domain, std::size_t depth);

}  // namespace nif

#include "nif/trace_space_impl.hpp"
