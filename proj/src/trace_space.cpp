#include "nif/trace_space.hpp"

#include <algorithm>
#include <limits>

namespace nif {

TraceSpace::TraceSpace(const PolicyEnhancedSystem& sys, std::size_t depth)
    : sys_(&sys), depth_(depth), actions_(sys.signature().action_count()) {
  std::size_t total = 1;
  std::size_t level = 1;
  for (std::size_t n = 1; n <= depth && actions_ > 0; ++n) {
    level *= actions_;
    total += level;
    if (total > std::numeric_limits<std::uint32_t>::max() / 2)
      throw BoundError("trace space too large for depth " + std::to_string(depth));
  }
  parent_.reserve(total);
  last_.reserve(total);
  length_.reserve(total);
  state_.reserve(total);

  parent_.push_back(root());
  last_.push_back(ActionId{});
  length_.push_back(0);
  state_.push_back(sys.initial());
  level_start_.push_back(0);
  for (std::size_t n = 1; n <= depth; ++n) {
    const std::size_t begin = level_start_.back();
    const std::size_t end = parent_.size();
    level_start_.push_back(end);
    for (std::size_t p = begin; p < end; ++p) {
      for (std::size_t a = 0; a < actions_; ++a) {
        parent_.push_back(make_id<TraceId>(p));
        last_.push_back(make_id<ActionId>(a));
        length_.push_back(static_cast<std::uint32_t>(n));
        state_.push_back(sys.step(state_[p], make_id<ActionId>(a)));
      }
    }
  }
  level_start_.push_back(parent_.size());
}

TraceId TraceSpace::child(TraceId t, ActionId a) const {
  if (length(t) >= depth_) throw BoundError("child of a trace at the depth bound");
  // Children of the i-th trace at level n sit at level n+1, offset i*|A|.
  const std::size_t n = length(t);
  const std::size_t offset = idx(t) - level_start_[n];
  return make_id<TraceId>(level_start_[n + 1] + offset * actions_ + idx(a));
}

Trace TraceSpace::trace(TraceId t) const {
  Trace out(length(t));
  for (std::size_t i = out.size(); i > 0; --i) {
    out[i - 1] = last(t);
    t = parent(t);
  }
  return out;
}

TraceId TraceSpace::id(const Trace& t) const {
  if (t.size() > depth_) throw BoundError("trace of length " + std::to_string(t.size()) +
                                          " exceeds depth " + std::to_string(depth_));
  TraceId cur = root();
  for (ActionId a : t) {
    if (idx(a) >= actions_) throw InputError("trace mentions an unknown action");
    cur = child(cur, a);
  }
  return cur;
}

TracePartition::TracePartition(DomainId domain, std::size_t depth, std::size_t traces)
    : domain_(domain), depth_(depth), parent_(traces) {
  for (std::size_t i = 0; i < traces; ++i) parent_[i] = make_id<TraceId>(i);
}

TraceId TracePartition::find(TraceId t) const {
  while (parent_[idx(t)] != t) t = parent_[idx(t)];
  return t;
}

TraceId TracePartition::find_compress(TraceId t) {
  TraceId root = find(t);
  while (parent_[idx(t)] != root) {
    TraceId next = parent_[idx(t)];
    parent_[idx(t)] = root;
    t = next;
  }
  return root;
}

bool TracePartition::unite(TraceId a, TraceId b) {
  TraceId ra = find_compress(a);
  TraceId rb = find_compress(b);
  if (ra == rb) return false;
  if (idx(rb) < idx(ra)) std::swap(ra, rb);
  parent_[idx(rb)] = ra;
  return true;
}

void TracePartition::flatten() {
  for (std::size_t i = 0; i < parent_.size(); ++i) parent_[i] = parent_[idx(parent_[i])];
}

std::vector<std::vector<TraceId>> TracePartition::classes() const {
  std::vector<std::vector<TraceId>> out;
  std::vector<std::size_t> slot(parent_.size(), std::numeric_limits<std::size_t>::max());
  for (std::size_t i = 0; i < parent_.size(); ++i) {
    const std::size_t r = idx(find(make_id<TraceId>(i)));
    if (slot[r] == std::numeric_limits<std::size_t>::max()) {
      slot[r] = out.size();
      out.emplace_back();
    }
    out[slot[r]].push_back(make_id<TraceId>(i));
  }
  return out;
}

std::size_t TracePartition::class_count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < parent_.size(); ++i)
    if (idx(find(make_id<TraceId>(i))) == i) ++n;
  return n;
}

bool TracePartition::refines(const TracePartition& coarser) const {
  for (std::size_t i = 0; i < parent_.size(); ++i) {
    const auto t = make_id<TraceId>(i);
    if (!coarser.same(t, find(t))) return false;
  }
  return true;
}

bool TracePartition::operator==(const TracePartition& other) const {
  if (size() != other.size()) return false;
  for (std::size_t i = 0; i < parent_.size(); ++i)
    if (find(make_id<TraceId>(i)) != other.find(make_id<TraceId>(i))) return false;
  return true;
}

}  // namespace nif
