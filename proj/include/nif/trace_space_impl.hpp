#pragma once

#include <unordered_map>

namespace nif {

template <class Value>
TracePartition partition_by(const std::vector<Value>& values, DomainId domain, std::size_t depth) {
  TracePartition out(domain, depth, values.size());
  std::unordered_map<Value, TraceId> first;
  first.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto [it, fresh] = first.try_emplace(values[i], make_id<TraceId>(i));
    if (!fresh) out.unite(it->second, make_id<TraceId>(i));
  }
  return out;
}

}  // namespace nif
