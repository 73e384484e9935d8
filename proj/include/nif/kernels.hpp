#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nif/trace_space.hpp"

namespace nif {

/// Selects the serial reference loop or the OpenMP loop. Both produce
/// identical results; the serial one is what the tests compare against.
enum class Exec { Serial, Parallel };

/// flags[t] is 1 when keys[t] differs from the key of t's class root.
std::vector<std::uint8_t> class_conflicts(const TracePartition& part, const std::vector<std::uint32_t>& keys,
                                          Exec exec);

/// flags[t * |D| + u] is 1 when obs_u after Lpurge(t, u, s0) differs from
/// obs_u after t.
std::vector<std::uint8_t> lpurge_failures(const TraceSpace& space, Exec exec);

struct IsecHit {
  TraceId trace;
  TraceId reference;
  DomainId domain;
};

/// For each start state, the first i-security violation in shortlex trace
/// order (then domain order), if any.
std::vector<std::optional<IsecHit>> isec_scan(const TraceSpace& space, const std::vector<StateId>& starts,
                                              Exec exec);

/// End state of every trace of the space when started from `start`.
std::vector<StateId> states_from(const TraceSpace& space, StateId start, Exec exec);

}  // namespace nif
