#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "nif/kernels.hpp"
#include "nif/model.hpp"
#include "nif/unwinding.hpp"
#include "nif/verdict.hpp"

namespace nif {

// Every check strips edges out of inactive domains first and says so in the
// verdict notes when that changed anything.

/// TA-security against the policy in force at the initial state.
Verdict check_ta_static_security(const PolicyEnhancedSystem& sys, std::size_t depth, Exec exec = Exec::Parallel);
Verdict check_ta_may_security(const PolicyEnhancedSystem& sys, std::size_t depth, Exec exec = Exec::Parallel);
/// ta-box security computed through the ta_must trees.
Verdict check_ta_must_security(const PolicyEnhancedSystem& sys, std::size_t depth, Exec exec = Exec::Parallel);
Verdict check_unwinding_security(const PolicyEnhancedSystem& sys, std::size_t depth, Exec exec = Exec::Parallel);

enum class LocalityVariant { Pairwise, KnownToSender, KnownToReceiver };
Verdict check_locality(const PolicyEnhancedSystem& sys, std::size_t depth,
                       LocalityVariant variant = LocalityVariant::Pairwise);

bool check_static(const PolicyEnhancedSystem& sys);
/// First pair of reachable states (initial, other) with different edges.
std::optional<std::pair<StateId, StateId>> static_counterexample(const PolicyEnhancedSystem& sys);
Verdict static_verdict(const PolicyEnhancedSystem& sys);

Verdict check_globally_known(const PolicyEnhancedSystem& sys, DomainId policy_domain, std::size_t depth);

/// Edges at run_a(t) are contained in edges at run_b(t) for every t up to depth.
bool policy_leq(const PolicyEnhancedSystem& a, const PolicyEnhancedSystem& b, std::size_t depth);

/// The depth-k unfold annotated with the locally known part of the policy:
/// u->v survives at a trace iff it holds throughout the intersection of the
/// u- and v-classes of the unwinding relation. Classes are computed at
/// class_depth (>= depth), which defaults to depth + 2: closures cut at the
/// output depth under-merge traces of length depth - 1.
PolicyEnhancedSystem restrict_to_local(const PolicyEnhancedSystem& sys, std::size_t depth,
                                       std::optional<std::size_t> class_depth = std::nullopt);

enum class StateUnwindingMode { Box, Diamond };

/// Smallest per-domain partition of the reachable states.
struct StateUnwinding {
  StateUnwindingMode mode;
  std::vector<std::vector<std::uint32_t>> root;  // root[u][state]
};

StateUnwinding state_unwinding(const PolicyEnhancedSystem& sys, StateUnwindingMode mode);
Verdict state_unwinding_check(const PolicyEnhancedSystem& sys, StateUnwindingMode mode);

Verdict check_lpurge_security(const PolicyEnhancedSystem& sys, std::size_t depth, Exec exec = Exec::Parallel);
Verdict check_i_security(const PolicyEnhancedSystem& sys, std::size_t depth, Exec exec = Exec::Parallel);

}  // namespace nif
