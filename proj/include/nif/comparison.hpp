#pragma once

#include <vector>

#include "nif/model.hpp"

namespace nif {

/// Set of domains as a membership vector indexed by domain id.
using DomainSet = std::vector<bool>;

/// Domains to which the execution of trace from state s transmits
/// information that ends up with u.
DomainSet dsrc(const PolicyEnhancedSystem& sys, const Trace& trace, DomainId u, StateId s);

/// Leslie's purge: the state advances on every action, kept or not.
Trace lpurge(const PolicyEnhancedSystem& sys, const Trace& trace, DomainId u, StateId s);

/// Dynamic intransitive purge: on deletion the state does not advance.
Trace dipurge(const PolicyEnhancedSystem& sys, const Trace& trace, DomainId u, StateId s);

}  // namespace nif
