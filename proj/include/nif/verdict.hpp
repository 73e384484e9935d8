#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nif/model.hpp"

namespace nif {

enum class Outcome { Insecure, BoundedSecure, CertifiedSecure, Inconclusive };

const char* to_string(Outcome o) noexcept;

/// Counterexample data. Which fields are filled depends on the property:
/// two traces and a domain for relation-based checks, one trace plus the
/// purged trace for Lpurge, a start state for i-security, two domains for
/// locality, two states for state-level checks.
struct Witness {
  std::vector<Trace> traces;
  std::vector<DomainId> domains;
  std::vector<StateId> states;
  std::optional<Trace> purged;
  /// Observation tokens that differ, in the order of the compared items.
  std::vector<std::string> observations;
};

struct Verdict {
  std::string property;
  Outcome outcome = Outcome::BoundedSecure;
  std::optional<Witness> witness;
  std::size_t depth = 0;
  std::vector<std::string> notes;

  bool insecure() const noexcept { return outcome == Outcome::Insecure; }
};

/// Human-readable one-line rendering of a verdict.
std::string describe(const Verdict& v, const PolicyEnhancedSystem& sys);

}  // namespace nif
