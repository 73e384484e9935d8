#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nif {

enum class DomainId : std::uint32_t {};
enum class ActionId : std::uint32_t {};
enum class StateId : std::uint32_t {};
enum class ObsId : std::uint32_t {};

template <class Id>
constexpr std::size_t idx(Id id) noexcept {
  return static_cast<std::size_t>(id);
}

template <class Id>
constexpr Id make_id(std::size_t i) noexcept {
  return static_cast<Id>(static_cast<std::uint32_t>(i));
}

/// Raised for malformed input: unknown identifiers, mismatched signatures,
/// nondeterministic transition tables and similar.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a query refers to a trace longer than the enumerated depth.
class BoundError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

using Trace = std::vector<ActionId>;

class Signature {
 public:
  struct ActionDecl {
    std::string name;
    std::string domain;
  };

  Signature() = default;
  Signature(std::vector<std::string> domains, const std::vector<ActionDecl>& actions);

  std::size_t domain_count() const noexcept { return domains_.size(); }
  std::size_t action_count() const noexcept { return actions_.size(); }

  DomainId dom(ActionId a) const { return dom_.at(idx(a)); }
  const std::string& domain_name(DomainId u) const { return domains_.at(idx(u)); }
  const std::string& action_name(ActionId a) const { return actions_.at(idx(a)); }

  std::optional<DomainId> find_domain(std::string_view name) const;
  std::optional<ActionId> find_action(std::string_view name) const;
  DomainId domain(std::string_view name) const;
  ActionId action(std::string_view name) const;

  /// A domain is inactive when no action belongs to it.
  bool inactive(DomainId u) const;
  bool single_char_actions() const noexcept;

  Trace parse_trace(std::string_view text) const;
  std::string format_trace(const Trace& t) const;

  friend bool operator==(const Signature&, const Signature&) = default;

 private:
  std::vector<std::string> domains_;
  std::vector<std::string> actions_;
  std::vector<DomainId> dom_;
};

/// Reflexive relation on domains. Reflexive pairs are never stored; queries
/// report them as present.
class EdgeSet {
 public:
  EdgeSet() = default;
  explicit EdgeSet(std::size_t domains) : n_(domains), bits_(domains * domains, false) {}

  bool has(DomainId u, DomainId v) const {
    return u == v || bits_[idx(u) * n_ + idx(v)];
  }
  void add(DomainId u, DomainId v) {
    if (u != v) bits_[idx(u) * n_ + idx(v)] = true;
  }
  void remove(DomainId u, DomainId v) {
    if (u != v) bits_[idx(u) * n_ + idx(v)] = false;
  }
  std::size_t domain_count() const noexcept { return n_; }
  bool subset_of(const EdgeSet& other) const;
  /// Non-reflexive pairs in (u, v) order.
  std::vector<std::pair<DomainId, DomainId>> pairs() const;

  friend bool operator==(const EdgeSet&, const EdgeSet&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<bool> bits_;
};

/// Deterministic, input-enabled transition structure shared by machines,
/// policy automata and policy-enhanced systems.
class Automaton {
 public:
  Automaton() = default;
  Automaton(Signature sig, std::vector<std::string> states, StateId initial,
            std::vector<StateId> delta);

  const Signature& signature() const noexcept { return sig_; }
  std::size_t state_count() const noexcept { return states_.size(); }
  StateId initial() const noexcept { return initial_; }
  const std::string& state_name(StateId s) const { return states_.at(idx(s)); }
  std::optional<StateId> find_state(std::string_view name) const;
  StateId state(std::string_view name) const;

  StateId step(StateId s, ActionId a) const;
  StateId run(const Trace& t) const { return run_from(initial_, t); }
  StateId run_from(StateId s, const Trace& t) const;
  /// States reachable from the initial state, in breadth-first order.
  std::vector<StateId> reachable() const;

 protected:
  void check_state(StateId s) const;
  void check_action(ActionId a) const;

  Signature sig_;
  std::vector<std::string> states_;
  StateId initial_{};
  std::vector<StateId> delta_;  // state * |A| + action
};

/// A system without a policy: automaton plus per-domain observations.
class Machine : public Automaton {
 public:
  Machine() = default;
  /// obs[state][domain] is an opaque observation token.
  Machine(Automaton base, std::vector<std::vector<std::string>> obs);
  const std::string& obs(DomainId u, StateId s) const { return obs_.at(idx(s)).at(idx(u)); }

 private:
  std::vector<std::vector<std::string>> obs_;
};

class DynamicPolicyAutomaton : public Automaton {
 public:
  DynamicPolicyAutomaton() = default;
  DynamicPolicyAutomaton(Automaton base, std::vector<EdgeSet> edges);
  const EdgeSet& edges(StateId s) const { return edges_.at(idx(s)); }

 private:
  std::vector<EdgeSet> edges_;
};

class PolicyEnhancedSystem : public Automaton {
 public:
  PolicyEnhancedSystem() = default;
  /// obs tokens are interned; obs[state][domain].
  PolicyEnhancedSystem(Automaton base, const std::vector<std::vector<std::string>>& obs,
                       std::vector<EdgeSet> edges);

  ObsId obs(DomainId u, StateId s) const { return obs_[idx(s) * sig_.domain_count() + idx(u)]; }
  const std::string& obs_token(ObsId o) const { return obs_tokens_.at(idx(o)); }
  const std::string& obs_name(DomainId u, StateId s) const { return obs_token(obs(u, s)); }
  const EdgeSet& edges(StateId s) const { return edges_.at(idx(s)); }
  bool permits(StateId s, DomainId u, DomainId v) const { return edges_[idx(s)].has(u, v); }

  /// Set when the system is a bounded construction whose deepest states
  /// carry self-loops instead of their real successors.
  std::optional<std::size_t> truncation_depth() const noexcept { return truncation_depth_; }
  bool truncated(StateId s) const { return !frontier_.empty() && frontier_[idx(s)]; }
  void mark_truncated(std::size_t depth, std::vector<bool> frontier);

  PolicyEnhancedSystem with_edges(std::vector<EdgeSet> edges) const;
  std::vector<std::vector<std::string>> obs_table() const;

 private:
  std::vector<ObsId> obs_;
  std::vector<std::string> obs_tokens_;
  std::vector<EdgeSet> edges_;
  std::optional<std::size_t> truncation_depth_;
  std::vector<bool> frontier_;
};

/// Structural equality: same signature, state names, transitions, obs tokens
/// and edges.
bool structurally_equal(const PolicyEnhancedSystem& a, const PolicyEnhancedSystem& b);

StateId step(const PolicyEnhancedSystem& sys, StateId s, ActionId a);
StateId run(const PolicyEnhancedSystem& sys, const Trace& t);

PolicyEnhancedSystem encode(const Machine& m, const DynamicPolicyAutomaton& p);

/// Tree-shaped system over traces of length <= depth; deepest states self-loop
/// and are flagged as truncated.
PolicyEnhancedSystem unfold(const PolicyEnhancedSystem& sys, std::size_t depth);

struct BisimResult {
  bool equal = true;
  std::optional<Trace> trace;
  std::optional<DomainId> domain;
};

BisimResult check_bisimilar(const PolicyEnhancedSystem& a, const PolicyEnhancedSystem& b,
                            std::size_t depth);

/// Removes every edge u->v with u inactive (reflexive edges stay implicit).
/// Returns the number of edges removed.
PolicyEnhancedSystem normalize_inactive(const PolicyEnhancedSystem& sys, std::size_t* removed = nullptr);

}  // namespace nif
