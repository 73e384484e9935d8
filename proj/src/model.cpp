#include "nif/model.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>
#include <unordered_set>

#include "nif/trace_space.hpp"

namespace nif {

namespace {

template <class T>
void require_unique(const std::vector<T>& names, const char* what) {
  std::unordered_set<T> seen;
  for (const auto& n : names) {
    if (n.empty()) throw InputError(std::string("empty ") + what + " identifier");
    if (!seen.insert(n).second) throw InputError(std::string("duplicate ") + what + " '" + n + "'");
  }
}

}  // namespace

Signature::Signature(std::vector<std::string> domains, const std::vector<ActionDecl>& actions)
    : domains_(std::move(domains)) {
  require_unique(domains_, "domain");
  for (const auto& a : actions) {
    actions_.push_back(a.name);
    auto d = find_domain(a.domain);
    if (!d) throw InputError("action '" + a.name + "' refers to unknown domain '" + a.domain + "'");
    dom_.push_back(*d);
  }
  require_unique(actions_, "action");
}

std::optional<DomainId> Signature::find_domain(std::string_view name) const {
  for (std::size_t i = 0; i < domains_.size(); ++i)
    if (domains_[i] == name) return make_id<DomainId>(i);
  return std::nullopt;
}

std::optional<ActionId> Signature::find_action(std::string_view name) const {
  for (std::size_t i = 0; i < actions_.size(); ++i)
    if (actions_[i] == name) return make_id<ActionId>(i);
  return std::nullopt;
}

DomainId Signature::domain(std::string_view name) const {
  if (auto d = find_domain(name)) return *d;
  throw InputError("unknown domain '" + std::string(name) + "'");
}

ActionId Signature::action(std::string_view name) const {
  if (auto a = find_action(name)) return *a;
  throw InputError("unknown action '" + std::string(name) + "'");
}

bool Signature::inactive(DomainId u) const {
  return std::find(dom_.begin(), dom_.end(), u) == dom_.end();
}

bool Signature::single_char_actions() const noexcept {
  return std::all_of(actions_.begin(), actions_.end(), [](const auto& n) { return n.size() == 1; });
}

Trace Signature::parse_trace(std::string_view text) const {
  Trace out;
  if (text.empty() || text == "e" || text == "ε") return out;
  const bool dotted = text.find('.') != std::string_view::npos || text.find(' ') != std::string_view::npos;
  if (!dotted && single_char_actions()) {
    for (char c : text) out.push_back(action(std::string_view(&c, 1)));
    return out;
  }
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t next = text.find_first_of(". ", pos);
    if (next == std::string_view::npos) next = text.size();
    if (next > pos) out.push_back(action(text.substr(pos, next - pos)));
    pos = next + 1;
  }
  return out;
}

std::string Signature::format_trace(const Trace& t) const {
  if (t.empty()) return "e";
  std::string out;
  const bool compact = single_char_actions();
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!compact && i > 0) out += '.';
    out += action_name(t[i]);
  }
  return out;
}

bool EdgeSet::subset_of(const EdgeSet& other) const {
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i] && !other.bits_[i]) return false;
  return true;
}

std::vector<std::pair<DomainId, DomainId>> EdgeSet::pairs() const {
  std::vector<std::pair<DomainId, DomainId>> out;
  for (std::size_t u = 0; u < n_; ++u)
    for (std::size_t v = 0; v < n_; ++v)
      if (u != v && bits_[u * n_ + v]) out.emplace_back(make_id<DomainId>(u), make_id<DomainId>(v));
  return out;
}

Automaton::Automaton(Signature sig, std::vector<std::string> states, StateId initial,
                     std::vector<StateId> delta)
    : sig_(std::move(sig)), states_(std::move(states)), initial_(initial), delta_(std::move(delta)) {
  if (states_.empty()) throw InputError("automaton needs at least one state");
  require_unique(states_, "state");
  check_state(initial_);
  if (delta_.size() != states_.size() * sig_.action_count())
    throw InputError("transition table is not total");
  for (StateId t : delta_) check_state(t);
}

std::optional<StateId> Automaton::find_state(std::string_view name) const {
  for (std::size_t i = 0; i < states_.size(); ++i)
    if (states_[i] == name) return make_id<StateId>(i);
  return std::nullopt;
}

StateId Automaton::state(std::string_view name) const {
  if (auto s = find_state(name)) return *s;
  throw InputError("unknown state '" + std::string(name) + "'");
}

void Automaton::check_state(StateId s) const {
  if (idx(s) >= states_.size()) throw InputError("state id " + std::to_string(idx(s)) + " out of range");
}

void Automaton::check_action(ActionId a) const {
  if (idx(a) >= sig_.action_count()) throw InputError("action id " + std::to_string(idx(a)) + " out of range");
}

StateId Automaton::step(StateId s, ActionId a) const {
  check_state(s);
  check_action(a);
  return delta_[idx(s) * sig_.action_count() + idx(a)];
}

StateId Automaton::run_from(StateId s, const Trace& t) const {
  for (ActionId a : t) s = step(s, a);
  return s;
}

std::vector<StateId> Automaton::reachable() const {
  std::vector<bool> seen(states_.size(), false);
  std::vector<StateId> order{initial_};
  seen[idx(initial_)] = true;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t a = 0; a < sig_.action_count(); ++a) {
      StateId t = delta_[idx(order[i]) * sig_.action_count() + a];
      if (!seen[idx(t)]) {
        seen[idx(t)] = true;
        order.push_back(t);
      }
    }
  }
  return order;
}

Machine::Machine(Automaton base, std::vector<std::vector<std::string>> obs)
    : Automaton(std::move(base)), obs_(std::move(obs)) {
  if (obs_.size() != state_count()) throw InputError("observation table has wrong number of states");
  for (const auto& row : obs_)
    if (row.size() != sig_.domain_count()) throw InputError("observation row has wrong number of domains");
}

DynamicPolicyAutomaton::DynamicPolicyAutomaton(Automaton base, std::vector<EdgeSet> edges)
    : Automaton(std::move(base)), edges_(std::move(edges)) {
  if (edges_.size() != state_count()) throw InputError("edge table has wrong number of states");
  for (const auto& e : edges_)
    if (e.domain_count() != sig_.domain_count()) throw InputError("edge set over wrong domain count");
}

PolicyEnhancedSystem::PolicyEnhancedSystem(Automaton base, const std::vector<std::vector<std::string>>& obs,
                                           std::vector<EdgeSet> edges)
    : Automaton(std::move(base)), edges_(std::move(edges)) {
  const std::size_t d = sig_.domain_count();
  if (obs.size() != state_count()) throw InputError("observation table has wrong number of states");
  if (edges_.size() != state_count()) throw InputError("edge table has wrong number of states");
  std::unordered_map<std::string, ObsId> tokens;
  obs_.reserve(state_count() * d);
  for (const auto& row : obs) {
    if (row.size() != d) throw InputError("observation row has wrong number of domains");
    for (const auto& tok : row) {
      auto [it, fresh] = tokens.try_emplace(tok, make_id<ObsId>(obs_tokens_.size()));
      if (fresh) obs_tokens_.push_back(tok);
      obs_.push_back(it->second);
    }
  }
  for (const auto& e : edges_)
    if (e.domain_count() != d) throw InputError("edge set over wrong domain count");
}

void PolicyEnhancedSystem::mark_truncated(std::size_t depth, std::vector<bool> frontier) {
  if (frontier.size() != state_count()) throw InputError("frontier flag vector has wrong size");
  truncation_depth_ = depth;
  frontier_ = std::move(frontier);
}

PolicyEnhancedSystem PolicyEnhancedSystem::with_edges(std::vector<EdgeSet> edges) const {
  if (edges.size() != state_count()) throw InputError("edge table has wrong number of states");
  PolicyEnhancedSystem out = *this;
  out.edges_ = std::move(edges);
  return out;
}

std::vector<std::vector<std::string>> PolicyEnhancedSystem::obs_table() const {
  std::vector<std::vector<std::string>> out(state_count());
  for (std::size_t s = 0; s < state_count(); ++s)
    for (std::size_t u = 0; u < sig_.domain_count(); ++u)
      out[s].push_back(obs_name(make_id<DomainId>(u), make_id<StateId>(s)));
  return out;
}

bool structurally_equal(const PolicyEnhancedSystem& a, const PolicyEnhancedSystem& b) {
  if (!(a.signature() == b.signature()) || a.state_count() != b.state_count() || a.initial() != b.initial())
    return false;
  const auto& sig = a.signature();
  for (std::size_t s = 0; s < a.state_count(); ++s) {
    const auto sid = make_id<StateId>(s);
    if (a.state_name(sid) != b.state_name(sid) || !(a.edges(sid) == b.edges(sid))) return false;
    for (std::size_t x = 0; x < sig.action_count(); ++x)
      if (a.step(sid, make_id<ActionId>(x)) != b.step(sid, make_id<ActionId>(x))) return false;
    for (std::size_t u = 0; u < sig.domain_count(); ++u)
      if (a.obs_name(make_id<DomainId>(u), sid) != b.obs_name(make_id<DomainId>(u), sid)) return false;
  }
  return true;
}

StateId step(const PolicyEnhancedSystem& sys, StateId s, ActionId a) { return sys.step(s, a); }
StateId run(const PolicyEnhancedSystem& sys, const Trace& t) { return sys.run(t); }

PolicyEnhancedSystem encode(const Machine& m, const DynamicPolicyAutomaton& p) {
  if (!(m.signature() == p.signature())) throw InputError("encode: signature mismatch");
  const auto& sig = m.signature();
  const std::size_t np = p.state_count();
  auto pair_id = [np](StateId x, StateId y) { return make_id<StateId>(idx(x) * np + idx(y)); };

  std::vector<std::string> names;
  std::vector<StateId> delta;
  std::vector<std::vector<std::string>> obs;
  std::vector<EdgeSet> edges;
  for (std::size_t x = 0; x < m.state_count(); ++x) {
    for (std::size_t y = 0; y < np; ++y) {
      const auto sx = make_id<StateId>(x);
      const auto sy = make_id<StateId>(y);
      names.push_back("(" + m.state_name(sx) + "," + p.state_name(sy) + ")");
      for (std::size_t a = 0; a < sig.action_count(); ++a) {
        const auto act = make_id<ActionId>(a);
        delta.push_back(pair_id(m.step(sx, act), p.step(sy, act)));
      }
      std::vector<std::string> row;
      for (std::size_t u = 0; u < sig.domain_count(); ++u) row.push_back(m.obs(make_id<DomainId>(u), sx));
      obs.push_back(std::move(row));
      edges.push_back(p.edges(sy));
    }
  }
  Automaton base(sig, std::move(names), pair_id(m.initial(), p.initial()), std::move(delta));
  return PolicyEnhancedSystem(std::move(base), obs, std::move(edges));
}

PolicyEnhancedSystem unfold(const PolicyEnhancedSystem& sys, std::size_t depth) {
  const TraceSpace space(sys, depth);
  const auto& sig = sys.signature();
  const std::size_t na = sig.action_count();
  std::vector<std::string> names;
  std::vector<StateId> delta;
  std::vector<std::vector<std::string>> obs;
  std::vector<EdgeSet> edges;
  std::vector<bool> frontier;
  names.reserve(space.size());
  for (TraceId t{}; idx(t) < space.size(); t = make_id<TraceId>(idx(t) + 1)) {
    names.push_back(sig.format_trace(space.trace(t)));
    const bool deep = space.length(t) == depth;
    for (std::size_t a = 0; a < na; ++a)
      delta.push_back(make_id<StateId>(deep ? idx(t) : idx(space.child(t, make_id<ActionId>(a)))));
    const StateId s = space.state(t);
    std::vector<std::string> row;
    for (std::size_t u = 0; u < sig.domain_count(); ++u) row.push_back(sys.obs_name(make_id<DomainId>(u), s));
    obs.push_back(std::move(row));
    edges.push_back(sys.edges(s));
    frontier.push_back(deep && na > 0);
  }
  Automaton base(sig, std::move(names), StateId{}, std::move(delta));
  PolicyEnhancedSystem out(std::move(base), obs, std::move(edges));
  out.mark_truncated(depth, std::move(frontier));
  return out;
}

BisimResult check_bisimilar(const PolicyEnhancedSystem& a, const PolicyEnhancedSystem& b, std::size_t depth) {
  if (!(a.signature() == b.signature())) throw InputError("check_bisimilar: signature mismatch");
  const auto& sig = a.signature();
  // Breadth-first over trace pairs keeps the first witness shortlex-minimal.
  struct Item {
    StateId sa, sb;
    Trace t;
  };
  std::deque<Item> queue{{a.initial(), b.initial(), {}}};
  while (!queue.empty()) {
    Item it = std::move(queue.front());
    queue.pop_front();
    for (std::size_t u = 0; u < sig.domain_count(); ++u) {
      const auto du = make_id<DomainId>(u);
      if (a.obs_name(du, it.sa) != b.obs_name(du, it.sb)) return {false, it.t, du};
    }
    if (it.t.size() == depth) continue;
    for (std::size_t x = 0; x < sig.action_count(); ++x) {
      const auto act = make_id<ActionId>(x);
      Trace next = it.t;
      next.push_back(act);
      queue.push_back({a.step(it.sa, act), b.step(it.sb, act), std::move(next)});
    }
  }
  return {};
}

PolicyEnhancedSystem normalize_inactive(const PolicyEnhancedSystem& sys, std::size_t* removed) {
  const auto& sig = sys.signature();
  std::vector<EdgeSet> edges;
  std::size_t count = 0;
  for (std::size_t s = 0; s < sys.state_count(); ++s) {
    EdgeSet e = sys.edges(make_id<StateId>(s));
    for (auto [u, v] : e.pairs()) {
      if (sig.inactive(u)) {
        e.remove(u, v);
        ++count;
      }
    }
    edges.push_back(std::move(e));
  }
  if (removed) *removed = count;
  if (count == 0) return sys;
  return sys.with_edges(std::move(edges));
}

}  // namespace nif
