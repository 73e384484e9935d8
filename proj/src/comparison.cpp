#include "nif/comparison.hpp"

namespace nif {

namespace {

// dsrc of every suffix: result[i] = dsrc(trace[i..], u, states[i]) where
// states[i] is the state reached from s after trace[0..i).
std::vector<DomainSet> suffix_sources(const PolicyEnhancedSystem& sys, const Trace& trace, std::size_t from,
                                      DomainId u, StateId s) {
  const auto& sig = sys.signature();
  const std::size_t n = trace.size() - from;
  std::vector<StateId> states(n + 1);
  states[0] = s;
  for (std::size_t i = 0; i < n; ++i) states[i + 1] = sys.step(states[i], trace[from + i]);

  std::vector<DomainSet> out(n + 1, DomainSet(sig.domain_count(), false));
  out[n][idx(u)] = true;
  for (std::size_t i = n; i > 0; --i) {
    const DomainId actor = sig.dom(trace[from + i - 1]);
    out[i - 1] = out[i];
    for (std::size_t v = 0; v < sig.domain_count(); ++v) {
      if (out[i][v] && sys.permits(states[i - 1], actor, make_id<DomainId>(v))) {
        out[i - 1][idx(actor)] = true;
        break;
      }
    }
  }
  return out;
}

bool flows_into(const PolicyEnhancedSystem& sys, StateId s, DomainId actor, const DomainSet& targets) {
  for (std::size_t v = 0; v < targets.size(); ++v)
    if (targets[v] && sys.permits(s, actor, make_id<DomainId>(v))) return true;
  return false;
}

}  // namespace

DomainSet dsrc(const PolicyEnhancedSystem& sys, const Trace& trace, DomainId u, StateId s) {
  if (idx(u) >= sys.signature().domain_count()) throw InputError("unknown domain id");
  return suffix_sources(sys, trace, 0, u, s).front();
}

Trace lpurge(const PolicyEnhancedSystem& sys, const Trace& trace, DomainId u, StateId s) {
  if (idx(u) >= sys.signature().domain_count()) throw InputError("unknown domain id");
  const auto& sig = sys.signature();
  const auto sources = suffix_sources(sys, trace, 0, u, s);
  Trace out;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (flows_into(sys, s, sig.dom(trace[i]), sources[i])) out.push_back(trace[i]);
    s = sys.step(s, trace[i]);
  }
  return out;
}

Trace dipurge(const PolicyEnhancedSystem& sys, const Trace& trace, DomainId u, StateId s) {
  if (idx(u) >= sys.signature().domain_count()) throw InputError("unknown domain id");
  const auto& sig = sys.signature();
  Trace out;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    // The remaining suffix is re-evaluated from the current state, which
    // depends on earlier keep/delete decisions.
    const DomainSet src = suffix_sources(sys, trace, i, u, s).front();
    if (src[idx(sig.dom(trace[i]))]) {
      out.push_back(trace[i]);
      s = sys.step(s, trace[i]);
    }
  }
  return out;
}

}  // namespace nif
