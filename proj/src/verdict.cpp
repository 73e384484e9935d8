#include "nif/verdict.hpp"

namespace nif {

const char* to_string(Outcome o) noexcept {
  switch (o) {
    case Outcome::Insecure: return "INSECURE";
    case Outcome::BoundedSecure: return "BOUNDED_SECURE";
    case Outcome::CertifiedSecure: return "CERTIFIED_SECURE";
    case Outcome::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

std::string describe(const Verdict& v, const PolicyEnhancedSystem& sys) {
  const auto& sig = sys.signature();
  std::string out = v.property + ": " + to_string(v.outcome);
  if (v.outcome == Outcome::BoundedSecure) out += " (depth " + std::to_string(v.depth) + ")";
  if (!v.witness) return out;
  const Witness& w = *v.witness;
  std::string parts;
  auto add = [&](const std::string& s) { parts += (parts.empty() ? "" : ", ") + s; };
  for (StateId s : w.states) add(sys.state_name(s));
  for (const Trace& t : w.traces) add(sig.format_trace(t));
  for (DomainId d : w.domains) add(sig.domain_name(d));
  out += " (" + parts + ")";
  if (w.purged) out += " purged=" + sig.format_trace(*w.purged);
  if (!w.observations.empty()) {
    out += " obs=";
    for (std::size_t i = 0; i < w.observations.size(); ++i) out += (i ? "/" : "") + w.observations[i];
  }
  return out;
}

}  // namespace nif
