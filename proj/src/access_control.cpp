#include "nif/access_control.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "nif/checkers.hpp"
#include "nif/purge.hpp"

namespace nif {

StructuredSystem::StructuredSystem(Spec spec)
    : base_(std::move(spec.base)),
      nd_(base_.signature().domain_count()),
      objects_(std::move(spec.objects)),
      oset_(std::move(spec.oset)) {
  const std::size_t ns = base_.state_count();
  if (oset_.size() != nd_) throw InputError("need one oset object per domain");
  for (ObjectId o : oset_)
    if (idx(o) >= objects_.size()) throw InputError("oset object out of range");
  if (spec.contents.size() != ns || spec.observe.size() != ns || spec.alter.size() != ns)
    throw InputError("structured tables must have one row per state");
  std::unordered_map<std::string, ValueId> interned;
  contents_.reserve(ns * objects_.size());
  for (std::size_t s = 0; s < ns; ++s) {
    if (spec.contents[s].size() != objects_.size()) throw InputError("contents row has wrong object count");
    if (spec.observe[s].size() != nd_ || spec.alter[s].size() != nd_)
      throw InputError("access table row has wrong domain count");
    for (const auto& v : spec.contents[s]) {
      auto [it, fresh] = interned.try_emplace(v, make_id<ValueId>(values_.size()));
      if (fresh) values_.push_back(v);
      contents_.push_back(it->second);
    }
    for (std::size_t u = 0; u < nd_; ++u) {
      for (auto* table : {&spec.observe, &spec.alter}) {
        ObjectSet set = (*table)[s][u];
        std::sort(set.begin(), set.end());
        set.erase(std::unique(set.begin(), set.end()), set.end());
        for (ObjectId o : set)
          if (idx(o) >= objects_.size()) throw InputError("access table mentions an unknown object");
        (table == &spec.observe ? observe_ : alter_).push_back(std::move(set));
      }
    }
  }
}

std::string StructuredSystem::encode(const ObjectSet& set) const {
  std::string out = "{";
  for (std::size_t i = 0; i < set.size(); ++i) out += (i ? "," : "") + objects_.at(idx(set[i]));
  return out + "}";
}

void StructuredSystem::validate() const {
  for (std::size_t s = 0; s < base_.state_count(); ++s) {
    const auto sid = make_id<StateId>(s);
    for (std::size_t u = 0; u < nd_; ++u) {
      const auto du = make_id<DomainId>(u);
      const auto& obs = observe(du, sid);
      if (!std::binary_search(obs.begin(), obs.end(), oset(du)))
        throw StructuralError("oset(" + base_.signature().domain_name(du) + ") is not observable by its domain in state " +
                              base_.state_name(sid));
      if (value_name(contents(oset(du), sid)) != encode(obs))
        throw StructuralError("contents of " + object_name(oset(du)) + " differ from the observable set in state " +
                              base_.state_name(sid));
    }
  }
}

bool dynacrel(const StructuredSystem& sys, DomainId u, StateId a, StateId b) {
  for (ObjectId o : sys.observe(u, a))
    if (sys.contents(o, a) != sys.contents(o, b)) return false;
  return true;
}

const char* to_string(DrmCondition c) noexcept {
  switch (c) {
    case DrmCondition::Drm1: return "DRM-1";
    case DrmCondition::Drm2: return "DRM-2";
    case DrmCondition::Drm3: return "DRM-3";
    case DrmCondition::Drm4: return "DRM-4";
    case DrmCondition::Drm5: return "DRM-5";
    case DrmCondition::Drm5Strong: return "DRM-5'";
    case DrmCondition::Drm6: return "DRM-6";
  }
  return "?";
}

const DrmLine& DrmReport::line(DrmCondition c) const {
  for (const auto& l : lines)
    if (l.condition == c) return l;
  throw std::out_of_range("condition not in report");
}

bool DrmReport::base_conditions_hold() const {
  for (auto c : {DrmCondition::Drm1, DrmCondition::Drm2, DrmCondition::Drm3, DrmCondition::Drm4, DrmCondition::Drm5,
                 DrmCondition::Drm6})
    if (!holds(c)) return false;
  return true;
}

namespace {

// Key of a state's class under dynacrel for u: the observable set plus the
// contents of every observable object. Equal keys iff related, given the
// structural invariants.
std::vector<std::uint32_t> class_key(const StructuredSystem& sys, DomainId u, StateId s) {
  std::vector<std::uint32_t> key;
  for (ObjectId o : sys.observe(u, s)) {
    key.push_back(static_cast<std::uint32_t>(idx(o)));
    key.push_back(static_cast<std::uint32_t>(idx(sys.contents(o, s))));
  }
  return key;
}

ObjectSet intersect(const ObjectSet& a, const ObjectSet& b) {
  ObjectSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

class DrmChecker {
 public:
  DrmChecker(const StructuredSystem& sys, std::size_t depth) : sys_(sys), base_(sys.base()) {
    const auto& sig = base_.signature();
    nd_ = sig.domain_count();
    na_ = sig.action_count();
    // States within depth steps of the initial state, in id order.
    std::vector<std::size_t> dist(base_.state_count(), SIZE_MAX);
    std::vector<StateId> queue{base_.initial()};
    dist[idx(base_.initial())] = 0;
    for (std::size_t i = 0; i < queue.size(); ++i) {
      const StateId s = queue[i];
      if (dist[idx(s)] == depth) continue;
      for (std::size_t a = 0; a < na_; ++a) {
        const StateId t = base_.step(s, make_id<ActionId>(a));
        if (dist[idx(t)] == SIZE_MAX) {
          dist[idx(t)] = dist[idx(s)] + 1;
          queue.push_back(t);
        }
      }
    }
    for (std::size_t s = 0; s < dist.size(); ++s)
      if (dist[s] != SIZE_MAX) states_.push_back(make_id<StateId>(s));
    bool all_reachable_inside = true;
    for (std::size_t s = 0; s < dist.size(); ++s)
      if (dist[s] == depth && !base_.truncated(make_id<StateId>(s)))
        for (std::size_t a = 0; a < na_; ++a)
          if (dist[idx(base_.step(make_id<StateId>(s), make_id<ActionId>(a)))] == SIZE_MAX) all_reachable_inside = false;
    exhaustive_ = all_reachable_inside && !base_.truncation_depth();
    keys_.resize(nd_);
    for (std::size_t u = 0; u < nd_; ++u)
      for (StateId s : states_) keys_[u].emplace(idx(s), class_key(sys_, make_id<DomainId>(u), s));
  }

  const std::vector<StateId>& states() const { return states_; }
  bool exhaustive() const { return exhaustive_; }

  DrmLine drm1() const {
    DrmLine line{DrmCondition::Drm1, true, true, "pairs of reachable states within depth", {}};
    for (std::size_t u = 0; u < nd_; ++u) {
      const auto du = make_id<DomainId>(u);
      std::map<std::vector<std::uint32_t>, StateId> first;
      for (StateId s : states_) {
        const StateId f = first.try_emplace(keys_[u].at(idx(s)), s).first->second;
        if (base_.obs(du, f) != base_.obs(du, s)) return fail(line, {f, s}, std::nullopt, std::nullopt, {du});
      }
    }
    return line;
  }

  DrmLine drm2() const {
    DrmLine line{DrmCondition::Drm2, true, true, "pairs of reachable non-truncated states within depth, all actions", {}};
    const auto& sig = base_.signature();
    for (std::size_t a = 0; a < na_; ++a) {
      const auto act = make_id<ActionId>(a);
      const DomainId x = sig.dom(act);
      // (actor class, object, object contents) -> first state seen.
      std::map<std::tuple<std::vector<std::uint32_t>, std::size_t, std::size_t>, StateId> first;
      for (StateId s : states_) {
        if (base_.truncated(s)) continue;
        for (ObjectId o : sys_.alter(x, s)) {
          const auto key = std::make_tuple(keys_[idx(x)].at(idx(s)), idx(o), idx(sys_.contents(o, s)));
          const StateId f = first.try_emplace(key, s).first->second;
          if (sys_.contents(o, base_.step(f, act)) != sys_.contents(o, base_.step(s, act)))
            return fail(line, {f, s}, act, o, {x});
        }
      }
    }
    return line;
  }

  DrmLine drm3() const {
    DrmLine line{DrmCondition::Drm3, true, true, "reachable non-truncated states within depth, all actions", {}};
    const auto& sig = base_.signature();
    for (StateId s : states_) {
      if (base_.truncated(s)) continue;
      for (std::size_t a = 0; a < na_; ++a) {
        const auto act = make_id<ActionId>(a);
        const StateId t = base_.step(s, act);
        const auto& alt = sys_.alter(sig.dom(act), s);
        for (std::size_t o = 0; o < sys_.object_count(); ++o) {
          const auto obj = make_id<ObjectId>(o);
          if (sys_.contents(obj, t) != sys_.contents(obj, s) && !std::binary_search(alt.begin(), alt.end(), obj))
            return fail(line, {s}, act, obj, {sig.dom(act)});
        }
      }
    }
    return line;
  }

  DrmLine drm4() const {
    DrmLine line{DrmCondition::Drm4, true, true, "reachable non-truncated states within depth, all actions", {}};
    const auto& sig = base_.signature();
    for (StateId s : states_) {
      if (base_.truncated(s)) continue;
      for (std::size_t a = 0; a < na_; ++a) {
        const auto act = make_id<ActionId>(a);
        const StateId t = base_.step(s, act);
        const auto& actor_obs = sys_.observe(sig.dom(act), s);
        for (std::size_t u = 0; u < nd_; ++u) {
          const auto du = make_id<DomainId>(u);
          const auto& before = sys_.observe(du, s);
          for (ObjectId o : sys_.observe(du, t)) {
            if (!std::binary_search(before.begin(), before.end(), o) &&
                !std::binary_search(actor_obs.begin(), actor_obs.end(), o))
              return fail(line, {s}, act, o, {du, sig.dom(act)});
          }
        }
      }
    }
    return line;
  }

  // Weak form requires v->u at both states; the strong form drops that.
  DrmLine drm5(bool strong) const {
    DrmLine line{strong ? DrmCondition::Drm5Strong : DrmCondition::Drm5, true, true,
                 strong ? "pairs of reachable states within depth"
                        : "pairs of traces within depth, evaluated on their end states",
                 {}};
    std::optional<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>> best;
    for (std::size_t u = 0; u < nd_; ++u) {
      for (std::size_t v = 0; v < nd_; ++v) {
        const auto du = make_id<DomainId>(u);
        const auto dv = make_id<DomainId>(v);
        std::map<std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>, StateId> first;
        for (StateId s : states_) {
          if (!strong && !base_.permits(s, dv, du)) continue;
          const StateId f = first.try_emplace({keys_[u].at(idx(s)), keys_[v].at(idx(s))}, s).first->second;
          if (intersect(sys_.observe(du, f), sys_.alter(dv, f)) != intersect(sys_.observe(du, s), sys_.alter(dv, s))) {
            const auto cand = std::make_tuple(idx(f), idx(s), u, v);
            if (!best || cand < *best) best = cand;
            break;
          }
        }
      }
    }
    if (!best) return line;
    const auto [f, s, u, v] = *best;
    return fail(line, {make_id<StateId>(f), make_id<StateId>(s)}, std::nullopt, std::nullopt,
                {make_id<DomainId>(u), make_id<DomainId>(v)});
  }

  DrmLine drm6() const {
    DrmLine line{DrmCondition::Drm6, true, true, "reachable states within depth", {}};
    for (StateId s : states_)
      for (std::size_t u = 0; u < nd_; ++u)
        for (std::size_t v = 0; v < nd_; ++v) {
          const auto du = make_id<DomainId>(u);
          const auto dv = make_id<DomainId>(v);
          const auto common = intersect(sys_.alter(du, s), sys_.observe(dv, s));
          if (!common.empty() && !base_.permits(s, du, dv))
            return fail(line, {s}, std::nullopt, common.front(), {du, dv});
        }
    return line;
  }

 private:
  static DrmLine fail(DrmLine line, std::vector<StateId> states, std::optional<ActionId> a, std::optional<ObjectId> o,
                      std::vector<DomainId> domains) {
    line.holds = false;
    line.witness = DrmWitness{std::move(states), a, o, std::move(domains)};
    return line;
  }

  const StructuredSystem& sys_;
  const PolicyEnhancedSystem& base_;
  std::size_t nd_ = 0;
  std::size_t na_ = 0;
  std::vector<StateId> states_;
  bool exhaustive_ = false;
  std::vector<std::unordered_map<std::size_t, std::vector<std::uint32_t>>> keys_;
};

}  // namespace

DrmReport check_drm(const StructuredSystem& sys, std::size_t depth, bool strong_five) {
  sys.validate();
  const DrmChecker checker(sys, depth);
  DrmReport rep;
  rep.depth = depth;
  rep.states_checked = checker.states().size();
  rep.exhaustive = checker.exhaustive();
  rep.lines = {checker.drm1(), checker.drm2(), checker.drm3(), checker.drm4(), checker.drm5(false)};
  if (strong_five) {
    rep.lines.push_back(checker.drm5(true));
  } else {
    rep.lines.push_back({DrmCondition::Drm5Strong, false, false, "not requested", {}});
  }
  rep.lines.push_back(checker.drm6());
  return rep;
}

std::vector<Verdict> derive_security_from_drm(const DrmReport& report, const StructuredSystem& sys) {
  std::vector<Verdict> out;
  auto make = [&](const char* property, bool ok, const std::string& missing) {
    Verdict v;
    v.property = property;
    v.depth = report.depth;
    if (!ok) {
      v.outcome = Outcome::Inconclusive;
      v.notes.push_back("no certificate: " + missing);
    } else if (report.exhaustive) {
      v.outcome = Outcome::CertifiedSecure;
      v.notes.push_back("reference-monitor conditions hold on every reachable state");
    } else {
      v.outcome = Outcome::BoundedSecure;
      v.notes.push_back("conditions verified on states reachable within depth " + std::to_string(report.depth) +
                        "; the system is bounded, so the certificate is bounded too");
    }
    return v;
  };
  std::string failed;
  for (const auto& l : report.lines) {
    if (l.condition == DrmCondition::Drm5Strong) continue;
    if (!l.holds) failed += std::string(failed.empty() ? "" : ", ") + to_string(l.condition) + " fails";
  }
  out.push_back(make("drm-mayta", failed.empty(), failed));
  const auto& strong = report.line(DrmCondition::Drm5Strong);
  std::string strong_missing = failed;
  if (!strong.checked) strong_missing += std::string(strong_missing.empty() ? "" : ", ") + "DRM-5' not checked";
  else if (!strong.holds) strong_missing += std::string(strong_missing.empty() ? "" : ", ") + "DRM-5' fails";
  out.push_back(make("drm-mustta", strong_missing.empty(), strong_missing));
  (void)sys;
  return out;
}

StructuredSystem ac_complete_construct(const PolicyEnhancedSystem& sys, std::size_t depth,
                                       std::vector<std::string>* notes) {
  const auto verdict = check_ta_may_security(sys, depth);
  if (notes && verdict.insecure())
    notes->push_back("warning: system is not ta-diamond secure at depth " + std::to_string(depth) +
                     "; DRM-1 is expected to fail");
  StructuredSystem::Spec spec;
  spec.base = unfold(sys, depth);
  const auto& sig = sys.signature();
  const std::size_t nd = sig.domain_count();
  for (std::size_t u = 0; u < nd; ++u) spec.objects.push_back(sig.domain_name(make_id<DomainId>(u)));
  for (std::size_t u = 0; u < nd; ++u) {
    spec.objects.push_back("oset(" + sig.domain_name(make_id<DomainId>(u)) + ")");
    spec.oset.push_back(make_id<ObjectId>(nd + u));
  }
  const TraceSpace space(spec.base, depth);
  TreeTable trees;
  const auto may = ta_may_table(space, trees);
  // Unfold state i is trace i, so the tables line up.
  for (std::size_t t = 0; t < space.size(); ++t) {
    const auto tid = make_id<TraceId>(t);
    std::vector<std::string> row;
    std::vector<ObjectSet> observe, alter;
    for (std::size_t u = 0; u < nd; ++u) row.push_back("t" + std::to_string(idx(may.at(tid, make_id<DomainId>(u)))));
    for (std::size_t u = 0; u < nd; ++u) {
      const ObjectSet obs{make_id<ObjectId>(u), make_id<ObjectId>(nd + u)};
      row.push_back("{" + spec.objects[u] + "," + spec.objects[nd + u] + "}");
      observe.push_back(obs);
      ObjectSet alt;
      for (std::size_t v = 0; v < nd; ++v)
        if (spec.base.permits(make_id<StateId>(t), make_id<DomainId>(u), make_id<DomainId>(v)))
          alt.push_back(make_id<ObjectId>(v));
      alter.push_back(std::move(alt));
    }
    spec.contents.push_back(std::move(row));
    spec.observe.push_back(std::move(observe));
    spec.alter.push_back(std::move(alter));
  }
  return StructuredSystem(std::move(spec));
}

std::string describe(const DrmLine& line, const StructuredSystem& sys) {
  std::string out = std::string(to_string(line.condition)) + ": ";
  if (!line.checked) return out + "not checked";
  out += line.holds ? "holds" : "fails";
  if (!line.witness) return out;
  const auto& w = *line.witness;
  const auto& base = sys.base();
  std::string parts;
  auto add = [&](const std::string& s) { parts += (parts.empty() ? "" : ", ") + s; };
  for (StateId s : w.states) add(base.state_name(s));
  if (w.action) add(base.signature().action_name(*w.action));
  if (w.object) add(sys.object_name(*w.object));
  for (DomainId d : w.domains) add(base.signature().domain_name(d));
  return out + " (" + parts + ")";
}

}  // namespace nif
