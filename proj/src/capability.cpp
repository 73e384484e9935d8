#include "nif/capability.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <unordered_map>

namespace nif::cap {

namespace {

bool plain_name(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; });
}

bool plain_value(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (std::isspace(static_cast<unsigned char>(c)) || c == ':' || c == '#' || c == ',' || c == ';' || c == '[' ||
        c == ']' || c == '{' || c == '}')
      return false;
  return true;
}

std::string join_in(const std::vector<std::string>& in) {
  std::string out = "[";
  for (std::size_t i = 0; i < in.size(); ++i) out += (i ? "," : "") + in[i];
  return out + "]";
}

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

}  // namespace

TagUniverse::TagUniverse(std::vector<std::string> processes, std::vector<std::string> basic)
    : processes_(std::move(processes)), basic_(std::move(basic)) {
  for (const auto* list : {&processes_, &basic_})
    for (std::size_t i = 0; i < list->size(); ++i) {
      if (!plain_name((*list)[i])) throw InputError("names must be alphanumeric: '" + (*list)[i] + "'");
      for (std::size_t j = 0; j < i; ++j)
        if ((*list)[i] == (*list)[j]) throw InputError("duplicate name '" + (*list)[i] + "'");
    }
  if (processes_.empty()) throw InputError("a capability system needs at least one process");
  if (2 * tag_count() > 64) throw InputError("too many tags: at most 32 tags (basic and labelled) are supported");
}

std::optional<std::size_t> TagUniverse::find_process(std::string_view name) const {
  for (std::size_t i = 0; i < processes_.size(); ++i)
    if (processes_[i] == name) return i;
  return std::nullopt;
}

std::optional<std::size_t> TagUniverse::find_basic(std::string_view name) const {
  for (std::size_t i = 0; i < basic_.size(); ++i)
    if (basic_[i] == name) return i;
  return std::nullopt;
}

std::string TagUniverse::tag_name(std::size_t tag) const {
  if (tag < basic_.size()) return basic_[tag];
  const std::size_t rest = tag - basic_.size();
  return basic_.at(rest / processes_.size()) + "_" + processes_.at(rest % processes_.size());
}

std::size_t TagUniverse::parse_tag(std::string_view text) const {
  const auto us = text.find('_');
  if (us == std::string_view::npos) {
    if (auto n = find_basic(text)) return *n;
  } else if (auto n = find_basic(text.substr(0, us))) {
    if (auto p = find_process(text.substr(us + 1))) return labelled_tag(*n, *p);
  }
  throw InputError("unknown tag '" + std::string(text) + "'");
}

std::size_t TagUniverse::parse_cap(std::string_view text) const {
  if (text.size() < 2 || (text.back() != '+' && text.back() != '-'))
    throw InputError("capability must be a tag followed by + or -: '" + std::string(text) + "'");
  return cap_bit(parse_tag(text.substr(0, text.size() - 1)), text.back() == '+' ? Sign::Plus : Sign::Minus);
}

std::string TagUniverse::format_tags(TagSet s) const {
  std::string out = "{";
  bool first = true;
  for (std::size_t t = 0; t < tag_count(); ++t)
    if (s >> t & 1) {
      out += (first ? "" : ",") + tag_name(t);
      first = false;
    }
  return out + "}";
}

std::string TagUniverse::format_caps(CapSet c) const {
  std::string out = "{";
  bool first = true;
  for (std::size_t b = 0; b < 2 * tag_count(); ++b)
    if (c >> b & 1) {
      out += (first ? "" : ",") + cap_name(b);
      first = false;
    }
  return out + "}";
}

CapAction set_message(std::size_t p, std::string value) {
  CapAction a;
  a.kind = ActionKind::Data;
  a.process = p;
  a.label = "set_message(" + value + ")";
  a.data = [value](const ObjView& v) {
    DataObjects d = v.data;
    d.message = value;
    return d;
  };
  return a;
}

CapAction copy_in(std::size_t p) {
  CapAction a;
  a.kind = ActionKind::Data;
  a.process = p;
  a.label = "copy_in";
  a.data = [](const ObjView& v) {
    DataObjects d = v.data;
    if (!d.in.empty()) d.message = d.in.back();
    return d;
  };
  return a;
}

CapAction data_action(std::size_t p, std::string label, DataFn fn) {
  CapAction a;
  a.kind = ActionKind::Data;
  a.process = p;
  a.label = std::move(label);
  a.data = std::move(fn);
  return a;
}

CapAction add_cap(std::size_t p, SignSet signs, std::size_t basic) {
  if (signs == 0 || signs > 3) throw InputError("add_cap needs a non-empty subset of {+,-}");
  CapAction a;
  a.kind = ActionKind::AddCap;
  a.process = p;
  a.signs = signs;
  a.basic = basic;
  return a;
}

CapAction drop_cap(std::size_t p, std::size_t cap) {
  CapAction a;
  a.kind = ActionKind::DropCap;
  a.process = p;
  a.cap = cap;
  return a;
}

CapAction add_tag(std::size_t p, std::size_t tag) {
  CapAction a;
  a.kind = ActionKind::AddTag;
  a.process = p;
  a.tag = tag;
  return a;
}

CapAction remove_tag(std::size_t p, std::size_t tag) {
  CapAction a;
  a.kind = ActionKind::RemoveTag;
  a.process = p;
  a.tag = tag;
  return a;
}

CapAction send_message_to(std::size_t p, std::size_t q) {
  CapAction a;
  a.kind = ActionKind::SendMessage;
  a.process = p;
  a.target = q;
  return a;
}

CapAction send_cap(std::size_t p, std::size_t cap, std::size_t q) {
  CapAction a;
  a.kind = ActionKind::SendCap;
  a.process = p;
  a.cap = cap;
  a.target = q;
  return a;
}

std::string action_name(const CapAction& a, const TagUniverse& tags) {
  const std::string p = tags.process_name(a.process) + ".";
  switch (a.kind) {
    case ActionKind::Data: return p + a.label;
    case ActionKind::AddCap: {
      std::string signs = std::string(a.signs & static_cast<SignSet>(Sign::Plus) ? "+" : "") +
                          (a.signs & static_cast<SignSet>(Sign::Minus) ? "-" : "");
      return p + "add_cap(" + signs + "," + tags.tag_name(tags.basic_tag(a.basic)) + ")";
    }
    case ActionKind::DropCap: return p + "drop_cap(" + tags.cap_name(a.cap) + ")";
    case ActionKind::AddTag: return p + "add_tag(" + tags.tag_name(a.tag) + ")";
    case ActionKind::RemoveTag: return p + "remove_tag(" + tags.tag_name(a.tag) + ")";
    case ActionKind::SendMessage: return p + "send_message_to(" + tags.process_name(a.target) + ")";
    case ActionKind::SendCap:
      return p + "send_cap(" + tags.cap_name(a.cap) + "," + tags.process_name(a.target) + ")";
  }
  return p + "?";
}

CapabilityState cap_step(const TagUniverse& tags, const CapabilityState& s, const CapAction& a) {
  if (a.process >= s.procs.size()) throw InputError("action names an unknown process");
  CapabilityState t = s;
  ProcessState& me = t.procs[a.process];
  const auto bit = [](std::size_t i) { return std::uint64_t{1} << i; };
  switch (a.kind) {
    case ActionKind::Data: {
      if (!a.data) throw InputError("data action without an update function");
      const ProcessState& pre = s.procs[a.process];
      me.data = a.data(ObjView{pre.secrecy, pre.caps, pre.data});
      break;
    }
    case ActionKind::AddCap: {
      const std::size_t tag = tags.labelled_tag(a.basic, a.process);
      if (a.signs & static_cast<SignSet>(Sign::Plus)) me.caps |= bit(TagUniverse::cap_bit(tag, Sign::Plus));
      if (a.signs & static_cast<SignSet>(Sign::Minus)) me.caps |= bit(TagUniverse::cap_bit(tag, Sign::Minus));
      break;
    }
    case ActionKind::DropCap: me.caps &= ~bit(a.cap); break;
    case ActionKind::AddTag:
      if (me.caps & bit(TagUniverse::cap_bit(a.tag, Sign::Plus))) me.secrecy |= bit(a.tag);
      break;
    case ActionKind::RemoveTag:
      if (me.caps & bit(TagUniverse::cap_bit(a.tag, Sign::Minus))) me.secrecy &= ~bit(a.tag);
      break;
    case ActionKind::SendMessage: {
      if (a.target >= s.procs.size()) throw InputError("send_message_to names an unknown process");
      const auto& src = s.procs[a.process];
      if ((src.secrecy & ~s.procs[a.target].secrecy) == 0) t.procs[a.target].data.in.push_back(src.data.message);
      break;
    }
    case ActionKind::SendCap: {
      if (a.target >= s.procs.size()) throw InputError("send_cap names an unknown process");
      const auto& src = s.procs[a.process];
      if ((src.secrecy & ~s.procs[a.target].secrecy) == 0 && (src.caps & bit(a.cap)))
        t.procs[a.target].caps |= bit(a.cap);
      break;
    }
  }
  return t;
}

EdgeSet associated_policy(const CapabilityState& s) {
  const std::size_t n = s.procs.size();
  EdgeSet e(n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q)
      if ((s.procs[p].secrecy & ~s.procs[q].secrecy) == 0) e.add(make_id<DomainId>(p), make_id<DomainId>(q));
  return e;
}

void validate_candidate_initial(const TagUniverse& tags, const CapabilityState& s) {
  if (s.procs.size() != tags.process_count()) throw InputError("initial state has the wrong number of processes");
  const std::uint64_t basic_tags = tags.basic_count() >= 64 ? ~0ULL : (1ULL << tags.basic_count()) - 1;
  const std::uint64_t basic_caps = 2 * tags.basic_count() >= 64 ? ~0ULL : (1ULL << (2 * tags.basic_count())) - 1;
  for (std::size_t p = 0; p < s.procs.size(); ++p) {
    if (s.procs[p].secrecy & ~basic_tags)
      throw InputError("initial secrecy set of " + tags.process_name(p) + " mentions a process-labelled tag");
    if (s.procs[p].caps & ~basic_caps)
      throw InputError("initial capability set of " + tags.process_name(p) + " mentions a process-labelled tag");
  }
}

std::string default_obs(const ObjView& v, const TagUniverse& tags) {
  return "S=" + tags.format_tags(v.secrecy) + ";O=" + tags.format_caps(v.caps) +
         ";last=" + (v.data.in.empty() ? std::string("_") : v.data.in.back());
}

namespace {

std::string secrecy_obs(const ObjView& v, const TagUniverse& tags) { return "S=" + tags.format_tags(v.secrecy); }

std::string objects_obs(const ObjView& v, const TagUniverse& tags) {
  std::string out = "S=" + tags.format_tags(v.secrecy) + ";O=" + tags.format_caps(v.caps) + ";m=" + v.data.message +
                    ";in=" + join_in(v.data.in);
  for (const auto& [k, val] : v.data.named) out += ";" + k + "=" + val;
  return out;
}

}  // namespace

std::vector<CapAction> full_alphabet(const TagUniverse& tags, const std::vector<std::string>& values) {
  std::vector<CapAction> out;
  const std::size_t np = tags.process_count();
  for (std::size_t p = 0; p < np; ++p) {
    for (const auto& v : values) out.push_back(set_message(p, v));
    out.push_back(copy_in(p));
    for (std::size_t n = 0; n < tags.basic_count(); ++n)
      for (SignSet c = 1; c <= 3; ++c) out.push_back(add_cap(p, c, n));
    for (std::size_t b = 0; b < 2 * tags.tag_count(); ++b) out.push_back(drop_cap(p, b));
    for (std::size_t t = 0; t < tags.tag_count(); ++t) out.push_back(add_tag(p, t));
    for (std::size_t t = 0; t < tags.tag_count(); ++t) out.push_back(remove_tag(p, t));
    for (std::size_t q = 0; q < np; ++q) out.push_back(send_message_to(p, q));
    for (std::size_t b = 0; b < 2 * tags.tag_count(); ++b)
      for (std::size_t q = 0; q < np; ++q) out.push_back(send_cap(p, b, q));
  }
  return out;
}

CapAction parse_action(std::string_view text, const CapConfig& config) {
  const auto& tags = config.tags;
  const auto w = words(text);
  if (w.size() < 2) throw InputError("action needs a process and an operation: '" + std::string(text) + "'");
  const auto p = tags.find_process(w[0]);
  if (!p) throw InputError("unknown process '" + w[0] + "'");
  auto need = [&](std::size_t n) {
    if (w.size() != n) throw InputError("'" + w[1] + "' expects " + std::to_string(n - 2) + " argument(s)");
  };
  auto process = [&](const std::string& name) {
    if (auto q = tags.find_process(name)) return *q;
    throw InputError("unknown process '" + name + "'");
  };
  const std::string& op = w[1];
  if (op == "set_message") {
    need(3);
    if (std::find(config.values.begin(), config.values.end(), w[2]) == config.values.end())
      throw InputError("'" + w[2] + "' is not a declared message value");
    return set_message(*p, w[2]);
  }
  if (op == "copy_in") {
    need(2);
    return copy_in(*p);
  }
  if (op == "add_cap") {
    need(4);
    SignSet signs = 0;
    for (char c : w[2]) {
      if (c == '+') signs |= static_cast<SignSet>(Sign::Plus);
      else if (c == '-') signs |= static_cast<SignSet>(Sign::Minus);
      else throw InputError("add_cap signs must be +, - or +-");
    }
    const auto n = tags.find_basic(w[3]);
    if (!n) throw InputError("add_cap needs a basic tag name, got '" + w[3] + "'");
    return add_cap(*p, signs, *n);
  }
  if (op == "drop_cap") {
    need(3);
    return drop_cap(*p, tags.parse_cap(w[2]));
  }
  if (op == "add_tag") {
    need(3);
    return add_tag(*p, tags.parse_tag(w[2]));
  }
  if (op == "remove_tag") {
    need(3);
    return remove_tag(*p, tags.parse_tag(w[2]));
  }
  if (op == "send_message_to") {
    need(3);
    return send_message_to(*p, process(w[2]));
  }
  if (op == "send_cap") {
    need(4);
    return send_cap(*p, tags.parse_cap(w[2]), process(w[3]));
  }
  throw InputError("unknown capability action '" + op + "'");
}

CapConfig parse_cap_config(std::string_view text) {
  struct Line {
    std::size_t number;
    std::string key;
    std::string rest;
  };
  std::vector<Line> lines;
  {
    std::istringstream in{std::string(text)};
    std::size_t number = 0;
    for (std::string raw; std::getline(in, raw);) {
      ++number;
      if (auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
      if (words(raw).empty()) continue;
      const auto colon = raw.find(':');
      if (colon == std::string::npos) throw InputError("line " + std::to_string(number) + ": expected 'keyword:'");
      auto key = words(raw.substr(0, colon));
      if (key.size() != 1) throw InputError("line " + std::to_string(number) + ": malformed keyword");
      lines.push_back({number, key[0], raw.substr(colon + 1)});
    }
  }
  auto single = [&](const std::string& key, bool required) -> const Line* {
    const Line* found = nullptr;
    for (const auto& l : lines)
      if (l.key == key) {
        if (found) throw InputError("line " + std::to_string(l.number) + ": '" + key + "' declared twice");
        found = &l;
      }
    if (!found && required) throw InputError("missing '" + key + ":' line");
    return found;
  };
  CapConfig cfg;
  const Line* procs = single("processes", true);
  const Line* tagline = single("tags", false);
  cfg.tags = TagUniverse(words(procs->rest), tagline ? words(tagline->rest) : std::vector<std::string>{});
  if (const Line* vals = single("values", false)) cfg.values = words(vals->rest);
  if (cfg.values.empty()) cfg.values = {"0", "1"};
  for (const auto& v : cfg.values)
    if (!plain_value(v)) throw InputError("message value '" + v + "' contains reserved characters");
  const std::size_t np = cfg.tags.process_count();
  cfg.initial.procs.assign(np, ProcessState{});
  for (auto& ps : cfg.initial.procs) ps.data.message = cfg.values.front();
  cfg.obs.assign(np, default_obs);
  bool full = false;
  for (const auto& l : lines) {
    const auto at = "line " + std::to_string(l.number) + ": ";
    try {
      const auto w = words(l.rest);
      if (l.key == "processes" || l.key == "tags" || l.key == "values") continue;
      if (l.key == "secrecy" || l.key == "caps") {
        if (w.empty()) throw InputError("expected a process name");
        const auto p = cfg.tags.find_process(w[0]);
        if (!p) throw InputError("unknown process '" + w[0] + "'");
        for (std::size_t i = 1; i < w.size(); ++i) {
          if (l.key == "secrecy")
            cfg.initial.procs[*p].secrecy |= 1ULL << cfg.tags.parse_tag(w[i]);
          else
            cfg.initial.procs[*p].caps |= 1ULL << cfg.tags.parse_cap(w[i]);
        }
      } else if (l.key == "action") {
        cfg.alphabet.push_back(parse_action(l.rest, cfg));
      } else if (l.key == "alphabet") {
        if (w.size() != 1 || w[0] != "full") throw InputError("only 'alphabet: full' is supported");
        full = true;
      } else if (l.key == "obs") {
        if (w.size() != 2) throw InputError("expected 'obs: PROCESS default|secrecy|objects'");
        const auto p = cfg.tags.find_process(w[0]);
        if (!p) throw InputError("unknown process '" + w[0] + "'");
        if (w[1] == "default") cfg.obs[*p] = default_obs;
        else if (w[1] == "secrecy") cfg.obs[*p] = secrecy_obs;
        else if (w[1] == "objects") cfg.obs[*p] = objects_obs;
        else throw InputError("unknown observation mode '" + w[1] + "'");
      } else {
        throw InputError("unknown keyword '" + l.key + "'");
      }
    } catch (const InputError& e) {
      throw InputError(at + e.what());
    }
  }
  if (full) {
    if (!cfg.alphabet.empty()) throw InputError("'alphabet: full' cannot be combined with action lines");
    cfg.alphabet = full_alphabet(cfg.tags, cfg.values);
  }
  validate_candidate_initial(cfg.tags, cfg.initial);
  return cfg;
}

std::vector<CapAction> parse_trace_script(std::string_view text, const CapConfig& config) {
  std::vector<CapAction> out;
  std::istringstream in{std::string(text)};
  std::size_t number = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++number;
    if (auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
    if (words(raw).empty()) continue;
    try {
      out.push_back(parse_action(raw, config));
    } catch (const InputError& e) {
      throw InputError("line " + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

std::string format_state(const CapabilityState& s, const TagUniverse& tags) {
  std::string out;
  for (std::size_t p = 0; p < s.procs.size(); ++p) {
    const auto& ps = s.procs[p];
    out += (p ? " " : "") + tags.process_name(p) + "{S=" + tags.format_tags(ps.secrecy) +
           ";O=" + tags.format_caps(ps.caps) + ";m=" + ps.data.message + ";in=" + join_in(ps.data.in);
    for (const auto& [k, v] : ps.data.named) out += ";" + k + "=" + v;
    out += "}";
  }
  return out;
}

CapabilityPes build_pes(const CapConfig& config, std::size_t depth) {
  validate_candidate_initial(config.tags, config.initial);
  const auto& tags = config.tags;
  const std::size_t na = config.alphabet.size();
  std::vector<std::string> domains;
  for (std::size_t p = 0; p < tags.process_count(); ++p) domains.push_back(tags.process_name(p));
  std::vector<Signature::ActionDecl> decls;
  for (const auto& a : config.alphabet) decls.push_back({action_name(a, tags), tags.process_name(a.process)});
  Signature sig(domains, decls);

  CapabilityPes out;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::size_t> level;
  auto intern = [&](const CapabilityState& s, std::size_t lvl) {
    auto [it, fresh] = index.try_emplace(format_state(s, tags), out.states.size());
    if (fresh) {
      out.states.push_back(s);
      level.push_back(lvl);
    }
    return it->second;
  };
  intern(config.initial, 0);
  std::vector<StateId> delta;
  std::vector<bool> frontier;
  for (std::size_t i = 0; i < out.states.size(); ++i) {
    const bool deep = level[i] >= depth;
    bool cut = false;
    for (const auto& a : config.alphabet) {
      const CapabilityState next = cap_step(tags, out.states[i], a);
      std::size_t target = i;
      if (!deep) {
        target = intern(next, level[i] + 1);
      } else if (auto it = index.find(format_state(next, tags)); it != index.end()) {
        target = it->second;
      } else {
        cut = true;
      }
      delta.push_back(make_id<StateId>(target));
    }
    frontier.push_back(cut);
  }
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> obs;
  std::vector<EdgeSet> edges;
  for (std::size_t i = 0; i < out.states.size(); ++i) {
    names.push_back("c" + std::to_string(i));
    std::vector<std::string> row;
    for (std::size_t p = 0; p < tags.process_count(); ++p) {
      const auto& ps = out.states[i].procs[p];
      row.push_back(config.obs.at(p)(ObjView{ps.secrecy, ps.caps, ps.data}, tags));
    }
    obs.push_back(std::move(row));
    edges.push_back(associated_policy(out.states[i]));
  }
  (void)na;
  Automaton base(sig, std::move(names), StateId{}, std::move(delta));
  out.pes = PolicyEnhancedSystem(std::move(base), obs, std::move(edges));
  out.truncated = std::find(frontier.begin(), frontier.end(), true) != frontier.end();
  if (out.truncated) out.pes.mark_truncated(depth, std::move(frontier));
  return out;
}

StructuredSystem capability_drm_interpretation(const CapConfig& config, std::size_t depth) {
  return capability_drm_interpretation(build_pes(config, depth), config);
}

StructuredSystem capability_drm_interpretation(const CapabilityPes& built, const CapConfig& config) {
  const auto& tags = config.tags;
  const std::size_t np = tags.process_count();
  // Named data objects: the union over all reachable states, per process.
  std::vector<std::vector<std::string>> named(np);
  for (const auto& s : built.states)
    for (std::size_t p = 0; p < np; ++p)
      for (const auto& [k, v] : s.procs[p].data.named)
        if (std::find(named[p].begin(), named[p].end(), k) == named[p].end()) named[p].push_back(k);
  for (auto& n : named) std::sort(n.begin(), n.end());

  StructuredSystem::Spec spec;
  spec.base = built.pes;
  std::vector<std::size_t> first(np), in_obj(np), caps_obj(np);
  for (std::size_t p = 0; p < np; ++p) {
    const auto& name = tags.process_name(p);
    first[p] = spec.objects.size();
    spec.objects.push_back("S_" + name);
    caps_obj[p] = spec.objects.size();
    spec.objects.push_back("O_" + name);
    spec.objects.push_back("m_" + name);
    in_obj[p] = spec.objects.size();
    spec.objects.push_back("in_" + name);
    for (const auto& k : named[p]) spec.objects.push_back(k + "_" + name);
  }
  const std::size_t data_end = spec.objects.size();
  for (std::size_t p = 0; p < np; ++p) {
    spec.oset.push_back(make_id<ObjectId>(spec.objects.size()));
    spec.objects.push_back("oset(" + tags.process_name(p) + ")");
  }
  auto own = [&](std::size_t p) {
    ObjectSet o;
    const std::size_t end = p + 1 < np ? first[p + 1] : data_end;
    for (std::size_t i = first[p]; i < end; ++i) o.push_back(make_id<ObjectId>(i));
    return o;
  };
  std::vector<std::string> oset_contents(np);
  std::vector<ObjectSet> observe(np);
  for (std::size_t p = 0; p < np; ++p) {
    observe[p] = own(p);
    observe[p].push_back(spec.oset[p]);
    std::sort(observe[p].begin(), observe[p].end());
    std::string enc = "{";
    for (std::size_t i = 0; i < observe[p].size(); ++i) enc += (i ? "," : "") + spec.objects[idx(observe[p][i])];
    oset_contents[p] = enc + "}";
  }
  for (const auto& s : built.states) {
    std::vector<std::string> row;
    std::vector<ObjectSet> alter;
    for (std::size_t p = 0; p < np; ++p) {
      const auto& ps = s.procs[p];
      row.push_back(tags.format_tags(ps.secrecy));
      row.push_back(tags.format_caps(ps.caps));
      row.push_back(ps.data.message);
      row.push_back(join_in(ps.data.in));
      for (const auto& k : named[p]) {
        auto it = ps.data.named.find(k);
        row.push_back(it == ps.data.named.end() ? "_" : it->second);
      }
      ObjectSet alt = own(p);
      for (std::size_t q = 0; q < np; ++q)
        if (q != p && (ps.secrecy & ~s.procs[q].secrecy) == 0) {
          alt.push_back(make_id<ObjectId>(in_obj[q]));
          alt.push_back(make_id<ObjectId>(caps_obj[q]));
        }
      alter.push_back(std::move(alt));
    }
    for (std::size_t p = 0; p < np; ++p) row.push_back(oset_contents[p]);
    spec.contents.push_back(std::move(row));
    spec.observe.push_back(observe);
    spec.alter.push_back(std::move(alter));
  }
  return StructuredSystem(std::move(spec));
}

}  // namespace nif::cap
