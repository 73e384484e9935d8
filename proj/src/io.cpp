#include "nif/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace nif {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : InputError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

const PolicyEnhancedSystem& SystemFile::select(const std::optional<std::string>& variant) const {
  if (!variant) return base;
  auto it = variants.find(*variant);
  if (it == variants.end()) throw InputError("unknown variant '" + *variant + "'");
  return it->second;
}

namespace {

struct Token {
  std::string text;
  std::size_t column;
};

struct Line {
  std::size_t number;
  std::string key;
  std::size_t key_column;
  std::vector<Token> args;
};

std::vector<Token> split(std::string_view s, std::size_t base_column) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back({std::string(s.substr(start, i - start)), base_column + start});
  }
  return out;
}

std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    ++number;
    pos = end + 1;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    const auto colon = raw.find(':');
    const auto first = raw.find_first_not_of(" \t");
    if (first == std::string_view::npos) {
      if (end == text.size()) break;
      continue;
    }
    if (colon == std::string_view::npos) throw ParseError(number, first + 1, "expected 'keyword:'");
    std::string key(raw.substr(first, colon - first));
    while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back()))) key.pop_back();
    lines.push_back({number, key, first + 1, split(raw.substr(colon + 1), colon + 2)});
    if (end == text.size()) break;
  }
  return lines;
}

class Builder {
 public:
  explicit Builder(const std::vector<Line>& lines) : lines_(lines) {}

  SystemFile build() {
    const Line& dl = single("domains");
    std::vector<std::string> domains;
    for (const auto& t : dl.args) domains.push_back(t.text);
    const Line& al = single("actions");
    std::vector<Signature::ActionDecl> actions;
    for (const auto& t : al.args) {
      const auto at = t.text.find('@');
      if (at == std::string::npos || at == 0 || at + 1 == t.text.size())
        throw ParseError(al.number, t.column, "action must be written name@domain");
      actions.push_back({t.text.substr(0, at), t.text.substr(at + 1)});
    }
    try {
      sig_ = Signature(domains, actions);
    } catch (const InputError& e) {
      throw ParseError(dl.number, dl.key_column, e.what());
    }
    const Line& sl = single("states");
    for (const auto& t : sl.args) state_names_.push_back(t.text);
    if (state_names_.empty()) throw ParseError(sl.number, sl.key_column, "no states declared");
    std::set<std::string> unique(state_names_.begin(), state_names_.end());
    if (unique.size() != state_names_.size()) throw ParseError(sl.number, sl.key_column, "duplicate state");
    const Line& il = single("initial");
    if (il.args.size() != 1) throw ParseError(il.number, il.key_column, "initial takes one state");
    const StateId initial = state(il.args[0], il.number);

    const std::size_t ns = state_names_.size();
    const std::size_t na = sig_.action_count();
    const std::size_t nd = sig_.domain_count();
    std::vector<StateId> delta(ns * na);
    std::vector<bool> declared(ns * na, false);
    for (std::size_t s = 0; s < ns; ++s)
      for (std::size_t a = 0; a < na; ++a) delta[s * na + a] = make_id<StateId>(s);

    std::optional<std::string> obs_default;
    std::vector<std::vector<std::optional<std::string>>> obs(ns, std::vector<std::optional<std::string>>(nd));
    std::vector<EdgeSet> edges(ns, EdgeSet(nd));
    struct VariantEdit {
      std::size_t line;
      bool add;
      StateId s;
      DomainId u, v;
    };
    std::map<std::string, std::vector<VariantEdit>> edits;
    SystemFile out;

    for (const Line& l : lines_) {
      if (l.key == "domains" || l.key == "actions" || l.key == "states" || l.key == "initial") continue;
      if (l.key == "trans") {
        arity(l, 3);
        const StateId s = state(l.args[0], l.number);
        const ActionId a = action(l.args[1], l.number);
        const StateId t = state(l.args[2], l.number);
        const std::size_t slot = idx(s) * na + idx(a);
        if (declared[slot] && delta[slot] != t)
          throw ParseError(l.number, l.args[2].column,
                           "nondeterministic transition: " + l.args[0].text + " " + l.args[1].text +
                               " already goes to " + state_names_[idx(delta[slot])]);
        declared[slot] = true;
        delta[slot] = t;
      } else if (l.key == "obs") {
        arity(l, 3);
        const StateId s = state(l.args[0], l.number);
        const DomainId u = domain(l.args[1], l.number);
        auto& cell = obs[idx(s)][idx(u)];
        if (cell && *cell != l.args[2].text)
          throw ParseError(l.number, l.args[2].column, "conflicting observation for this state and domain");
        cell = l.args[2].text;
      } else if (l.key == "obs-default") {
        arity(l, 1);
        obs_default = l.args[0].text;
      } else if (l.key == "edge") {
        arity(l, 3);
        edges[idx(state(l.args[0], l.number))].add(domain(l.args[1], l.number), domain(l.args[2], l.number));
      } else if (l.key.rfind("variant", 0) == 0) {
        const auto parts = split(l.key, l.key_column - 1);
        if (parts.size() != 2 || parts[0].text != "variant")
          throw ParseError(l.number, l.key_column, "expected 'variant NAME:'");
        if (l.args.size() != 4 || (l.args[0].text != "edge" && l.args[0].text != "noedge"))
          throw ParseError(l.number, l.key_column, "variant line must be 'edge S U V' or 'noedge S U V'");
        const std::string& name = parts[1].text;
        if (!edits.count(name)) out.variant_names.push_back(name);
        edits[name].push_back({l.number, l.args[0].text == "edge", state(l.args[1], l.number),
                               domain(l.args[2], l.number), domain(l.args[3], l.number)});
      } else {
        throw ParseError(l.number, l.key_column, "unknown keyword '" + l.key + "'");
      }
    }

    std::vector<std::vector<std::string>> table(ns, std::vector<std::string>(nd));
    for (std::size_t s = 0; s < ns; ++s)
      for (std::size_t u = 0; u < nd; ++u) {
        if (obs[s][u]) {
          table[s][u] = *obs[s][u];
        } else if (obs_default) {
          table[s][u] = *obs_default;
        } else {
          throw ParseError(sl.number, sl.key_column, "observation missing for state " + state_names_[s] + " and domain " +
                                     sig_.domain_name(make_id<DomainId>(u)));
        }
      }

    Automaton base(sig_, state_names_, initial, delta);
    out.base = PolicyEnhancedSystem(base, table, edges);
    for (const auto& name : out.variant_names) {
      auto ve = edges;
      for (const auto& e : edits[name]) {
        if (e.add)
          ve[idx(e.s)].add(e.u, e.v);
        else
          ve[idx(e.s)].remove(e.u, e.v);
      }
      out.variants.emplace(name, out.base.with_edges(std::move(ve)));
    }
    return out;
  }

 private:
  const Line& single(const std::string& key) {
    const Line* found = nullptr;
    for (const auto& l : lines_) {
      if (l.key != key) continue;
      if (found) throw ParseError(l.number, l.key_column, "'" + key + "' declared twice");
      found = &l;
    }
    if (!found) throw ParseError(0, 0, "missing '" + key + ":' line");
    return *found;
  }
  static void arity(const Line& l, std::size_t n) {
    if (l.args.size() != n)
      throw ParseError(l.number, l.key_column, "'" + l.key + "' expects " + std::to_string(n) + " argument(s)");
  }
  StateId state(const Token& t, std::size_t line) const {
    for (std::size_t i = 0; i < state_names_.size(); ++i)
      if (state_names_[i] == t.text) return make_id<StateId>(i);
    throw ParseError(line, t.column, "unknown state '" + t.text + "'");
  }
  ActionId action(const Token& t, std::size_t line) const {
    if (auto a = sig_.find_action(t.text)) return *a;
    throw ParseError(line, t.column, "unknown action '" + t.text + "'");
  }
  DomainId domain(const Token& t, std::size_t line) const {
    if (auto d = sig_.find_domain(t.text)) return *d;
    throw ParseError(line, t.column, "unknown domain '" + t.text + "'");
  }

  const std::vector<Line>& lines_;
  Signature sig_;
  std::vector<std::string> state_names_;
};

bool printable_token(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (std::isspace(static_cast<unsigned char>(c)) || c == '#' || c == ':') return false;
  return true;
}

}  // namespace

SystemFile parse_system_file(std::string_view text) { return Builder(tokenize(text)).build(); }

PolicyEnhancedSystem parse_system(std::string_view text, const std::optional<std::string>& variant) {
  return parse_system_file(text).select(variant);
}

std::string print_system(const PolicyEnhancedSystem& sys) {
  const auto& sig = sys.signature();
  std::ostringstream out;
  auto check = [](const std::string& s) {
    if (!printable_token(s)) throw InputError("identifier or token '" + s + "' cannot be written in the .nif format");
    return s;
  };
  out << "domains:";
  for (std::size_t u = 0; u < sig.domain_count(); ++u) out << ' ' << check(sig.domain_name(make_id<DomainId>(u)));
  out << "\nactions:";
  for (std::size_t a = 0; a < sig.action_count(); ++a) {
    const auto act = make_id<ActionId>(a);
    out << ' ' << check(sig.action_name(act)) << '@' << sig.domain_name(sig.dom(act));
  }
  out << "\nstates:";
  for (std::size_t s = 0; s < sys.state_count(); ++s) out << ' ' << check(sys.state_name(make_id<StateId>(s)));
  out << "\ninitial: " << sys.state_name(sys.initial()) << '\n';
  for (std::size_t s = 0; s < sys.state_count(); ++s)
    for (std::size_t a = 0; a < sig.action_count(); ++a) {
      const auto sid = make_id<StateId>(s);
      const StateId t = sys.step(sid, make_id<ActionId>(a));
      if (t != sid)
        out << "trans: " << sys.state_name(sid) << ' ' << sig.action_name(make_id<ActionId>(a)) << ' '
            << sys.state_name(t) << '\n';
    }
  for (std::size_t s = 0; s < sys.state_count(); ++s)
    for (std::size_t u = 0; u < sig.domain_count(); ++u)
      out << "obs: " << sys.state_name(make_id<StateId>(s)) << ' ' << sig.domain_name(make_id<DomainId>(u)) << ' '
          << check(sys.obs_name(make_id<DomainId>(u), make_id<StateId>(s))) << '\n';
  for (std::size_t s = 0; s < sys.state_count(); ++s)
    for (auto [u, v] : sys.edges(make_id<StateId>(s)).pairs())
      out << "edge: " << sys.state_name(make_id<StateId>(s)) << ' ' << sig.domain_name(u) << ' '
          << sig.domain_name(v) << '\n';
  return out.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace nif
