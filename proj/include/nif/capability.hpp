#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nif/access_control.hpp"
#include "nif/model.hpp"

namespace nif::cap {

using TagSet = std::uint64_t;  // bit i: tag i
using CapSet = std::uint64_t;  // bit 2t: t+, bit 2t+1: t-

enum class Sign : std::uint8_t { Plus = 1, Minus = 2 };
using SignSet = std::uint8_t;  // bitwise-or of Sign values

/// Basic tag names N and processes P. Tag ids: basic tag i is i; the tag n_p
/// labelled with process p is |N| + n*|P| + p.
class TagUniverse {
 public:
  TagUniverse() = default;
  TagUniverse(std::vector<std::string> processes, std::vector<std::string> basic);

  std::size_t process_count() const noexcept { return processes_.size(); }
  std::size_t basic_count() const noexcept { return basic_.size(); }
  std::size_t tag_count() const noexcept { return basic_.size() * (1 + processes_.size()); }
  const std::string& process_name(std::size_t p) const { return processes_.at(p); }
  std::optional<std::size_t> find_process(std::string_view name) const;

  std::size_t basic_tag(std::size_t n) const { return n; }
  std::size_t labelled_tag(std::size_t n, std::size_t p) const { return basic_.size() + n * processes_.size() + p; }
  bool is_basic(std::size_t tag) const noexcept { return tag < basic_.size(); }
  std::string tag_name(std::size_t tag) const;
  /// "n" or "n_p".
  std::size_t parse_tag(std::string_view text) const;
  std::optional<std::size_t> find_basic(std::string_view name) const;

  static std::size_t cap_bit(std::size_t tag, Sign s) { return 2 * tag + (s == Sign::Minus ? 1 : 0); }
  std::string cap_name(std::size_t bit) const { return tag_name(bit / 2) + (bit % 2 ? "-" : "+"); }
  /// "n+", "n_p-".
  std::size_t parse_cap(std::string_view text) const;

  std::string format_tags(TagSet s) const;
  std::string format_caps(CapSet c) const;

 private:
  std::vector<std::string> processes_;
  std::vector<std::string> basic_;
};

/// Data_p: the outgoing message, the input buffer, and further named objects.
struct DataObjects {
  std::string message;
  std::vector<std::string> in;
  std::map<std::string, std::string> named;
  friend bool operator==(const DataObjects&, const DataObjects&) = default;
};

struct ProcessState {
  TagSet secrecy = 0;
  CapSet caps = 0;
  DataObjects data;
  friend bool operator==(const ProcessState&, const ProcessState&) = default;
};

struct CapabilityState {
  std::vector<ProcessState> procs;
  friend bool operator==(const CapabilityState&, const CapabilityState&) = default;
};

/// Read-only view of Obj_p, the only input available to data actions and
/// observation functions of process p.
struct ObjView {
  TagSet secrecy;
  CapSet caps;
  const DataObjects& data;
};

using DataFn = std::function<DataObjects(const ObjView&)>;
using ObsFn = std::function<std::string(const ObjView&, const TagUniverse&)>;

enum class ActionKind { Data, AddCap, DropCap, AddTag, RemoveTag, SendMessage, SendCap };

struct CapAction {
  ActionKind kind = ActionKind::Data;
  std::size_t process = 0;
  std::string label;     // data actions: display name
  DataFn data;           // data actions
  SignSet signs = 0;     // add_cap
  std::size_t basic = 0; // add_cap: basic name n
  std::size_t tag = 0;   // add_tag, remove_tag
  std::size_t cap = 0;   // drop_cap, send_cap (capability bit)
  std::size_t target = 0;  // send_message_to, send_cap
};

CapAction set_message(std::size_t p, std::string value);
/// m_p := last element of in_p (no change when in_p is empty).
CapAction copy_in(std::size_t p);
CapAction add_cap(std::size_t p, SignSet signs, std::size_t basic);
CapAction drop_cap(std::size_t p, std::size_t cap);
CapAction add_tag(std::size_t p, std::size_t tag);
CapAction remove_tag(std::size_t p, std::size_t tag);
CapAction send_message_to(std::size_t p, std::size_t q);
CapAction send_cap(std::size_t p, std::size_t cap, std::size_t q);
CapAction data_action(std::size_t p, std::string label, DataFn fn);

/// "p.add_tag(n_p)" and so on.
std::string action_name(const CapAction& a, const TagUniverse& tags);

/// Applies the guarded assignments of the action. Failing guards leave the
/// state unchanged. A data action only replaces Data_p.
CapabilityState cap_step(const TagUniverse& tags, const CapabilityState& s, const CapAction& a);

/// p -> q iff S_p is a subset of S_q; reflexive pairs always present.
EdgeSet associated_policy(const CapabilityState& s);

/// Throws InputError if the state mentions process-labelled tags.
void validate_candidate_initial(const TagUniverse& tags, const CapabilityState& s);

/// obs_p(s) = (S_p, O_p, last element of in_p or _).
std::string default_obs(const ObjView& v, const TagUniverse& tags);

struct CapConfig {
  TagUniverse tags;
  std::vector<std::string> values;  // message alphabet; values[0] is the initial m_p
  CapabilityState initial;
  std::vector<CapAction> alphabet;
  std::vector<ObsFn> obs;  // per process
};

/// Literal instantiation: every action form over every tag, capability,
/// sign set, target and message value.
std::vector<CapAction> full_alphabet(const TagUniverse& tags, const std::vector<std::string>& values);

/// Line-oriented format:
///   processes: p q
///   tags: n
///   values: 0 1
///   secrecy: q n          (initial S_q)
///   caps: q n-            (initial O_q)
///   action: p add_cap +- n
///   alphabet: full        (instead of action lines)
///   obs: p default|secrecy|objects
/// '#' starts a comment.
CapConfig parse_cap_config(std::string_view text);

/// One action per line, written like an action: line without the keyword,
/// e.g. "p add_tag n_p". Blank lines and '#' comments are skipped.
std::vector<CapAction> parse_trace_script(std::string_view text, const CapConfig& config);

/// Parses one action such as "p send_cap n_p+ q".
CapAction parse_action(std::string_view text, const CapConfig& config);

std::string format_state(const CapabilityState& s, const TagUniverse& tags);

struct CapabilityPes {
  PolicyEnhancedSystem pes;
  std::vector<CapabilityState> states;  // states[i] is PES state i
  bool truncated = false;
};

/// Breadth-first reachable-state construction up to depth. States first
/// reached at the depth bound keep real transitions into already
/// discovered states and self-loops otherwise; those are flagged truncated.
CapabilityPes build_pes(const CapConfig& config, std::size_t depth);

/// Object index in the interpretation: per process S_p, O_p, m_p, in_p, then
/// named data objects, then one oset per process.
StructuredSystem capability_drm_interpretation(const CapConfig& config, std::size_t depth);
StructuredSystem capability_drm_interpretation(const CapabilityPes& built, const CapConfig& config);

}  // namespace nif::cap
