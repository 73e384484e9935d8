#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nif/model.hpp"
#include "nif/verdict.hpp"

namespace nif {

enum class ObjectId : std::uint32_t {};
enum class ValueId : std::uint32_t {};

/// Sorted, duplicate-free list of objects.
using ObjectSet = std::vector<ObjectId>;

/// A structured system violates oset(u) in observe(u, s) or
/// contents(oset(u), s) = observe(u, s).
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A policy-enhanced system whose state is a valuation of objects, with an
/// access-control table (observe/alter) that may change from state to state.
class StructuredSystem {
 public:
  struct Spec {
    PolicyEnhancedSystem base;
    std::vector<std::string> objects;       // includes the osets
    std::vector<ObjectId> oset;             // oset[u]
    std::vector<std::vector<std::string>> contents;  // [state][object]
    std::vector<std::vector<ObjectSet>> observe;     // [state][domain]
    std::vector<std::vector<ObjectSet>> alter;       // [state][domain]
  };

  explicit StructuredSystem(Spec spec);

  const PolicyEnhancedSystem& base() const noexcept { return base_; }
  std::size_t object_count() const noexcept { return objects_.size(); }
  const std::string& object_name(ObjectId o) const { return objects_.at(idx(o)); }
  ObjectId oset(DomainId u) const { return oset_.at(idx(u)); }
  ValueId contents(ObjectId o, StateId s) const { return contents_[idx(s) * objects_.size() + idx(o)]; }
  const std::string& value_name(ValueId v) const { return values_.at(idx(v)); }
  const ObjectSet& observe(DomainId u, StateId s) const { return observe_[idx(s) * nd_ + idx(u)]; }
  const ObjectSet& alter(DomainId u, StateId s) const { return alter_[idx(s) * nd_ + idx(u)]; }

  /// Canonical text of an object set, used as the contents of osets.
  std::string encode(const ObjectSet& set) const;

  /// Throws StructuralError naming the first violated invariant.
  void validate() const;

 private:
  PolicyEnhancedSystem base_;
  std::size_t nd_;
  std::vector<std::string> objects_;
  std::vector<ObjectId> oset_;
  std::vector<std::string> values_;
  std::vector<ValueId> contents_;
  std::vector<ObjectSet> observe_;
  std::vector<ObjectSet> alter_;
};

/// Every object u observes in a has the same contents in b.
bool dynacrel(const StructuredSystem& sys, DomainId u, StateId a, StateId b);

enum class DrmCondition { Drm1, Drm2, Drm3, Drm4, Drm5, Drm5Strong, Drm6 };
const char* to_string(DrmCondition c) noexcept;

struct DrmWitness {
  std::vector<StateId> states;
  std::optional<ActionId> action;
  std::optional<ObjectId> object;
  std::vector<DomainId> domains;
};

struct DrmLine {
  DrmCondition condition;
  bool checked = false;
  bool holds = true;
  std::string scope;
  std::optional<DrmWitness> witness;
};

struct DrmReport {
  std::size_t depth = 0;
  std::size_t states_checked = 0;
  bool exhaustive = false;  // every reachable state checked and none truncated
  std::vector<DrmLine> lines;

  const DrmLine& line(DrmCondition c) const;
  bool holds(DrmCondition c) const { return line(c).holds; }
  /// DRM-1..6 (the weak fifth condition).
  bool base_conditions_hold() const;
};

/// Checks the reference-monitor conditions over states reachable within
/// depth. Conditions mentioning s·a skip truncated states. DRM-5' is only
/// evaluated when strong_five is set.
DrmReport check_drm(const StructuredSystem& sys, std::size_t depth, bool strong_five);

/// ta-diamond certificate from DRM-1..6 and, with DRM-5', a ta-box
/// certificate. Certificates are CERTIFIED_SECURE only for exhaustive
/// reports, BOUNDED_SECURE otherwise; a failed condition yields INCONCLUSIVE.
std::vector<Verdict> derive_security_from_drm(const DrmReport& report, const StructuredSystem& sys);

/// Access-control interpretation of the depth-k unfold in which each domain
/// object holds that domain's ta-diamond tree. Notes receives a warning when
/// the system is not ta-diamond secure at that depth.
StructuredSystem ac_complete_construct(const PolicyEnhancedSystem& sys, std::size_t depth,
                                       std::vector<std::string>* notes = nullptr);

std::string describe(const DrmLine& line, const StructuredSystem& sys);

}  // namespace nif
