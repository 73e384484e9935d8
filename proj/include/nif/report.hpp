#pragma once

#include <functional>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "nif/access_control.hpp"
#include "nif/checkers.hpp"
#include "nif/verdict.hpp"

namespace nif {

inline constexpr const char* kToolVersion = "1.0.0";

struct RunOptions {
  std::size_t depth = 6;
  std::size_t margin = 1;
  std::vector<std::string> properties;
  StateUnwindingMode mode = StateUnwindingMode::Box;
  std::optional<std::string> policy_domain;
  LocalityVariant locality = LocalityVariant::Pairwise;
  Exec exec = Exec::Parallel;
};

/// Accepted property names.
const std::vector<std::string>& known_properties();

struct PropertyResult {
  std::string name;
  std::vector<Verdict> verdicts;
  std::optional<DrmReport> drm;
  std::optional<StructuredSystem> structured;  // for rendering drm witnesses
  double seconds = 0;
};

struct Report {
  std::string input;
  std::string digest;
  std::optional<std::string> variant;
  std::size_t depth = 0;
  std::vector<PropertyResult> results;
  std::vector<std::string> notes;
  double seconds = 0;
};

/// Hex FNV-1a digest of the input text.
std::string input_digest(std::string_view text);

/// Structured system used by the drm property. Defaults to the
/// completeness construction on the unfold.
using DrmSource = std::function<StructuredSystem(std::vector<std::string>& notes)>;

/// Runs each requested property against sys. Throws InputError for unknown
/// property names or missing options.
Report run_checks(const PolicyEnhancedSystem& sys, const RunOptions& options, const DrmSource& drm_source = {});

/// 1 if any verdict is INSECURE, else 3 if any is INCONCLUSIVE, else 0.
int exit_code(const Report& report);

nlohmann::ordered_json to_json(const Verdict& v, const PolicyEnhancedSystem& sys);
nlohmann::ordered_json to_json(const DrmReport& r, const StructuredSystem& sys);
nlohmann::ordered_json to_json(const Report& report, const PolicyEnhancedSystem& sys);

std::string to_text(const Report& report, const PolicyEnhancedSystem& sys);

}  // namespace nif
