#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nif/model.hpp"

namespace nif {

/// Input error with a 1-based source position.
class ParseError : public InputError {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message);
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A parsed .nif document: the base system plus named edge-set variants.
struct SystemFile {
  PolicyEnhancedSystem base;
  std::vector<std::string> variant_names;  // declaration order
  std::map<std::string, PolicyEnhancedSystem> variants;

  const PolicyEnhancedSystem& select(const std::optional<std::string>& variant) const;
};

/// Line-oriented format:
///   domains: A B P
///   actions: a@A p@P
///   states: s0 s1 s2
///   initial: s0
///   trans: s0 p s1            (missing transitions are self-loops)
///   obs: s2 B 1               (every state/domain pair, unless obs-default is given)
///   obs-default: 0
///   edge: s1 A B              (reflexive edges are implicit)
///   variant NAME: edge s6 A B
///   variant NAME: noedge s1 D L
/// '#' starts a comment.
SystemFile parse_system_file(std::string_view text);
PolicyEnhancedSystem parse_system(std::string_view text, const std::optional<std::string>& variant = std::nullopt);

std::string print_system(const PolicyEnhancedSystem& sys);

std::string read_file(const std::string& path);

}  // namespace nif
