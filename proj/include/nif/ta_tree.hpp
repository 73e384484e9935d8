#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "nif/model.hpp"

namespace nif {

enum class TreeId : std::uint32_t {};

/// Append-only interning table for information trees. Leaf is id 0; a node
/// (left, right, action) gets a fresh id the first time it is requested and the
/// same id afterwards, so id equality coincides with structural equality.
class TreeTable {
 public:
  static constexpr TreeId leaf() noexcept { return TreeId{}; }

  TreeTable();

  TreeId node(TreeId left, TreeId right, ActionId action);

  bool is_leaf(TreeId t) const noexcept { return t == leaf(); }
  TreeId left(TreeId t) const { return nodes_.at(idx(t)).left; }
  TreeId right(TreeId t) const { return nodes_.at(idx(t)).right; }
  ActionId action(TreeId t) const { return nodes_.at(idx(t)).action; }
  std::size_t size() const noexcept { return nodes_.size(); }

  /// "e" for the leaf, "(L,R,a)" for a node.
  std::string to_string(TreeId t, const Signature& sig) const;

 private:
  struct Node {
    TreeId left;
    TreeId right;
    ActionId action;
  };
  static std::uint64_t pack(TreeId l, TreeId r) noexcept {
    return (static_cast<std::uint64_t>(idx(l)) << 32) | idx(r);
  }

  std::vector<Node> nodes_;
  // Keyed by (left,right) packed, then action; one map per action keeps keys 64-bit.
  std::vector<std::unordered_map<std::uint64_t, TreeId>> index_;
};

}  // namespace nif
