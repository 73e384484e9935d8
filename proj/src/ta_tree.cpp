#include "nif/ta_tree.hpp"

namespace nif {

TreeTable::TreeTable() { nodes_.push_back({leaf(), leaf(), ActionId{}}); }

TreeId TreeTable::node(TreeId left, TreeId right, ActionId action) {
  if (idx(left) >= nodes_.size() || idx(right) >= nodes_.size())
    throw InputError("tree id out of range");
  if (idx(action) >= index_.size()) index_.resize(idx(action) + 1);
  auto [it, fresh] = index_[idx(action)].try_emplace(pack(left, right), make_id<TreeId>(nodes_.size()));
  if (fresh) nodes_.push_back({left, right, action});
  return it->second;
}

std::string TreeTable::to_string(TreeId t, const Signature& sig) const {
  if (is_leaf(t)) return "e";
  const Node& n = nodes_.at(idx(t));
  return "(" + to_string(n.left, sig) + "," + to_string(n.right, sig) + "," + sig.action_name(n.action) + ")";
}

}  // namespace nif
