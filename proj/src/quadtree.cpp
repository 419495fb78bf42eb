#include "ibtree/quadtree.hpp"

#include <algorithm>
#include <stdexcept>

#include "ibtree/error.hpp"
#include "json.hpp"

namespace ibtree {

NodeId NodeId::from_path(std::string_view path) {
  if (path.size() > static_cast<std::size_t>(kMaxDepth)) {
    throw std::invalid_argument("node path too long: " + std::string(path));
  }
  NodeId t;
  for (char c : path) {
    if (c < '0' || c > '3') {
      throw std::invalid_argument("invalid node path: " + std::string(path));
    }
    t = t.child(c - '0');
  }
  return t;
}

std::string NodeId::path() const {
  std::string s(static_cast<std::size_t>(depth), '0');
  std::uint64_t k = index;
  for (int i = depth - 1; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = static_cast<char>('0' + (k & 3u));
    k >>= 2;
  }
  return s;
}

NodeId NodeId::parent() const {
  if (depth == 0) throw std::invalid_argument("root has no parent");
  return {depth - 1, index >> 2};
}

NodeId NodeId::child(int quadrant) const {
  return {depth + 1, (index << 2) | static_cast<std::uint64_t>(quadrant)};
}

bool NodeId::is_ancestor_of(const NodeId& other) const {
  if (other.depth < depth) return false;
  return (other.index >> (2 * (other.depth - depth))) == index;
}

std::strong_ordering operator<=>(const NodeId& a, const NodeId& b) {
  const int common = std::min(a.depth, b.depth);
  const std::uint64_t pa = a.index >> (2 * (a.depth - common));
  const std::uint64_t pb = b.index >> (2 * (b.depth - common));
  if (pa != pb) return pa <=> pb;
  return a.depth <=> b.depth;
}

std::size_t level_offset(int depth) {
  return ((std::size_t{1} << (2 * depth)) - 1) / 3;
}

std::size_t node_count(int ell) { return level_offset(ell + 1); }

std::size_t interior_count(int ell) { return level_offset(ell); }

std::size_t linear_index(const NodeId& t) {
  return level_offset(t.depth) + static_cast<std::size_t>(t.index);
}

NodeId node_at(std::size_t linear) {
  int depth = 0;
  while (level_offset(depth + 1) <= linear) ++depth;
  return {depth, static_cast<std::uint64_t>(linear - level_offset(depth))};
}

namespace {

void preorder(const NodeId& t, int ell, std::vector<NodeId>& out) {
  if (t.depth >= ell) return;
  out.push_back(t);
  for (int c = 0; c < kBranching; ++c) preorder(t.child(c), ell, out);
}

}  // namespace

std::vector<NodeId> interior_nodes_lexicographic(int ell) {
  std::vector<NodeId> out;
  out.reserve(interior_count(ell));
  preorder(NodeId::root(), ell, out);
  return out;
}

std::array<NodeId, 4> children(const NodeId& t, int ell) {
  if (t.depth >= ell) {
    throw std::invalid_argument("node '" + t.path() + "' is a finest-resolution leaf");
  }
  return {t.child(0), t.child(1), t.child(2), t.child(3)};
}

CellBlock cell_block(const NodeId& t, int ell) {
  const int side = 1 << (ell - t.depth);
  int row = 0;
  int col = 0;
  for (int i = t.depth - 1, shift = 0; i >= 0; --i, ++shift) {
    const auto digit = static_cast<int>((t.index >> (2 * shift)) & 3u);
    row |= (digit >> 1) << shift;
    col |= (digit & 1) << shift;
  }
  return {row * side, (row + 1) * side, col * side, (col + 1) * side};
}

std::vector<std::size_t> finest_cell_order(int ell) {
  const std::size_t n = std::size_t{1} << (2 * ell);
  const std::size_t width = std::size_t{1} << ell;
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < n; ++k) {
    const CellBlock b = cell_block({ell, k}, ell);
    order[k] = static_cast<std::size_t>(b.row_begin) * width + static_cast<std::size_t>(b.col_begin);
  }
  return order;
}

TreeSelection::TreeSelection(std::vector<NodeId> expanded) : expanded_(std::move(expanded)) {
  std::sort(expanded_.begin(), expanded_.end());
  expanded_.erase(std::unique(expanded_.begin(), expanded_.end()), expanded_.end());
}

bool TreeSelection::contains(const NodeId& t) const {
  return std::binary_search(expanded_.begin(), expanded_.end(), t);
}

bool TreeSelection::is_subset_of(const TreeSelection& other) const {
  return std::includes(other.expanded_.begin(), other.expanded_.end(), expanded_.begin(),
                       expanded_.end());
}

bool validate_selection(const TreeSelection& sel, int ell) {
  for (const NodeId& t : sel.expanded()) {
    if (t.depth >= ell) return false;
    if (!t.is_root() && !sel.contains(t.parent())) return false;
  }
  return true;
}

namespace {

void collect_leaves(const NodeId& t, const TreeSelection& sel, int ell, std::vector<NodeId>& out) {
  if (t.depth < ell && sel.contains(t)) {
    for (int c = 0; c < kBranching; ++c) collect_leaves(t.child(c), sel, ell, out);
  } else {
    out.push_back(t);
  }
}

}  // namespace

std::vector<NodeId> leaves_of(const TreeSelection& sel, int ell) {
  if (!validate_selection(sel, ell)) throw std::invalid_argument("invalid tree selection");
  std::vector<NodeId> out;
  collect_leaves(NodeId::root(), sel, ell, out);
  return out;
}

std::uint64_t tree_count(int ell) {
  std::uint64_t g = 1;
  for (int k = 1; k <= ell; ++k) g = 1 + g * g * g * g;
  return g;
}

namespace {

// All expanded-node sets of valid subtrees rooted at t, each sorted.
std::vector<std::vector<NodeId>> subtree_options(const NodeId& t, int ell) {
  std::vector<std::vector<NodeId>> options;
  options.emplace_back();
  if (t.depth >= ell) return options;

  std::array<std::vector<std::vector<NodeId>>, 4> per_child;
  for (int c = 0; c < kBranching; ++c) per_child[c] = subtree_options(t.child(c), ell);

  std::array<std::size_t, 4> pick{};
  while (true) {
    std::vector<NodeId> set{t};
    for (int c = 0; c < kBranching; ++c) {
      const auto& chosen = per_child[c][pick[c]];
      set.insert(set.end(), chosen.begin(), chosen.end());
    }
    options.push_back(std::move(set));
    // Odometer over the children's choices, last child fastest.
    int c = kBranching - 1;
    while (c >= 0 && ++pick[c] == per_child[c].size()) {
      pick[c] = 0;
      --c;
    }
    if (c < 0) break;
  }
  return options;
}

}  // namespace

void for_each_tree(int ell, const std::function<void(const TreeSelection&)>& visit) {
  if (ell < 0 || ell > 3) {
    throw std::invalid_argument("tree enumeration supports 0 <= ell <= 3");
  }
  for (auto& set : subtree_options(NodeId::root(), ell)) visit(TreeSelection(std::move(set)));
}

std::vector<TreeSelection> enumerate_all_trees(int ell) {
  std::vector<TreeSelection> trees;
  trees.reserve(static_cast<std::size_t>(tree_count(std::clamp(ell, 0, 3))));
  for_each_tree(ell, [&](const TreeSelection& s) { trees.push_back(s); });
  return trees;
}

std::string selection_to_json(const TreeSelection& sel, int ell) {
  nlohmann::json doc;
  doc["ell"] = ell;
  doc["expanded"] = nlohmann::json::array();
  for (const NodeId& t : sel.expanded()) doc["expanded"].push_back(t.path());
  return doc.dump();
}

TreeSelection selection_from_json(std::string_view json, int* ell) {
  try {
    const auto doc = nlohmann::json::parse(json);
    std::vector<NodeId> nodes;
    for (const auto& p : doc.at("expanded")) nodes.push_back(NodeId::from_path(p.get<std::string>()));
    if (ell != nullptr) *ell = doc.at("ell").get<int>();
    return TreeSelection(std::move(nodes));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed tree JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("malformed tree JSON: ") + e.what());
  }
}

}  // namespace ibtree
