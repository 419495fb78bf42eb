#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace ibtree {

inline constexpr int kBranching = 4;
// 4^12 finest cells is far beyond anything the dense routines are meant for.
inline constexpr int kMaxDepth = 12;

// Address of a node of the finest-resolution quadtree.  `index` packs the
// path from the root as a base-4 number, most significant digit first, so the
// path "13" is index 7 at depth 2.  Quadrants: 0=NW, 1=NE, 2=SW, 3=SE.
struct NodeId {
  int depth = 0;
  std::uint64_t index = 0;

  static NodeId root() { return {}; }
  // Throws std::invalid_argument on characters outside '0'..'3'.
  static NodeId from_path(std::string_view path);

  std::string path() const;
  NodeId parent() const;
  NodeId child(int quadrant) const;
  int quadrant() const { return static_cast<int>(index & 3u); }
  bool is_root() const { return depth == 0; }

  // True if `other` lies in the subtree rooted here (including itself).
  bool is_ancestor_of(const NodeId& other) const;

  friend bool operator==(const NodeId&, const NodeId&) = default;
  // Lexicographic order of the path strings ("" < "0" < "00" < "01" < "1").
  friend std::strong_ordering operator<=>(const NodeId& a, const NodeId& b);
};

// Level-order packing of all nodes of a tree of depth `ell`:
// root = 0, then the 4 depth-1 nodes, and so on.
std::size_t level_offset(int depth);
std::size_t node_count(int ell);
std::size_t interior_count(int ell);
std::size_t linear_index(const NodeId& t);
NodeId node_at(std::size_t linear);

// Interior nodes of the finest tree in lexicographic path order (preorder).
std::vector<NodeId> interior_nodes_lexicographic(int ell);

// Throws std::invalid_argument when t is a depth-ell leaf.
std::array<NodeId, 4> children(const NodeId& t, int ell);

struct CellBlock {
  int row_begin = 0;
  int row_end = 0;
  int col_begin = 0;
  int col_end = 0;

  int side() const { return row_end - row_begin; }
  friend bool operator==(const CellBlock&, const CellBlock&) = default;
};

CellBlock cell_block(const NodeId& t, int ell);

// Row-major cell index for every depth-ell node, indexed by NodeId::index.
std::vector<std::size_t> finest_cell_order(int ell);

// A multi-resolution tree, identified by the set of expanded interior nodes.
// The node list is kept sorted lexicographically and free of duplicates;
// hierarchy is not enforced here (see validate_selection).
class TreeSelection {
 public:
  TreeSelection() = default;
  explicit TreeSelection(std::vector<NodeId> expanded);

  const std::vector<NodeId>& expanded() const { return expanded_; }
  bool contains(const NodeId& t) const;
  std::size_t size() const { return expanded_.size(); }
  bool empty() const { return expanded_.empty(); }
  bool is_subset_of(const TreeSelection& other) const;

  friend bool operator==(const TreeSelection&, const TreeSelection&) = default;
  friend auto operator<=>(const TreeSelection& a, const TreeSelection& b) {
    return a.expanded_ <=> b.expanded_;
  }

 private:
  std::vector<NodeId> expanded_;
};

// Every expanded node is interior (depth < ell) and has an expanded parent.
bool validate_selection(const TreeSelection& sel, int ell);

// Leaves of the selected tree in lexicographic order.  Throws
// std::invalid_argument for an invalid selection.
std::vector<NodeId> leaves_of(const TreeSelection& sel, int ell);

// Number of valid trees: g(0) = 1, g(k) = 1 + g(k-1)^4.
std::uint64_t tree_count(int ell);

// Visits every valid tree of depth ell exactly once in a fixed order.
// ell > 3 is rejected with std::invalid_argument.
void for_each_tree(int ell, const std::function<void(const TreeSelection&)>& visit);
std::vector<TreeSelection> enumerate_all_trees(int ell);

// {"ell": int, "expanded": [sorted path strings]}
std::string selection_to_json(const TreeSelection& sel, int ell);
// Returns the selection and writes the depth found in the document to *ell.
// Throws FormatError on malformed documents.
TreeSelection selection_from_json(std::string_view json, int* ell);

}  // namespace ibtree
