#pragma once

#include <string>

#include "ibtree/information.hpp"
#include "ibtree/quadtree.hpp"

namespace ibtree {

// SVG of the tree's leaves: one square per leaf, filled with a gray level
// that darkens with p(Y=1 | leaf) (black at 1, white at 0).  `cell_px` is
// the edge length of one finest cell.  Throws std::invalid_argument for an
// invalid selection.
std::string render_svg(const TreeSelection& sel, const InfoIncrements& inc, int cell_px = 8);

}  // namespace ibtree
