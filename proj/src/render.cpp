#include "ibtree/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace ibtree {

std::string render_svg(const TreeSelection& sel, const InfoIncrements& inc, int cell_px) {
  if (cell_px <= 0) throw std::invalid_argument("cell size must be positive");
  const int ell = inc.ell;
  const long size = static_cast<long>(cell_px) << ell;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%ld\" height=\"%ld\" viewBox=\"0 0 %ld %ld\">\n",
                size, size, size, size);
  std::string out = buf;
  for (const NodeId& leaf : leaves_of(sel, ell)) {
    const CellBlock block = cell_block(leaf, ell);
    const double r = std::clamp(inc.relevance(leaf), 0.0, 1.0);
    const int gray = static_cast<int>(std::lround(255.0 * (1.0 - r)));
    std::snprintf(buf, sizeof(buf),
                  "  <rect x=\"%ld\" y=\"%ld\" width=\"%ld\" height=\"%ld\" fill=\"#%02x%02x%02x\" "
                  "stroke=\"#808080\" stroke-width=\"1\"/>\n",
                  static_cast<long>(block.col_begin) * cell_px, static_cast<long>(block.row_begin) * cell_px,
                  static_cast<long>(block.side()) * cell_px, static_cast<long>(block.side()) * cell_px, gray, gray,
                  gray);
    out += buf;
  }
  out += "</svg>\n";
  return out;
}

}  // namespace ibtree
