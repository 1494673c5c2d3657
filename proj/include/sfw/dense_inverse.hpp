#ifndef SFW_DENSE_INVERSE_HPP_
#define SFW_DENSE_INVERSE_HPP_

#include <vector>

#include "sfw/grid.hpp"
#include "sfw/kvis.hpp"

namespace sfw {

// Higher-k cell of every 4-adjacent pair of defined cells whose k-values
// differ by exactly one, in row-major order without duplicates.
std::vector<CellIndex> border_cells(const KGrid& kgrid);

struct DenseInverseStats {
  // 4-adjacent defined pairs with |dk| > 1; not treated as walls.
  int skipped_jumps = 0;
};

// Wall outline from a complete k-plot. When the plot contains wall
// (Undefined) cells, those facing at least one defined cell are the walls;
// otherwise regions touch directly and border_cells supplies the walls.
// Everything else is Free. Throws kInvalidKGrid unless the router cell has
// k = 0.
GridMap invert_dense(const KGrid& kgrid, CellIndex router,
                     DenseInverseStats* stats = nullptr);

}  // namespace sfw

#endif  // SFW_DENSE_INVERSE_HPP_
