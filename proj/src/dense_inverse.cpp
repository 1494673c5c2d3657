#include "sfw/dense_inverse.hpp"

#include <array>
#include <cstdlib>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "sfw/error.hpp"

namespace sfw {
namespace {

constexpr std::array<CellIndex, 4> kNeighbors4 = {
    CellIndex{1, 0}, CellIndex{-1, 0}, CellIndex{0, 1}, CellIndex{0, -1}};

std::vector<bool> border_mask(const KGrid& kgrid, int* skipped_jumps) {
  const auto& g = kgrid.geometry();
  std::vector<bool> mask(g.cell_count(), false);
  for (int row = 0; row < g.height; ++row) {
    for (int col = 0; col < g.width; ++col) {
      const CellIndex c{col, row};
      if (!kgrid.defined(c)) continue;
      // Each unordered pair is visited once: right and down neighbors.
      for (const CellIndex n : {CellIndex{col + 1, row}, CellIndex{col, row + 1}}) {
        if (!g.contains(n) || !kgrid.defined(n)) continue;
        const int diff = kgrid.at(n) - kgrid.at(c);
        if (diff == 1) {
          mask[g.index_of(n)] = true;
        } else if (diff == -1) {
          mask[g.index_of(c)] = true;
        } else if (diff != 0 && skipped_jumps != nullptr) {
          ++*skipped_jumps;
        }
      }
    }
  }
  return mask;
}

}  // namespace

std::vector<CellIndex> border_cells(const KGrid& kgrid) {
  const auto mask = border_mask(kgrid, nullptr);
  std::vector<CellIndex> cells;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) cells.push_back(kgrid.geometry().cell_at(i));
  }
  return cells;
}

GridMap invert_dense(const KGrid& kgrid, CellIndex router,
                     DenseInverseStats* stats) {
  if (!kgrid.contains(router) || kgrid.at(router) != 0) {
    throw Error(ErrorCode::kInvalidKGrid,
                fmt::format("router cell ({}, {}) must hold k = 0", router.col,
                            router.row));
  }
  const auto& g = kgrid.geometry();
  GridMap out(g, kFreeValue);
  int skipped = 0;

  if (kgrid.has_undefined()) {
    // Defined cells that touch across a k step here are shadow edges of a
    // wall end, not walls; the wall itself is the Undefined band.
    border_mask(kgrid, &skipped);
    for (int row = 0; row < g.height; ++row) {
      for (int col = 0; col < g.width; ++col) {
        const CellIndex c{col, row};
        if (kgrid.defined(c)) continue;
        for (const CellIndex d : kNeighbors4) {
          const CellIndex n{col + d.col, row + d.row};
          if (g.contains(n) && kgrid.defined(n)) {
            out.set_state(c, CellState::kOccupied);
            break;
          }
        }
      }
    }
  } else {
    const auto mask = border_mask(kgrid, &skipped);
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (mask[i]) out.mutable_cells()[i] = kOccupiedValue;
    }
  }

  if (skipped > 0) {
    spdlog::debug("invert_dense: {} adjacent pairs with |dk| > 1 left unmarked",
                  skipped);
  }
  if (stats != nullptr) stats->skipped_jumps = skipped;
  return out;
}

}  // namespace sfw
