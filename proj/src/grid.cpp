#include "sfw/grid.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include <fmt/format.h>

#include "sfw/error.hpp"

namespace sfw {

CellState state_from_value(std::uint8_t value) {
  if (value >= kFreeThreshold) return CellState::kFree;
  if (value <= kOccupiedThreshold) return CellState::kOccupied;
  return CellState::kUnknown;
}

std::uint8_t value_from_state(CellState state) {
  switch (state) {
    case CellState::kFree: return kFreeValue;
    case CellState::kOccupied: return kOccupiedValue;
    case CellState::kUnknown: break;
  }
  return kUnknownValue;
}

void GridGeometry::validate() const {
  if (width <= 0 || height <= 0 || !(resolution > 0.0) ||
      !std::isfinite(resolution) || !std::isfinite(origin.x) ||
      !std::isfinite(origin.y)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("invalid grid geometry {}x{} @ {}", width, height,
                            resolution));
  }
}

CellIndex world_to_cell(const GridGeometry& geometry, WorldPoint p) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
    throw Error(ErrorCode::kOutOfBounds, "non-finite world point");
  }
  const double fx = std::floor((p.x - geometry.origin.x) / geometry.resolution);
  const double fy = std::floor((p.y - geometry.origin.y) / geometry.resolution);
  if (fx < 0.0 || fy < 0.0 || fx >= geometry.width || fy >= geometry.height) {
    throw Error(ErrorCode::kOutOfBounds,
                fmt::format("point ({}, {}) outside map", p.x, p.y));
  }
  return {static_cast<int>(fx), static_cast<int>(fy)};
}

WorldPoint cell_to_world(const GridGeometry& geometry, CellIndex c) {
  return {geometry.origin.x + (c.col + 0.5) * geometry.resolution,
          geometry.origin.y + (c.row + 0.5) * geometry.resolution};
}

GridMap::GridMap(GridGeometry geometry, std::uint8_t fill)
    : geometry_(geometry) {
  geometry_.validate();
  cells_.assign(geometry_.cell_count(), fill);
}

GridMap::GridMap(GridGeometry geometry, std::vector<std::uint8_t> cells)
    : geometry_(geometry), cells_(std::move(cells)) {
  geometry_.validate();
  if (cells_.size() != geometry_.cell_count()) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("expected {} cells, got {}", geometry_.cell_count(),
                            cells_.size()));
  }
}

std::vector<CellIndex> trace_ray(CellIndex a, CellIndex b) {
  const std::int64_t nx = std::abs(static_cast<std::int64_t>(b.col) - a.col);
  const std::int64_t ny = std::abs(static_cast<std::int64_t>(b.row) - a.row);
  const int sx = b.col >= a.col ? 1 : -1;
  const int sy = b.row >= a.row ? 1 : -1;

  std::vector<CellIndex> cells;
  cells.reserve(static_cast<std::size_t>(nx + ny + 1));
  CellIndex cur = a;
  cells.push_back(cur);

  // The segment runs between cell centers. The ix-th vertical boundary is
  // crossed at t = (0.5 + ix) / nx and the iy-th horizontal one at
  // t = (0.5 + iy) / ny; comparing the cross-multiplied forms keeps the walk
  // exact.
  std::int64_t ix = 0;
  std::int64_t iy = 0;
  while (ix < nx || iy < ny) {
    const std::int64_t x_key = (1 + 2 * ix) * ny;
    const std::int64_t y_key = (1 + 2 * iy) * nx;
    if (iy == ny || (ix < nx && x_key < y_key)) {
      cur.col += sx;
      ++ix;
    } else if (ix == nx || y_key < x_key) {
      cur.row += sy;
      ++iy;
    } else {
      cells.push_back({cur.col + sx, cur.row});
      cells.push_back({cur.col, cur.row + sy});
      cur.col += sx;
      cur.row += sy;
      ++ix;
      ++iy;
    }
    cells.push_back(cur);
  }
  return cells;
}

}  // namespace sfw
