#include "sfw/kvis.hpp"

#include <algorithm>
#include <thread>

#include <fmt/format.h>

#include "sfw/error.hpp"
#include "sfw/pgm.hpp"

namespace sfw {
namespace {

constexpr int kMaxStoredK = 254;
constexpr std::uint8_t kUndefinedPixel = 255;

void require_in_bounds(const GridMap& map, CellIndex c) {
  if (!map.contains(c)) {
    throw Error(ErrorCode::kOutOfBounds,
                fmt::format("cell ({}, {}) outside {}x{} map", c.col, c.row,
                            map.width(), map.height()));
  }
}

}  // namespace

KGrid::KGrid(GridGeometry geometry, int fill) : geometry_(geometry) {
  geometry_.validate();
  values_.assign(geometry_.cell_count(), fill);
}

bool KGrid::has_undefined() const {
  return std::find(values_.begin(), values_.end(), kUndefined) != values_.end();
}

int count_crossings(const GridMap& map, CellIndex from, CellIndex to) {
  require_in_bounds(map, from);
  require_in_bounds(map, to);
  if (map.is_occupied(from)) {
    throw Error(ErrorCode::kSourceInsideWall,
                fmt::format("source cell ({}, {}) is a wall", from.col,
                            from.row));
  }
  const auto ray = trace_ray(from, to);
  int runs = 0;
  bool in_wall = false;
  for (std::size_t i = 0; i < ray.size(); ++i) {
    bool wall = map.is_occupied(ray[i]);
    // Diagonal neighbors in sequence are the two side cells of an exact
    // corner, touched at the same instant: they form one step.
    if (i + 1 < ray.size() && ray[i].col != ray[i + 1].col &&
        ray[i].row != ray[i + 1].row) {
      wall = wall || map.is_occupied(ray[i + 1]);
      ++i;
    }
    if (wall && !in_wall) ++runs;
    in_wall = wall;
  }
  // The ray ends inside a wall: that run has not been crossed yet.
  if (in_wall) --runs;
  return runs;
}

KGrid kvis_plot(const GridMap& map, CellIndex router, int threads) {
  require_in_bounds(map, router);
  if (map.is_occupied(router)) {
    throw Error(ErrorCode::kSourceInsideWall, "router cell is a wall");
  }
  KGrid kgrid(map.geometry());
  const int height = map.height();
  auto fill_rows = [&](int row_begin, int row_end) {
    for (int row = row_begin; row < row_end; ++row) {
      for (int col = 0; col < map.width(); ++col) {
        const CellIndex c{col, row};
        kgrid.set(c, map.is_occupied(c) ? KGrid::kUndefined
                                        : count_crossings(map, router, c));
      }
    }
  };

  const int workers = std::clamp(threads, 1, height);
  if (workers == 1) {
    fill_rows(0, height);
    return kgrid;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back(fill_rows, height * w / workers,
                      height * (w + 1) / workers);
  }
  for (auto& t : pool) t.join();
  return kgrid;
}

GridMap kgrid_to_image(const KGrid& kgrid) {
  GridMap image(kgrid.geometry(), kUndefinedPixel);
  for (std::size_t i = 0; i < kgrid.values().size(); ++i) {
    const int k = kgrid.values()[i];
    if (k == KGrid::kUndefined) continue;
    image.mutable_cells()[i] = static_cast<std::uint8_t>(std::min(k, kMaxStoredK));
  }
  return image;
}

KGrid kgrid_from_image(const GridMap& image) {
  KGrid kgrid(image.geometry());
  for (int row = 0; row < image.height(); ++row) {
    for (int col = 0; col < image.width(); ++col) {
      const std::uint8_t v = image.value({col, row});
      kgrid.set({col, row}, v == kUndefinedPixel ? KGrid::kUndefined : v);
    }
  }
  return kgrid;
}

void save_kgrid(const KGrid& kgrid, const std::filesystem::path& path) {
  save_pgm(kgrid_to_image(kgrid), path);
  save_sidecar(kgrid.geometry(), path);
}

KGrid load_kgrid(const std::filesystem::path& path) {
  return kgrid_from_image(load_pgm(path));
}

}  // namespace sfw
