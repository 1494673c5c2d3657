#ifndef SFW_KVIS_HPP_
#define SFW_KVIS_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "sfw/grid.hpp"

namespace sfw {

// Per-cell wall-crossing counts seen from one router cell. Wall cells hold
// kUndefined.
class KGrid {
 public:
  static constexpr int kUndefined = -1;

  KGrid() = default;
  explicit KGrid(GridGeometry geometry, int fill = 0);

  const GridGeometry& geometry() const { return geometry_; }
  int width() const { return geometry_.width; }
  int height() const { return geometry_.height; }
  bool contains(CellIndex c) const { return geometry_.contains(c); }

  int at(CellIndex c) const { return values_[geometry_.index_of(c)]; }
  void set(CellIndex c, int k) { values_[geometry_.index_of(c)] = k; }
  bool defined(CellIndex c) const { return at(c) != kUndefined; }
  bool has_undefined() const;

  std::span<const int> values() const { return values_; }

  friend bool operator==(const KGrid&, const KGrid&) = default;

 private:
  GridGeometry geometry_;
  std::vector<int> values_;
};

// Number of maximal runs of Occupied cells along trace_ray(from, to). A run
// that contains `to` itself is not counted. Unknown cells count as free.
// Throws kSourceInsideWall when `from` is Occupied and kOutOfBounds when
// either cell is outside the map.
int count_crossings(const GridMap& map, CellIndex from, CellIndex to);

// k-visibility plot of `router`: count_crossings for every non-wall cell.
// threads <= 1 runs inline; the result does not depend on the thread count.
KGrid kvis_plot(const GridMap& map, CellIndex router, int threads = 1);

// KGrid as PGM: k clipped to 0..254, Undefined stored as 255.
GridMap kgrid_to_image(const KGrid& kgrid);
KGrid kgrid_from_image(const GridMap& image);
void save_kgrid(const KGrid& kgrid, const std::filesystem::path& path);
KGrid load_kgrid(const std::filesystem::path& path);

}  // namespace sfw

#endif  // SFW_KVIS_HPP_
