#ifndef SFW_GRID_HPP_
#define SFW_GRID_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sfw {

struct CellIndex {
  int col = 0;
  int row = 0;

  friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

struct WorldPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const WorldPoint&, const WorldPoint&) = default;
};

enum class CellState : std::uint8_t { kUnknown, kFree, kOccupied };

// Grayscale encoding of the three occupancy states. Converting a state to
// its grayscale value and back is the identity.
inline constexpr std::uint8_t kFreeValue = 255;
inline constexpr std::uint8_t kUnknownValue = 127;
inline constexpr std::uint8_t kOccupiedValue = 0;
inline constexpr std::uint8_t kFreeThreshold = 250;
inline constexpr std::uint8_t kOccupiedThreshold = 50;

CellState state_from_value(std::uint8_t value);
std::uint8_t value_from_state(CellState state);

// Metric frame of a grid. origin is the world position of the lower corner of
// cell (0,0); rows grow with world y and row 0 is the first image row.
struct GridGeometry {
  int width = 0;
  int height = 0;
  double resolution = 1.0;
  WorldPoint origin;

  bool contains(CellIndex c) const {
    return c.col >= 0 && c.row >= 0 && c.col < width && c.row < height;
  }
  std::size_t cell_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  std::size_t index_of(CellIndex c) const {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(c.col);
  }
  CellIndex cell_at(std::size_t index) const {
    return {static_cast<int>(index % static_cast<std::size_t>(width)),
            static_cast<int>(index / static_cast<std::size_t>(width))};
  }

  // Throws kInvalidArgument unless width, height and resolution are positive.
  void validate() const;

  friend bool operator==(const GridGeometry&, const GridGeometry&) = default;
};

// Maps a world point to the cell containing it. Throws kOutOfBounds when the
// point lies outside the grid extent.
CellIndex world_to_cell(const GridGeometry& geometry, WorldPoint p);
WorldPoint cell_to_world(const GridGeometry& geometry, CellIndex c);

// Row-major 8-bit grid. Cell values are grayscale; the occupancy view goes
// through state_from_value / value_from_state.
class GridMap {
 public:
  GridMap() = default;
  explicit GridMap(GridGeometry geometry,
                   std::uint8_t fill = kUnknownValue);
  GridMap(GridGeometry geometry, std::vector<std::uint8_t> cells);

  const GridGeometry& geometry() const { return geometry_; }
  int width() const { return geometry_.width; }
  int height() const { return geometry_.height; }
  double resolution() const { return geometry_.resolution; }
  WorldPoint origin() const { return geometry_.origin; }
  bool contains(CellIndex c) const { return geometry_.contains(c); }

  std::uint8_t value(CellIndex c) const { return cells_[geometry_.index_of(c)]; }
  void set_value(CellIndex c, std::uint8_t v) { cells_[geometry_.index_of(c)] = v; }

  CellState state(CellIndex c) const { return state_from_value(value(c)); }
  void set_state(CellIndex c, CellState s) { set_value(c, value_from_state(s)); }
  bool is_occupied(CellIndex c) const { return state(c) == CellState::kOccupied; }

  std::span<const std::uint8_t> cells() const { return cells_; }
  std::span<std::uint8_t> mutable_cells() { return cells_; }

  friend bool operator==(const GridMap&, const GridMap&) = default;

 private:
  GridGeometry geometry_;
  std::vector<std::uint8_t> cells_;
};

// Supercover rasterization of the segment joining the centers of a and b:
// every cell whose closed square the segment touches, ordered from a to b.
// When the segment passes exactly through a cell corner, the two side cells
// are emitted column-step first, which keeps the result reversal-symmetric.
std::vector<CellIndex> trace_ray(CellIndex a, CellIndex b);

}  // namespace sfw

#endif  // SFW_GRID_HPP_
