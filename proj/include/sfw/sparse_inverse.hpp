#ifndef SFW_SPARSE_INVERSE_HPP_
#define SFW_SPARSE_INVERSE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sfw/grid.hpp"

namespace sfw {

struct TrajectorySample {
  WorldPoint position;
  int k = 0;
  // Contact-sensor hit: the cell is an obstacle, not free space.
  bool collision = false;
};

// Maximal run of consecutive samples sharing one k-value. Bounds inclusive.
struct TrajectorySegment {
  std::size_t first = 0;
  std::size_t last = 0;
  int k = 0;
};

// Throws kEmptyTrajectory.
std::vector<TrajectorySegment> segment_trajectory(
    std::span<const TrajectorySample> samples);

// Trajectory drawn into the grid. Consecutive samples are joined with
// trace_ray; each cell keeps the label (segment, k) of its first visit in
// time. Cells on a joining line take the label of the nearer sample.
class TrajectoryRaster {
 public:
  static constexpr int kNoSegment = -1;

  // Throws kOutOfBounds if a sample lies outside the grid.
  TrajectoryRaster(const GridGeometry& geometry,
                   std::span<const TrajectorySample> samples);

  const GridGeometry& geometry() const { return geometry_; }
  bool contains(CellIndex c) const {
    return geometry_.contains(c) && segment_[geometry_.index_of(c)] != kNoSegment;
  }
  int segment_at(CellIndex c) const { return segment_[geometry_.index_of(c)]; }
  int k_at(CellIndex c) const { return k_[geometry_.index_of(c)]; }
  // Cell of each sample, in sample order.
  const std::vector<CellIndex>& sample_cells() const { return sample_cells_; }
  // Every trajectory cell, in first-visit order.
  const std::vector<CellIndex>& cells() const { return cells_; }
  const std::vector<TrajectorySegment>& segments() const { return segments_; }

 private:
  void label(CellIndex c, int segment, int k);

  GridGeometry geometry_;
  std::vector<int> segment_;
  std::vector<int> k_;
  std::vector<CellIndex> sample_cells_;
  std::vector<CellIndex> cells_;
  std::vector<TrajectorySegment> segments_;
};

// A place where a router ray passes over the trajectory. `position` indexes
// the ray's cell list.
struct RayCrossing {
  std::size_t position = 0;
  int k = 0;
  int segment = TrajectoryRaster::kNoSegment;
};

// Trajectory cells strictly between the ray's first and last cell. A run of
// adjacent ray cells from the same trajectory segment yields one crossing, at
// the run's cell closest to the router.
std::vector<RayCrossing> find_crossings(std::span<const CellIndex> ray,
                                        const TrajectoryRaster& raster);

// Wall search interval along a ray to a sample with k >= 1, as ray positions.
struct RayEndpoints {
  std::size_t lower = 0;
  std::size_t upper = 0;
};

// lower: farthest crossing with k = 0, else the router (position 0).
// upper: nearest crossing with k >= 1, else the ray's last cell.
// Throws kDegenerateRay unless lower < upper.
RayEndpoints update_endpoints(std::span<const CellIndex> ray,
                              std::span<const RayCrossing> crossings);

// Sub-interval of a ray between consecutive boundary points (router,
// crossings, sample). begin/end index the ray and are inclusive.
struct RaySegment {
  std::size_t begin = 0;
  std::size_t end = 0;
  int k_begin = 0;
  int k_end = 0;
  // Euclidean distance between the endpoint cell centers, in cells.
  double length = 0.0;

  // Signed difference in ray order; the per-ray sum telescopes to the
  // sample's k.
  int delta_k() const { return k_end - k_begin; }
  // Number of walls inside, i.e. |delta_k| after ordering the endpoints.
  int walls() const { return delta_k() < 0 ? -delta_k() : delta_k(); }
  std::size_t intermediate_count() const { return end - begin - 1; }
};

// Crossings must be sorted by position. The router is the first boundary
// with k = 0 and the ray's last cell the final one with k = sample_k.
std::vector<RaySegment> segment_ray(std::span<const CellIndex> ray,
                                    std::span<const RayCrossing> crossings,
                                    int sample_k);

enum class WallModel {
  // mu_j = exp(-(1/M)^2) * d_j / L exactly as the formula is printed.
  kLiteralEq4,
  // Bump peaked at the segment midpoint.
  kGaussianMidpoint,
};

double literal_eq4(std::size_t intermediate, double length, double distance);

struct CellBelief {
  CellIndex cell;
  double mu = 0.0;
  double sigma = 0.0;
};

// Wall probability for the intermediate cells of one segment. d_j is the
// distance from the cell center's projection on the segment to the segment
// midpoint and sigma is M for every cell.
//  - walls() == 0: empty result (no wall mass).
//  - walls() == 1: literal formula or a midpoint bump exp(-(d/s)^2) with
//    s = L/4, scaled so the largest cell value is exp(-(1/M)^2) / 2.
//  - walls() > 1: in both modes, one such bump per wall at m*L/(w+1), each
//    with s = L/(4w), summed and clipped to [0, 1].
// A segment without intermediate cells (M = 0) puts mu = 1, sigma = 1 on its
// far endpoint.
std::vector<CellBelief> assign_wall_probability(std::span<const CellIndex> ray,
                                                const RaySegment& segment,
                                                WallModel mode);

struct Belief {
  double mu = 0.0;
  double sigma = 1.0;
};

// Uncertainty-weighted combination of a prior and a new estimate:
//   mu = s1^2/(s1^2+s2^2) * mu2 + s2^2/(s1^2+s2^2) * mu1
//   sigma^2 = s1^2 s2^2 / (s1^2 + s2^2)
// Throws kNonpositiveSigma.
Belief fuse(Belief prior, Belief observation);

// Per-cell wall belief. Cells on a zero-wall ray segment are cleared: free
// evidence there forces their effective belief to zero.
class WallBeliefGrid {
 public:
  WallBeliefGrid() = default;
  explicit WallBeliefGrid(const GridGeometry& geometry);

  const GridGeometry& geometry() const { return geometry_; }

  // Stores (mu, sigma) on an unseen cell, otherwise fuses into it.
  void fuse_beliefs(CellIndex c, double mu, double sigma);
  void clear(CellIndex c) { cleared_[geometry_.index_of(c)] = 1; }

  bool seen(CellIndex c) const { return seen_[geometry_.index_of(c)] != 0; }
  bool cleared(CellIndex c) const { return cleared_[geometry_.index_of(c)] != 0; }
  // Fused (mu, sigma); only meaningful on seen cells.
  Belief raw(CellIndex c) const { return cells_[geometry_.index_of(c)]; }
  // Effective wall probability: 0 when unseen or cleared.
  double belief(CellIndex c) const;
  double max_belief() const;

 private:
  GridGeometry geometry_;
  std::vector<Belief> cells_;
  std::vector<std::uint8_t> seen_;
  std::vector<std::uint8_t> cleared_;
};

inline constexpr int kInitialFreeScore = 127;
inline constexpr int kDefaultScoreStep = 16;
inline constexpr int kDefaultFreeThreshold = 160;
inline constexpr double kDefaultWallThreshold = 0.5;

// Free-space scores. Rule applications add signed steps to an exact integer
// tally per cell; the exposed score is 127 + tally clamped to [0, 255], so
// the result does not depend on the order of the updates. Trajectory cells
// are pinned to 255 and collision cells to 0.
class FreeSpaceAccumulator {
 public:
  FreeSpaceAccumulator() = default;
  explicit FreeSpaceAccumulator(const GridGeometry& geometry);

  const GridGeometry& geometry() const { return geometry_; }

  void add(CellIndex c, std::int64_t delta) {
    const auto i = geometry_.index_of(c);
    tally_[i] += delta;
    touched_[i] = 1;
  }
  void pin_free(CellIndex c) { pin_[geometry_.index_of(c)] = kPinFree; }
  void pin_occupied(CellIndex c) { pin_[geometry_.index_of(c)] = kPinOccupied; }

  int score(CellIndex c) const;
  bool is_trajectory(CellIndex c) const {
    return pin_[geometry_.index_of(c)] == kPinFree;
  }
  bool is_collision(CellIndex c) const {
    return pin_[geometry_.index_of(c)] == kPinOccupied;
  }
  // True for cells lying on at least one processed router ray.
  bool touched(CellIndex c) const { return touched_[geometry_.index_of(c)] != 0; }

  GridMap to_image() const;

 private:
  static constexpr std::uint8_t kPinNone = 0;
  static constexpr std::uint8_t kPinFree = 1;
  static constexpr std::uint8_t kPinOccupied = 2;

  GridGeometry geometry_;
  std::vector<std::int64_t> tally_;
  std::vector<std::uint8_t> pin_;
  std::vector<std::uint8_t> touched_;
};

struct SparseParams {
  WallModel mode = WallModel::kGaussianMidpoint;
  int score_step = kDefaultScoreStep;
  int free_threshold = kDefaultFreeThreshold;
  // Fraction of the map's largest wall belief.
  double wall_threshold = kDefaultWallThreshold;
  int threads = 1;
  // Order in which sample rays are fused; empty means sample order. Must be
  // a permutation of the sample indices.
  std::vector<std::size_t> processing_order;
};

// Rules applied to every sample ray:
//  1. trajectory cells are free (collision cells occupied);
//  2. k = 0: every ray cell gains one step;
//  3. k >= 1: intermediate cells of sub-segments with walls lose one step;
//  4. cells between two crossings of equal k gain one step.
// Throws kRouterOutOfBounds or kEmptyTrajectory.
FreeSpaceAccumulator mark_free_space(std::span<const TrajectorySample> samples,
                                     WorldPoint router,
                                     const GridGeometry& geometry,
                                     const SparseParams& params = {});

struct SparseStats {
  std::size_t rays = 0;
  // Sample cell equals the router cell.
  std::size_t skipped_rays = 0;
  // Rays whose boundary k-values drop somewhere along the ray, e.g. a k = 0
  // crossing beyond a k >= 1 one. They add no wall belief.
  std::size_t degenerate_rays = 0;
  std::size_t empty_segments = 0;
  // Rays whose segment dk do not sum to the sample's k. Always zero unless
  // something is broken.
  std::size_t telescoping_violations = 0;
};

struct SparseResult {
  GridMap occupancy;
  WallBeliefGrid beliefs;
  FreeSpaceAccumulator free_space;
  SparseStats stats;
};

// Full sparse inverse k-visibility: free space, wall beliefs and the
// thresholded occupancy map. A cell is Occupied when its belief reaches
// wall_threshold * max belief, Free when its score reaches free_threshold,
// Unknown otherwise. Trajectory cells are always Free.
SparseResult build_sparse_map(std::span<const TrajectorySample> samples,
                              WorldPoint router, const GridGeometry& geometry,
                              const SparseParams& params = {});

}  // namespace sfw

#endif  // SFW_SPARSE_INVERSE_HPP_
