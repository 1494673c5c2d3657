#ifndef SFW_SIM_HPP_
#define SFW_SIM_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "sfw/grid.hpp"
#include "sfw/trace_io.hpp"

namespace sfw {

// Log-distance path loss with a fixed attenuation per wall crossing and
// additive Gaussian noise in dB.
struct PathLossParams {
  double p0 = -30.0;         // dBm at d0
  double d0 = 1.0;           // m
  double exponent = 2.0;     // n
  double wall_loss = 12.0;   // dB per crossing
  double noise_sigma = 0.0;  // dB
  std::uint64_t seed = 0;

  // Throws kInvalidArgument.
  void validate() const;
};

// Received power at p from a router at `router`. Noise for a given
// (seed, sample_index) pair is reproducible and independent of call order.
// Throws kRouterInsideWall, or kOutOfBounds when either point is off-map.
double rssi_at(const GridMap& map, WorldPoint router, WorldPoint p,
               const PathLossParams& params, std::uint64_t sample_index = 0);

// One record per trajectory point with t = index / rate_hz, the simulated
// RSSI and the ground-truth crossing count.
// Throws kTrajectoryThroughWall if a point lies in an Occupied cell.
std::vector<TraceRecord> generate_trace(const GridMap& map, WorldPoint router,
                                        std::span<const WorldPoint> trajectory,
                                        double rate_hz,
                                        const PathLossParams& params);

// Evenly spaced points along a polyline, both ends included.
std::vector<WorldPoint> resample_polyline(std::span<const WorldPoint> vertices,
                                          std::size_t count);

struct Scenario {
  GridMap map;
  WorldPoint router;
  std::vector<WorldPoint> trajectory;
};

// Three rooms in a row (about 15.7 m^2 of floor) with a door between each
// pair, router in the first room, and a trajectory that circles each room
// 0.2 m inside its walls. 0.025 m cells on a 200x200 grid. Cells outside the
// building are Unknown.
Scenario three_room_scenario(std::size_t samples = 5000);

// Fills the cells whose centers lie in [x0, x1) x [y0, y1) with `state`.
void fill_rect(GridMap& map, WorldPoint lo, WorldPoint hi, CellState state);

}  // namespace sfw

#endif  // SFW_SIM_HPP_
