#include "sfw/sim.hpp"

#include <cmath>
#include <random>

#include <fmt/format.h>

#include "sfw/error.hpp"
#include "sfw/kvis.hpp"

namespace sfw {
namespace {

double gaussian_noise(const PathLossParams& params, std::uint64_t index) {
  if (params.noise_sigma == 0.0) return 0.0;
  std::seed_seq seq{static_cast<std::uint32_t>(params.seed),
                    static_cast<std::uint32_t>(params.seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> dist(0.0, params.noise_sigma);
  return dist(rng);
}

}  // namespace

void PathLossParams::validate() const {
  if (!(exponent > 0.0) || !(wall_loss > 0.0) || !(noise_sigma >= 0.0) ||
      !(d0 > 0.0) || !std::isfinite(p0)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("invalid path-loss parameters (n={}, wall_loss={}, "
                            "noise_sigma={}, d0={})",
                            exponent, wall_loss, noise_sigma, d0));
  }
}

double rssi_at(const GridMap& map, WorldPoint router, WorldPoint p,
               const PathLossParams& params, std::uint64_t sample_index) {
  params.validate();
  const CellIndex router_cell = world_to_cell(map.geometry(), router);
  const CellIndex cell = world_to_cell(map.geometry(), p);
  if (map.is_occupied(router_cell)) {
    throw Error(ErrorCode::kRouterInsideWall, "router lies in a wall cell");
  }
  const double d = std::hypot(p.x - router.x, p.y - router.y);
  const int walls = count_crossings(map, router_cell, cell);
  return params.p0 -
         10.0 * params.exponent * std::log10(std::max(d, params.d0) / params.d0) -
         params.wall_loss * walls + gaussian_noise(params, sample_index);
}

std::vector<TraceRecord> generate_trace(const GridMap& map, WorldPoint router,
                                        std::span<const WorldPoint> trajectory,
                                        double rate_hz,
                                        const PathLossParams& params) {
  if (!(rate_hz > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sample rate must be positive");
  }
  params.validate();
  const CellIndex router_cell = world_to_cell(map.geometry(), router);
  if (map.is_occupied(router_cell)) {
    throw Error(ErrorCode::kRouterInsideWall, "router lies in a wall cell");
  }
  std::vector<TraceRecord> trace;
  trace.reserve(trajectory.size());
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const WorldPoint p = trajectory[i];
    const CellIndex cell = world_to_cell(map.geometry(), p);
    if (map.is_occupied(cell)) {
      throw Error(ErrorCode::kTrajectoryThroughWall,
                  fmt::format("trajectory point {} ({}, {}) is inside a wall",
                              i, p.x, p.y));
    }
    TraceRecord r;
    r.t = static_cast<double>(i) / rate_hz;
    r.position = p;
    r.rssi = rssi_at(map, router, p, params, i);
    r.k_true = count_crossings(map, router_cell, cell);
    trace.push_back(r);
  }
  return trace;
}

std::vector<WorldPoint> resample_polyline(std::span<const WorldPoint> vertices,
                                          std::size_t count) {
  if (vertices.empty() || count == 0) return {};
  if (vertices.size() == 1 || count == 1) {
    return std::vector<WorldPoint>(count, vertices.front());
  }
  std::vector<double> cumulative{0.0};
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    cumulative.push_back(cumulative.back() +
                         std::hypot(vertices[i].x - vertices[i - 1].x,
                                    vertices[i].y - vertices[i - 1].y));
  }
  const double total = cumulative.back();
  std::vector<WorldPoint> out;
  out.reserve(count);
  std::size_t seg = 1;
  for (std::size_t i = 0; i < count; ++i) {
    const double s = total * static_cast<double>(i) / static_cast<double>(count - 1);
    while (seg + 1 < vertices.size() && cumulative[seg] < s) ++seg;
    const double span = cumulative[seg] - cumulative[seg - 1];
    const double f = span > 0.0 ? (s - cumulative[seg - 1]) / span : 0.0;
    const WorldPoint a = vertices[seg - 1];
    const WorldPoint b = vertices[seg];
    out.push_back({a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)});
  }
  return out;
}

void fill_rect(GridMap& map, WorldPoint lo, WorldPoint hi, CellState state) {
  for (int row = 0; row < map.height(); ++row) {
    for (int col = 0; col < map.width(); ++col) {
      const WorldPoint c = cell_to_world(map.geometry(), {col, row});
      if (c.x >= lo.x && c.x < hi.x && c.y >= lo.y && c.y < hi.y) {
        map.set_state({col, row}, state);
      }
    }
  }
}

Scenario three_room_scenario(std::size_t samples) {
  Scenario s;
  s.map = GridMap(GridGeometry{200, 200, 0.025, {0.0, 0.0}}, kUnknownValue);
  GridMap& m = s.map;

  // Floor 4.5 m x 3.65 m, 0.1 m walls.
  fill_rect(m, {0.15, 0.60}, {4.85, 4.45}, CellState::kOccupied);
  fill_rect(m, {0.25, 0.70}, {4.75, 4.35}, CellState::kFree);
  fill_rect(m, {1.70, 0.70}, {1.80, 4.35}, CellState::kOccupied);
  fill_rect(m, {3.20, 0.70}, {3.30, 4.35}, CellState::kOccupied);
  fill_rect(m, {1.70, 3.35}, {1.80, 3.95}, CellState::kFree);
  fill_rect(m, {3.20, 1.05}, {3.30, 1.65}, CellState::kFree);

  s.router = {0.95, 2.30};

  const std::vector<WorldPoint> route = {
      // Room A, entered from its door.
      {1.50, 3.65}, {1.50, 0.90}, {0.45, 0.90}, {0.45, 4.15}, {1.50, 4.15},
      {1.50, 3.65},
      // Through the first door, along the top of room B to the second door.
      {2.00, 3.65}, {2.00, 4.15}, {3.00, 4.15}, {3.00, 1.35},
      // Room C.
      {3.50, 1.35}, {3.50, 0.90}, {4.55, 0.90}, {4.55, 4.15}, {3.50, 4.15},
      {3.50, 1.35},
      // Back into B and around its lower half.
      {3.00, 1.35}, {3.00, 0.90}, {2.00, 0.90}, {2.00, 3.65}};
  s.trajectory = resample_polyline(route, samples);
  return s;
}

}  // namespace sfw
