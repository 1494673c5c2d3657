#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "sfw/error.hpp"
#include "sfw/sim.hpp"
#include "sfw/sparse_inverse.hpp"
#include "test_support.hpp"

namespace sfw {
namespace {

using sfw::testing::Rng;

// Unit-resolution grid: cell (c, r) has its center at (c + 0.5, r + 0.5).
GridGeometry unit_grid(int w, int h) { return {w, h, 1.0, {0.0, 0.0}}; }
WorldPoint center(int col, int row) { return {col + 0.5, row + 0.5}; }

std::vector<TrajectorySample> samples_with_k(const std::vector<int>& ks) {
  std::vector<TrajectorySample> out;
  for (std::size_t i = 0; i < ks.size(); ++i) out.push_back({center(static_cast<int>(i), 0), ks[i]});
  return out;
}

std::vector<CellIndex> row_ray(int length) {
  std::vector<CellIndex> ray;
  for (int c = 0; c < length; ++c) ray.push_back({c, 0});
  return ray;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no sfw::Error thrown";
  return ErrorCode::kInvalidArgument;
}

// ---------------------------------------------------------------------------
// Trajectory segmentation and rasterization

TEST(SegmentTrajectory, SingleRun) {
  const auto s = segment_trajectory(samples_with_k({0, 0, 0}));
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].first, 0u);
  EXPECT_EQ(s[0].last, 2u);
  EXPECT_EQ(s[0].k, 0);
}

TEST(SegmentTrajectory, RunLength) {
  const auto s = segment_trajectory(samples_with_k({0, 0, 1, 1, 0}));
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ((std::tuple{s[0].first, s[0].last, s[0].k}), (std::tuple{0u, 1u, 0}));
  EXPECT_EQ((std::tuple{s[1].first, s[1].last, s[1].k}), (std::tuple{2u, 3u, 1}));
  EXPECT_EQ((std::tuple{s[2].first, s[2].last, s[2].k}), (std::tuple{4u, 4u, 0}));
}

TEST(SegmentTrajectory, EmptyThrows) {
  EXPECT_EQ(code_of([] { segment_trajectory({}); }), ErrorCode::kEmptyTrajectory);
}

TEST(SegmentTrajectory, ConcatenationCoversAllIndices) {
  Rng rng(61);
  std::uniform_int_distribution<int> k(0, 2), n(1, 60);
  for (int t = 0; t < 100; ++t) {
    std::vector<int> ks(n(rng));
    for (auto& v : ks) v = k(rng);
    const auto segs = segment_trajectory(samples_with_k(ks));
    std::size_t next = 0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      EXPECT_EQ(segs[i].first, next);
      for (std::size_t j = segs[i].first; j <= segs[i].last; ++j) EXPECT_EQ(ks[j], segs[i].k);
      if (i > 0) {
        EXPECT_NE(segs[i].k, segs[i - 1].k);
      }
      next = segs[i].last + 1;
    }
    EXPECT_EQ(next, ks.size());
  }
}

TEST(TrajectoryRaster, JoinsSamplesAndKeepsFirstVisit) {
  const std::vector<TrajectorySample> s = {
      {center(1, 1), 0}, {center(5, 1), 1}, {center(1, 1), 2}};
  const TrajectoryRaster r(unit_grid(8, 4), s);
  for (int c = 1; c <= 5; ++c) EXPECT_TRUE(r.contains({c, 1}));
  EXPECT_FALSE(r.contains({6, 1}));
  // Gap cells take the nearer sample's label.
  EXPECT_EQ(r.k_at({2, 1}), 0);
  EXPECT_EQ(r.k_at({4, 1}), 1);
  // Revisited on the way back with k = 2: first visit wins.
  EXPECT_EQ(r.k_at({1, 1}), 0);
  EXPECT_EQ(r.segment_at({5, 1}), 1);
  EXPECT_EQ(r.cells().size(), 5u);
}

TEST(TrajectoryRaster, SampleOutsideGridThrows) {
  const std::vector<TrajectorySample> s = {{{9.5, 0.5}, 0}};
  EXPECT_EQ(code_of([&] { TrajectoryRaster(unit_grid(4, 4), s); }), ErrorCode::kOutOfBounds);
}

// ---------------------------------------------------------------------------
// Crossings, endpoints, ray segments

// Ray along row 0 from (0,0) to (n-1,0) with vertical trajectory strokes at
// the given columns, one segment each.
struct RowScene {
  std::vector<CellIndex> ray;
  TrajectoryRaster raster;
};

RowScene row_scene(int n, const std::vector<std::pair<int, int>>& strokes) {
  std::vector<TrajectorySample> s;
  for (const auto& [col, k] : strokes) {
    s.push_back({center(col, 2), k});
    s.push_back({center(col, 0), k});
    // A different k on the way back keeps strokes in separate segments.
    s.push_back({center(col, 2), k + 10});
  }
  return {row_ray(n), TrajectoryRaster(unit_grid(n, 3), s)};
}

TEST(FindCrossings, IgnoresEndpointsAndCollapsesRuns) {
  std::vector<TrajectorySample> s;
  for (int c = 3; c <= 5; ++c) s.push_back({center(c, 0), 1});
  s.push_back({center(9, 0), 0});
  const TrajectoryRaster raster(unit_grid(10, 1), s);
  const auto crossings = find_crossings(row_ray(10), raster);
  ASSERT_EQ(crossings.size(), 2u);
  EXPECT_EQ(crossings[0].position, 3u);
  EXPECT_EQ(crossings[0].k, 1);
  // Join cells 6 and 7 sit nearer (5,0), cell 8 nearer (9,0).
  EXPECT_EQ(crossings[1].position, 8u);
  EXPECT_EQ(crossings[1].k, 0);
}

TEST(UpdateEndpoints, NoCrossings) {
  const auto ray = row_ray(10);
  const auto e = update_endpoints(ray, {});
  EXPECT_EQ(e.lower, 0u);
  EXPECT_EQ(e.upper, 9u);
}

TEST(UpdateEndpoints, FreeCrossingRaisesLowerEnd) {
  const auto scene = row_scene(11, {{4, 0}});
  const auto crossings = find_crossings(scene.ray, scene.raster);
  const auto e = update_endpoints(scene.ray, crossings);
  EXPECT_EQ(e.lower, 4u);
  EXPECT_EQ(e.upper, 10u);
}

TEST(UpdateEndpoints, BracketsWallInterval) {
  const auto scene = row_scene(11, {{3, 0}, {7, 1}});
  const auto crossings = find_crossings(scene.ray, scene.raster);
  const auto e = update_endpoints(scene.ray, crossings);
  EXPECT_EQ(e.lower, 3u);
  EXPECT_EQ(e.upper, 7u);
}

TEST(UpdateEndpoints, FreeBeyondWallIsDegenerate) {
  const std::vector<RayCrossing> crossings = {{3, 1, 0}, {6, 0, 1}};
  EXPECT_EQ(code_of([&] { update_endpoints(row_ray(10), crossings); }),
            ErrorCode::kDegenerateRay);
}

TEST(SegmentRay, NoCrossingsOneSegment) {
  const auto segs = segment_ray(row_ray(8), {}, 2);
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_EQ(segs[0].delta_k(), 2);
  EXPECT_EQ(segs[0].intermediate_count(), 6u);
  EXPECT_DOUBLE_EQ(segs[0].length, 7.0);
}

TEST(SegmentRay, DeltaKPerSegment) {
  const std::vector<RayCrossing> crossings = {{2, 0, 0}, {5, 1, 1}};
  const auto segs = segment_ray(row_ray(8), crossings, 1);
  ASSERT_EQ(segs.size(), 3u);
  EXPECT_EQ(segs[0].delta_k(), 0);
  EXPECT_EQ(segs[1].delta_k(), 1);
  EXPECT_EQ(segs[2].delta_k(), 0);
}

TEST(SegmentRay, DeltaKTelescopes) {
  Rng rng(62);
  std::uniform_int_distribution<int> k(0, 4);
  for (int t = 0; t < 500; ++t) {
    std::vector<RayCrossing> crossings;
    for (std::size_t p = 1; p < 29; ++p) {
      if (k(rng) == 0) crossings.push_back({p, k(rng), static_cast<int>(p)});
    }
    const int sample_k = k(rng);
    int sum = 0;
    for (const auto& s : segment_ray(row_ray(30), crossings, sample_k)) sum += s.delta_k();
    EXPECT_EQ(sum, sample_k);
  }
}

// ---------------------------------------------------------------------------
// Wall probability

RaySegment whole_row(int n, int k_end) {
  return {0, static_cast<std::size_t>(n - 1), 0, k_end, static_cast<double>(n - 1)};
}

TEST(WallProbability, ZeroDeltaHasNoMass) {
  const auto ray = row_ray(9);
  EXPECT_TRUE(assign_wall_probability(ray, whole_row(9, 0), WallModel::kGaussianMidpoint).empty());
  EXPECT_TRUE(assign_wall_probability(ray, whole_row(9, 0), WallModel::kLiteralEq4).empty());
}

TEST(WallProbability, LiteralFormulaIsZeroAtMidpoint) {
  EXPECT_EQ(literal_eq4(3, 5.0, 0.0), 0.0);
}

TEST(WallProbability, LiteralModeFollowsFormula) {
  const auto ray = row_ray(6);  // L = 5, M = 4, midpoint at 2.5
  const auto cells = assign_wall_probability(ray, whole_row(6, 1), WallModel::kLiteralEq4);
  ASSERT_EQ(cells.size(), 4u);
  for (std::size_t j = 0; j < 4; ++j) {
    const double d = std::abs((j + 1.0) - 2.5);
    EXPECT_DOUBLE_EQ(cells[j].mu, std::exp(-1.0 / 16.0) * d / 5.0);
    EXPECT_EQ(cells[j].sigma, 4.0);
  }
}

TEST(WallProbability, GaussianPeaksAtMidpointSymmetrically) {
  const auto ray = row_ray(7);  // M = 5, midpoint cell 3
  const auto cells = assign_wall_probability(ray, whole_row(7, 1), WallModel::kGaussianMidpoint);
  ASSERT_EQ(cells.size(), 5u);
  const auto top = std::max_element(cells.begin(), cells.end(),
                                    [](auto& a, auto& b) { return a.mu < b.mu; });
  EXPECT_EQ(top->cell, (CellIndex{3, 0}));
  EXPECT_DOUBLE_EQ(top->mu, std::exp(-1.0 / 25.0) / 2.0);
  EXPECT_DOUBLE_EQ(cells[0].mu, cells[4].mu);
  EXPECT_DOUBLE_EQ(cells[1].mu, cells[3].mu);
  for (const auto& c : cells) EXPECT_EQ(c.sigma, 5.0);
}

TEST(WallProbability, TwoWallsGiveTwoModes) {
  const auto ray = row_ray(10);  // L = 9
  const auto cells = assign_wall_probability(ray, whole_row(10, 2), WallModel::kGaussianMidpoint);
  std::vector<int> maxima;
  for (std::size_t j = 0; j < cells.size(); ++j) {
    const double left = j > 0 ? cells[j - 1].mu : -1.0;
    const double right = j + 1 < cells.size() ? cells[j + 1].mu : -1.0;
    if (cells[j].mu > left && cells[j].mu > right) maxima.push_back(cells[j].cell.col);
  }
  EXPECT_EQ(maxima, (std::vector<int>{3, 6}));
  for (const auto& c : cells) {
    EXPECT_GE(c.mu, 0.0);
    EXPECT_LE(c.mu, 1.0);
  }
}

TEST(WallProbability, EmptySegmentPutsCertaintyOnFarEnd) {
  const auto ray = row_ray(2);
  const auto cells = assign_wall_probability(ray, whole_row(2, 1), WallModel::kGaussianMidpoint);
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_EQ(cells[0].cell, (CellIndex{1, 0}));
  EXPECT_EQ(cells[0].mu, 1.0);
  EXPECT_EQ(cells[0].sigma, 1.0);
}

TEST(WallProbability, SingleWallIsUnimodalOnRandomRays) {
  Rng rng(63);
  const GridGeometry g = unit_grid(60, 60);
  for (int t = 0; t < 2000; ++t) {
    const auto ray = trace_ray(sfw::testing::random_cell(rng, g), sfw::testing::random_cell(rng, g));
    if (ray.size() < 3) continue;
    const CellIndex a = ray.front(), b = ray.back();
    const RaySegment seg{0, ray.size() - 1, 0, 1,
                         std::hypot(b.col - a.col, b.row - a.row)};
    auto cells = assign_wall_probability(ray, seg, WallModel::kGaussianMidpoint);
    // Corner side cells share a ray step, so order by projection instead.
    auto along = [&](const CellBelief& c) {
      return (c.cell.col - a.col) * (b.col - a.col) + (c.cell.row - a.row) * (b.row - a.row);
    };
    std::stable_sort(cells.begin(), cells.end(),
                     [&](const auto& x, const auto& y) { return along(x) < along(y); });
    // Rises to one peak (ties resolve to its first cell), then falls.
    std::size_t peak = 0;
    for (std::size_t j = 1; j < cells.size(); ++j) {
      if (cells[j].mu > cells[peak].mu) peak = j;
    }
    for (std::size_t j = 1; j <= peak; ++j) ASSERT_LE(cells[j - 1].mu, cells[j].mu);
    for (std::size_t j = peak + 1; j < cells.size(); ++j) ASSERT_LE(cells[j].mu, cells[j - 1].mu);
    for (std::size_t j = 0; j < peak; ++j) ASSERT_LT(cells[j].mu, cells[peak].mu);
  }
}

// ---------------------------------------------------------------------------
// Fusion

TEST(Fuse, EqualVariancesAverage) {
  const Belief f = fuse({0.2, 1.5}, {0.4, 1.5});
  EXPECT_DOUBLE_EQ(f.mu, 0.3);
  EXPECT_DOUBLE_EQ(f.sigma, 1.5 / std::sqrt(2.0));
}

TEST(Fuse, VagueObservationBarelyMovesPrior) {
  EXPECT_NEAR(fuse({0.9, 1e-4}, {0.1, 1e4}).mu, 0.9, 1e-12);
  EXPECT_NEAR(fuse({0.9, 1e4}, {0.1, 1e-4}).mu, 0.1, 1e-12);
}

TEST(Fuse, ThreeObservationsAnyOrderMatchClosedForm) {
  const std::vector<Belief> obs = {{0.1, 0.5}, {0.8, 3.0}, {0.35, 1.25}};
  double w = 0.0, wm = 0.0;
  for (const auto& o : obs) {
    w += 1.0 / (o.sigma * o.sigma);
    wm += o.mu / (o.sigma * o.sigma);
  }
  std::vector<int> idx = {0, 1, 2};
  do {
    const Belief f = fuse(fuse(obs[idx[0]], obs[idx[1]]), obs[idx[2]]);
    EXPECT_NEAR(f.mu, wm / w, 1e-12);
    EXPECT_NEAR(f.sigma, std::sqrt(1.0 / w), 1e-12);
  } while (std::next_permutation(idx.begin(), idx.end()));
}

TEST(Fuse, NonpositiveSigmaRejected) {
  EXPECT_EQ(code_of([] { fuse({0.5, 0.0}, {0.5, 1.0}); }), ErrorCode::kNonpositiveSigma);
  WallBeliefGrid grid(unit_grid(2, 2));
  EXPECT_EQ(code_of([&] { grid.fuse_beliefs({0, 0}, 0.5, -1.0); }),
            ErrorCode::kNonpositiveSigma);
}

TEST(WallBeliefGrid, FirstObservationStoredThenFused) {
  WallBeliefGrid grid(unit_grid(3, 3));
  EXPECT_FALSE(grid.seen({1, 1}));
  grid.fuse_beliefs({1, 1}, 0.6, 2.0);
  EXPECT_EQ(grid.raw({1, 1}).mu, 0.6);
  EXPECT_EQ(grid.raw({1, 1}).sigma, 2.0);
  grid.fuse_beliefs({1, 1}, 0.2, 2.0);
  EXPECT_DOUBLE_EQ(grid.belief({1, 1}), 0.4);
  EXPECT_DOUBLE_EQ(grid.max_belief(), 0.4);
  grid.clear({1, 1});
  EXPECT_EQ(grid.belief({1, 1}), 0.0);
  EXPECT_EQ(grid.max_belief(), 0.0);
}

TEST(WallBeliefGrid, StaysInUnitInterval) {
  Rng rng(64);
  std::uniform_real_distribution<double> mu(-0.5, 1.5), sigma(0.01, 10.0);
  WallBeliefGrid grid(unit_grid(1, 1));
  for (int i = 0; i < 1000; ++i) {
    grid.fuse_beliefs({0, 0}, mu(rng), sigma(rng));
    ASSERT_GE(grid.belief({0, 0}), 0.0);
    ASSERT_LE(grid.belief({0, 0}), 1.0);
    ASSERT_GT(grid.raw({0, 0}).sigma, 0.0);
  }
}

// ---------------------------------------------------------------------------
// Free space

TEST(MarkFreeSpace, LineOfSightSampleFreesItsRay) {
  const GridGeometry g = unit_grid(10, 3);
  const std::vector<TrajectorySample> s = {{center(6, 1), 0}};
  const auto acc = mark_free_space(s, center(1, 1), g);
  for (int row = 0; row < 3; ++row) {
    for (int col = 0; col < 10; ++col) {
      const int expected = row != 1 || col < 1 || col > 6 ? 127 : col == 6 ? 255 : 127 + 16;
      EXPECT_EQ(acc.score({col, row}), expected) << col << "," << row;
    }
  }
}

TEST(MarkFreeSpace, WalledSampleScoresRayTowardWall) {
  const GridGeometry g = unit_grid(10, 3);
  const std::vector<TrajectorySample> s = {{center(6, 1), 1}};
  const auto acc = mark_free_space(s, center(1, 1), g);
  EXPECT_EQ(acc.score({6, 1}), 255);
  EXPECT_EQ(acc.score({1, 1}), 127);
  for (int col = 2; col < 6; ++col) EXPECT_EQ(acc.score({col, 1}), 127 - 16);
  EXPECT_TRUE(acc.is_trajectory({6, 1}));
  EXPECT_FALSE(acc.is_trajectory({5, 1}));
}

TEST(MarkFreeSpace, CollisionCellPinnedOccupied) {
  const std::vector<TrajectorySample> s = {{center(3, 1), 0}, {center(5, 1), 0, true}};
  const auto acc = mark_free_space(s, center(0, 1), unit_grid(8, 3));
  EXPECT_EQ(acc.score({5, 1}), 0);
  EXPECT_TRUE(acc.is_collision({5, 1}));
  EXPECT_EQ(acc.score({3, 1}), 255);
}

TEST(MarkFreeSpace, RouterOutsideGrid) {
  const std::vector<TrajectorySample> s = {{center(1, 1), 0}};
  EXPECT_EQ(code_of([&] { mark_free_space(s, {-3.0, 1.0}, unit_grid(4, 4)); }),
            ErrorCode::kRouterOutOfBounds);
}

TEST(MarkFreeSpace, ScoresStayClamped) {
  const GridGeometry g = unit_grid(12, 12);
  std::vector<TrajectorySample> s;
  for (int i = 0; i < 4000; ++i) s.push_back({center(10, 1 + i % 10), (i / 10) % 2});
  SparseParams p;
  p.score_step = 100;
  const auto acc = mark_free_space(s, center(1, 6), g, p);
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    const int v = acc.score(g.cell_at(i));
    ASSERT_GE(v, 0);
    ASSERT_LE(v, 255);
  }
}

// Inside the polygon up to one cell of boundary slack.
bool near_inside(const std::vector<WorldPoint>& polygon, const GridGeometry& g, CellIndex c) {
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      if (sfw::testing::inside_polygon(polygon, cell_to_world(g, {c.col + dc, c.row + dr}))) {
        return true;
      }
    }
  }
  return false;
}

std::vector<WorldPoint> densify(const std::vector<WorldPoint>& vertices, std::size_t n) {
  return resample_polyline(vertices, n);
}

TEST(MarkFreeSpace, OpenLoopAroundRouterFreesOnlyItsInterior) {
  // U-shaped route inside a room, router inside, line of sight everywhere.
  const GridGeometry g = unit_grid(40, 40);
  const std::vector<WorldPoint> u = {{8.5, 30.5}, {8.5, 8.5}, {31.5, 8.5}, {31.5, 30.5}};
  std::vector<TrajectorySample> s;
  for (const auto& p : densify(u, 400)) s.push_back({p, 0});
  const auto acc = mark_free_space(s, {20.0, 18.0}, g);
  const std::vector<WorldPoint> closed = {{8.5, 30.5}, {8.5, 8.5}, {31.5, 8.5}, {31.5, 30.5}};
  std::size_t interior = 0, freed_interior = 0;
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    const CellIndex c = g.cell_at(i);
    const WorldPoint p = cell_to_world(g, c);
    const bool inside = sfw::testing::inside_polygon(closed, p);
    if (acc.score(c) > 127 && !acc.is_trajectory(c)) {
      EXPECT_TRUE(near_inside(closed, g, c)) << c.col << "," << c.row;
    }
    // Interior cells below the router lie on some ray to the U.
    if (inside && p.y < 18.0 && !acc.is_trajectory(c)) {
      ++interior;
      freed_interior += acc.score(c) > 127;
    }
  }
  EXPECT_EQ(freed_interior, interior);
}

TEST(MarkFreeSpace, ClosedLoopBehindWallFreesPolygonInterior) {
  // Router outside a closed rectangular route; every sample sees one wall.
  // Only cells between two equal-k crossings, i.e. inside the loop, gain.
  const GridGeometry g = unit_grid(50, 40);
  const std::vector<WorldPoint> loop = {
      {20.5, 8.5}, {44.5, 8.5}, {44.5, 31.5}, {20.5, 31.5}, {20.5, 8.5}};
  std::vector<TrajectorySample> s;
  for (const auto& p : densify(loop, 800)) s.push_back({p, 1});
  const auto acc = mark_free_space(s, {4.5, 20.5}, g);
  std::size_t inside_cells = 0, freed_inside = 0;
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    const CellIndex c = g.cell_at(i);
    if (acc.is_trajectory(c)) continue;
    const bool inside = sfw::testing::inside_polygon(loop, cell_to_world(g, c));
    if (acc.score(c) > 127) {
      EXPECT_TRUE(inside) << c.col << "," << c.row;
    }
    if (acc.score(c) < 127) {
      EXPECT_FALSE(inside) << c.col << "," << c.row;
    }
    if (inside) {
      ++inside_cells;
      freed_inside += acc.score(c) > 127;
    }
  }
  EXPECT_GT(static_cast<double>(freed_inside), 0.95 * inside_cells);
}

// ---------------------------------------------------------------------------
// Full pipeline

TEST(BuildSparseMap, StarAroundRouterHasNoWalls) {
  const GridGeometry g = unit_grid(30, 30);
  std::vector<TrajectorySample> s;
  const double pi = std::acos(-1.0);
  for (int i = 0; i < 360; ++i) {
    const double a = 2 * pi * i / 360;
    const double r = i % 2 == 0 ? 12.0 : 6.0;
    s.push_back({{15.0 + r * std::cos(a), 15.0 + r * std::sin(a)}, 0});
  }
  const auto result = build_sparse_map(s, {15.0, 15.0}, g);
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    const CellIndex c = g.cell_at(i);
    EXPECT_NE(result.occupancy.state(c), CellState::kOccupied);
    if (result.free_space.touched(c)) {
      EXPECT_EQ(result.occupancy.state(c), CellState::kFree);
    }
  }
  EXPECT_EQ(result.beliefs.max_belief(), 0.0);
}

TEST(BuildSparseMap, SampleOnRouterCellIsSkippedButStillFree) {
  const std::vector<TrajectorySample> s = {{center(2, 2), 0}, {center(6, 2), 1}};
  const auto result = build_sparse_map(s, center(2, 2), unit_grid(9, 5));
  EXPECT_EQ(result.stats.skipped_rays, 1u);
  EXPECT_EQ(result.stats.rays, 1u);
  EXPECT_EQ(result.occupancy.state({2, 2}), CellState::kFree);
}

TEST(BuildSparseMap, RejectsBadProcessingOrder) {
  const std::vector<TrajectorySample> s = {{center(1, 1), 0}, {center(3, 1), 1}};
  SparseParams p;
  p.processing_order = {0, 0};
  EXPECT_EQ(code_of([&] { build_sparse_map(s, center(0, 0), unit_grid(5, 5), p); }),
            ErrorCode::kInvalidArgument);
  p.processing_order = {1};
  EXPECT_EQ(code_of([&] { build_sparse_map(s, center(0, 0), unit_grid(5, 5), p); }),
            ErrorCode::kInvalidArgument);
}

// Two rooms split by a wall at x = 1.95..2.05 m with a doorway at the top;
// the robot walks down both sides at equal distance from the wall.
struct Corridor {
  GridMap map;
  WorldPoint router{1.0, 1.0};
  std::vector<TrajectorySample> samples;
};

Corridor corridor() {
  Corridor c;
  c.map = GridMap(GridGeometry{160, 100, 0.025, {}}, kFreeValue);
  fill_rect(c.map, {1.95, 0.0}, {2.05, 2.0}, CellState::kOccupied);
  const std::vector<WorldPoint> route = {
      {1.6, 0.2}, {1.6, 2.3}, {2.4, 2.3}, {2.4, 0.2}};
  const auto points = resample_polyline(route, 1500);
  const auto trace = generate_trace(c.map, c.router, points, 10.0, PathLossParams{});
  for (const auto& r : trace) c.samples.push_back({r.position, *r.k_true});
  return c;
}

TEST(BuildSparseMap, CorridorWallBeliefPeaksAtTheWall) {
  const Corridor c = corridor();
  const auto& g = c.map.geometry();
  const auto result = build_sparse_map(c.samples, c.router, g);
  const CellIndex router = world_to_cell(g, c.router);
  const TrajectoryRaster raster(g, c.samples);
  std::size_t checked = 0;
  for (std::size_t i = 0; i < c.samples.size(); ++i) {
    if (c.samples[i].k != 1) continue;
    const auto ray = trace_ray(router, raster.sample_cells()[i]);
    CellIndex best = ray.front();
    for (const CellIndex cell : ray) {
      if (result.beliefs.belief(cell) > result.beliefs.belief(best)) best = cell;
    }
    if (result.beliefs.belief(best) == 0.0) continue;
    ++checked;
    bool near = false;
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        const CellIndex n{best.col + dc, best.row + dr};
        near = near || (g.contains(n) && c.map.is_occupied(n));
      }
    }
    EXPECT_TRUE(near) << "sample " << i << " peak (" << best.col << "," << best.row << ")";
  }
  EXPECT_GT(checked, 100u);
}

TEST(BuildSparseMap, NoiselessFreeCellsOnClearSegmentsGetNoBelief) {
  const Scenario sc = three_room_scenario(2000);
  const auto trace = generate_trace(sc.map, sc.router, sc.trajectory, 10.0, PathLossParams{});
  std::vector<TrajectorySample> s;
  for (const auto& r : trace) s.push_back({r.position, *r.k_true});
  const auto& g = sc.map.geometry();
  const auto result = build_sparse_map(s, sc.router, g);
  const TrajectoryRaster raster(g, s);
  const CellIndex router = world_to_cell(g, sc.router);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const CellIndex target = raster.sample_cells()[i];
    if (target == router) continue;
    const auto ray = trace_ray(router, target);
    for (const auto& seg : segment_ray(ray, find_crossings(ray, raster), s[i].k)) {
      if (seg.delta_k() != 0) continue;
      for (std::size_t p = seg.begin; p <= seg.end; ++p) {
        if (sc.map.state(ray[p]) == CellState::kFree) {
          ASSERT_EQ(result.beliefs.belief(ray[p]), 0.0);
        }
      }
    }
  }
  // Rule 1 dominance
  for (const CellIndex c : raster.cells()) {
    EXPECT_EQ(result.occupancy.state(c), CellState::kFree);
  }
}

TEST(BuildSparseMap, ThreadsAndOrderDoNotChangeTheResult) {
  const Corridor c = corridor();
  const auto& g = c.map.geometry();
  const auto base = build_sparse_map(c.samples, c.router, g);
  SparseParams p;
  p.threads = 3;
  p.processing_order.resize(c.samples.size());
  std::iota(p.processing_order.rbegin(), p.processing_order.rend(), 0);
  const auto other = build_sparse_map(c.samples, c.router, g, p);
  EXPECT_EQ(other.occupancy, base.occupancy);
  EXPECT_EQ(other.free_space.to_image(), base.free_space.to_image());
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    const CellIndex cell = g.cell_at(i);
    ASSERT_NEAR(other.beliefs.belief(cell), base.beliefs.belief(cell), 1e-9);
  }
}

TEST(BuildSparseMap, LiteralModeRuns) {
  const Corridor c = corridor();
  SparseParams p;
  p.mode = WallModel::kLiteralEq4;
  const auto r = build_sparse_map(c.samples, c.router, c.map.geometry(), p);
  EXPECT_EQ(r.stats.telescoping_violations, 0u);
  EXPECT_GT(r.beliefs.max_belief(), 0.0);
}

}  // namespace
}  // namespace sfw
