#include "sfw/sparse_inverse.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "sfw/error.hpp"

namespace sfw {

std::vector<TrajectorySegment> segment_trajectory(
    std::span<const TrajectorySample> samples) {
  if (samples.empty()) {
    throw Error(ErrorCode::kEmptyTrajectory, "trajectory has no samples");
  }
  std::vector<TrajectorySegment> segments;
  segments.push_back({0, 0, samples[0].k});
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].k == segments.back().k) {
      segments.back().last = i;
    } else {
      segments.push_back({i, i, samples[i].k});
    }
  }
  return segments;
}

// ---------------------------------------------------------------------------
// TrajectoryRaster

TrajectoryRaster::TrajectoryRaster(const GridGeometry& geometry,
                                   std::span<const TrajectorySample> samples)
    : geometry_(geometry),
      segment_(geometry.cell_count(), kNoSegment),
      k_(geometry.cell_count(), 0),
      segments_(segment_trajectory(samples)) {
  sample_cells_.reserve(samples.size());
  for (const auto& s : samples) {
    sample_cells_.push_back(world_to_cell(geometry_, s.position));
  }

  int seg = 0;
  label(sample_cells_[0], seg, samples[0].k);
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const int prev_seg = seg;
    if (i > segments_[static_cast<std::size_t>(seg)].last) ++seg;
    const auto join = trace_ray(sample_cells_[i - 1], sample_cells_[i]);
    for (std::size_t p = 1; p + 1 < join.size(); ++p) {
      if (2 * p < join.size()) {
        label(join[p], prev_seg, samples[i - 1].k);
      } else {
        label(join[p], seg, samples[i].k);
      }
    }
    label(sample_cells_[i], seg, samples[i].k);
  }
}

void TrajectoryRaster::label(CellIndex c, int segment, int k) {
  const auto i = geometry_.index_of(c);
  if (segment_[i] != kNoSegment) return;
  segment_[i] = segment;
  k_[i] = k;
  cells_.push_back(c);
}

std::vector<RayCrossing> find_crossings(std::span<const CellIndex> ray,
                                        const TrajectoryRaster& raster) {
  std::vector<RayCrossing> crossings;
  int run_segment = TrajectoryRaster::kNoSegment;
  for (std::size_t p = 1; p + 1 < ray.size(); ++p) {
    if (!raster.contains(ray[p])) {
      run_segment = TrajectoryRaster::kNoSegment;
      continue;
    }
    const int seg = raster.segment_at(ray[p]);
    if (seg != run_segment) {
      crossings.push_back({p, raster.k_at(ray[p]), seg});
      run_segment = seg;
    }
  }
  return crossings;
}

RayEndpoints update_endpoints(std::span<const CellIndex> ray,
                              std::span<const RayCrossing> crossings) {
  RayEndpoints ends{0, ray.empty() ? 0 : ray.size() - 1};
  bool upper_found = false;
  for (const auto& c : crossings) {
    if (c.k == 0) {
      ends.lower = std::max(ends.lower, c.position);
    } else if (!upper_found) {
      ends.upper = c.position;
      upper_found = true;
    }
  }
  if (ends.lower >= ends.upper) {
    throw Error(ErrorCode::kDegenerateRay,
                fmt::format("wall interval [{}, {}] is empty", ends.lower,
                            ends.upper));
  }
  return ends;
}

std::vector<RaySegment> segment_ray(std::span<const CellIndex> ray,
                                    std::span<const RayCrossing> crossings,
                                    int sample_k) {
  std::vector<RaySegment> segments;
  if (ray.size() < 2) return segments;
  auto make = [&](std::size_t b, int kb, std::size_t e, int ke) {
    const double dx = ray[e].col - ray[b].col;
    const double dy = ray[e].row - ray[b].row;
    segments.push_back({b, e, kb, ke, std::hypot(dx, dy)});
  };
  std::size_t pos = 0;
  int k = 0;
  for (const auto& c : crossings) {
    make(pos, k, c.position, c.k);
    pos = c.position;
    k = c.k;
  }
  make(pos, k, ray.size() - 1, sample_k);
  return segments;
}

// ---------------------------------------------------------------------------
// Wall probability

double literal_eq4(std::size_t intermediate, double length, double distance) {
  const double inv_m = 1.0 / static_cast<double>(intermediate);
  return std::exp(-(inv_m * inv_m)) * distance / length;
}

std::vector<CellBelief> assign_wall_probability(std::span<const CellIndex> ray,
                                                const RaySegment& segment,
                                                WallModel mode) {
  std::vector<CellBelief> out;
  const int walls = segment.walls();
  if (walls == 0) return out;
  const std::size_t m = segment.intermediate_count();
  if (m == 0) {
    out.push_back({ray[segment.end], 1.0, 1.0});
    return out;
  }

  const double length = segment.length;
  const CellIndex a = ray[segment.begin];
  const double ux = (ray[segment.end].col - a.col) / length;
  const double uy = (ray[segment.end].row - a.row) / length;
  const double sigma = static_cast<double>(m);
  const double inv_m = 1.0 / sigma;
  const double peak = std::exp(-(inv_m * inv_m)) * 0.5;

  // Position of each intermediate cell center projected on the segment.
  std::vector<double> along(m);
  for (std::size_t j = 0; j < m; ++j) {
    const CellIndex c = ray[segment.begin + 1 + j];
    along[j] = (c.col - a.col) * ux + (c.row - a.row) * uy;
  }
  // Distance to the midpoint, snapped so mirror-image cells get bit-identical
  // values and exact ties stay ties.
  auto from_mid = [&](std::size_t j) {
    return std::round(std::abs(along[j] - length / 2.0) * 1e9) / 1e9;
  };

  std::vector<double> mu(m, 0.0);
  if (walls == 1 && mode == WallModel::kLiteralEq4) {
    for (std::size_t j = 0; j < m; ++j) {
      mu[j] = literal_eq4(m, length, from_mid(j));
    }
  } else if (walls == 1) {
    const double s = length / 4.0;
    double top = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double d = from_mid(j) / s;
      mu[j] = std::exp(-d * d);
      top = std::max(top, mu[j]);
    }
    for (double& v : mu) v = peak * v / top;
  } else {
    const double s = length / (4.0 * walls);
    for (int mode_index = 1; mode_index <= walls; ++mode_index) {
      const double center = mode_index * length / (walls + 1);
      for (std::size_t j = 0; j < m; ++j) {
        const double d = (along[j] - center) / s;
        mu[j] += peak * std::exp(-d * d);
      }
    }
    for (double& v : mu) v = std::clamp(v, 0.0, 1.0);
  }

  out.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    out.push_back({ray[segment.begin + 1 + j], mu[j], sigma});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fusion

Belief fuse(Belief prior, Belief observation) {
  if (!(prior.sigma > 0.0) || !(observation.sigma > 0.0)) {
    throw Error(ErrorCode::kNonpositiveSigma,
                fmt::format("sigma must be positive ({}, {})", prior.sigma,
                            observation.sigma));
  }
  const double v1 = prior.sigma * prior.sigma;
  const double v2 = observation.sigma * observation.sigma;
  const double total = v1 + v2;
  Belief out;
  out.mu = v1 / total * observation.mu + v2 / total * prior.mu;
  out.sigma = std::sqrt(v1 * v2 / total);
  return out;
}

WallBeliefGrid::WallBeliefGrid(const GridGeometry& geometry)
    : geometry_(geometry),
      cells_(geometry.cell_count()),
      seen_(geometry.cell_count(), 0),
      cleared_(geometry.cell_count(), 0) {}

void WallBeliefGrid::fuse_beliefs(CellIndex c, double mu, double sigma) {
  if (!(sigma > 0.0)) {
    throw Error(ErrorCode::kNonpositiveSigma,
                fmt::format("sigma {} at ({}, {})", sigma, c.col, c.row));
  }
  const auto i = geometry_.index_of(c);
  if (seen_[i] == 0) {
    cells_[i] = {std::clamp(mu, 0.0, 1.0), sigma};
    seen_[i] = 1;
  } else {
    cells_[i] = fuse(cells_[i], {std::clamp(mu, 0.0, 1.0), sigma});
  }
}

double WallBeliefGrid::belief(CellIndex c) const {
  const auto i = geometry_.index_of(c);
  if (seen_[i] == 0 || cleared_[i] != 0) return 0.0;
  return cells_[i].mu;
}

double WallBeliefGrid::max_belief() const {
  double top = 0.0;
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (seen_[i] != 0 && cleared_[i] == 0) top = std::max(top, cells_[i].mu);
  }
  return top;
}

// ---------------------------------------------------------------------------
// Free space

FreeSpaceAccumulator::FreeSpaceAccumulator(const GridGeometry& geometry)
    : geometry_(geometry),
      tally_(geometry.cell_count(), 0),
      pin_(geometry.cell_count(), kPinNone),
      touched_(geometry.cell_count(), 0) {}

int FreeSpaceAccumulator::score(CellIndex c) const {
  const auto i = geometry_.index_of(c);
  if (pin_[i] == kPinFree) return 255;
  if (pin_[i] == kPinOccupied) return 0;
  return static_cast<int>(
      std::clamp<std::int64_t>(kInitialFreeScore + tally_[i], 0, 255));
}

GridMap FreeSpaceAccumulator::to_image() const {
  GridMap image(geometry_);
  for (std::size_t i = 0; i < geometry_.cell_count(); ++i) {
    image.mutable_cells()[i] =
        static_cast<std::uint8_t>(score(geometry_.cell_at(i)));
  }
  return image;
}

// ---------------------------------------------------------------------------
// Pipeline

namespace {

struct RayOutcome {
  bool processed = false;
  bool degenerate = false;
  bool telescopes = true;
  std::size_t empty_segments = 0;
  // Ray cells with their free-score change in units of the score step.
  std::vector<std::pair<CellIndex, int>> steps;
  std::vector<CellBelief> beliefs;
  std::vector<CellIndex> cleared;
};

RayOutcome process_ray(CellIndex router, CellIndex target, int sample_k,
                       const TrajectoryRaster& raster, WallModel mode,
                       bool with_beliefs) {
  RayOutcome out;
  if (target == router) return out;
  out.processed = true;
  const auto ray = trace_ray(router, target);
  out.steps.reserve(ray.size());
  for (const CellIndex c : ray) out.steps.emplace_back(c, 0);

  if (sample_k == 0) {
    for (auto& s : out.steps) s.second = 1;
    if (with_beliefs) out.cleared.assign(ray.begin(), ray.end());
    return out;
  }

  const auto crossings = find_crossings(ray, raster);
  const auto segments = segment_ray(ray, crossings, sample_k);
  int telescoped = 0;
  for (const auto& seg : segments) telescoped += seg.delta_k();
  out.telescopes = telescoped == sample_k;

  for (const auto& seg : segments) {
    const int step = seg.walls() == 0 ? 1 : -1;
    for (std::size_t p = seg.begin + 1; p < seg.end; ++p) out.steps[p].second = step;
  }
  if (!with_beliefs) return out;

  // A segment whose ends agree on k crosses no wall, whatever else is wrong
  // with the ray.
  for (const auto& seg : segments) {
    if (seg.delta_k() != 0) continue;
    for (std::size_t p = seg.begin + 1; p < seg.end; ++p) out.cleared.push_back(ray[p]);
  }

  try {
    update_endpoints(ray, crossings);
  } catch (const Error&) {
    out.degenerate = true;
    return out;
  }
  // k cannot drop along a ray from the router; a drop means a crossing label
  // came from the far side of a shadow edge, so no wall mass from this ray is
  // trustworthy.
  for (const auto& seg : segments) {
    if (seg.delta_k() < 0) {
      out.degenerate = true;
      return out;
    }
  }
  for (const auto& seg : segments) {
    if (seg.walls() == 0) continue;
    if (seg.intermediate_count() == 0) ++out.empty_segments;
    auto cells = assign_wall_probability(ray, seg, mode);
    out.beliefs.insert(out.beliefs.end(), cells.begin(), cells.end());
  }
  return out;
}

std::vector<std::size_t> resolve_order(const SparseParams& params,
                                       std::size_t n) {
  std::vector<std::size_t> order = params.processing_order;
  if (order.empty()) {
    order.resize(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    return order;
  }
  std::vector<bool> hit(n, false);
  if (order.size() != n) {
    throw Error(ErrorCode::kInvalidArgument,
                "processing order is not a permutation of the samples");
  }
  for (const std::size_t i : order) {
    if (i >= n || hit[i]) {
      throw Error(ErrorCode::kInvalidArgument,
                  "processing order is not a permutation of the samples");
    }
    hit[i] = true;
  }
  return order;
}

struct Prepared {
  CellIndex router;
  TrajectoryRaster raster;
  std::vector<std::size_t> order;
};

Prepared prepare(std::span<const TrajectorySample> samples, WorldPoint router,
                 const GridGeometry& geometry, const SparseParams& params) {
  geometry.validate();
  if (samples.empty()) {
    throw Error(ErrorCode::kEmptyTrajectory, "trajectory has no samples");
  }
  CellIndex router_cell;
  try {
    router_cell = world_to_cell(geometry, router);
  } catch (const Error&) {
    throw Error(ErrorCode::kRouterOutOfBounds,
                fmt::format("router ({}, {}) outside map", router.x, router.y));
  }
  if (params.score_step <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "score step must be positive");
  }
  return {router_cell, TrajectoryRaster(geometry, samples),
          resolve_order(params, samples.size())};
}

std::vector<RayOutcome> run_rays(std::span<const TrajectorySample> samples,
                                 const Prepared& prep,
                                 const SparseParams& params,
                                 bool with_beliefs) {
  const std::size_t n = prep.order.size();
  std::vector<RayOutcome> outcomes(n);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const std::size_t i = prep.order[p];
      outcomes[p] = process_ray(prep.router, prep.raster.sample_cells()[i],
                                samples[i].k, prep.raster, params.mode,
                                with_beliefs);
    }
  };
  const std::size_t workers =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(params.threads, 1)),
                              1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    work(0, n);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back(work, n * w / workers, n * (w + 1) / workers);
    }
    for (auto& t : pool) t.join();
  }
  return outcomes;
}

FreeSpaceAccumulator accumulate_free(std::span<const TrajectorySample> samples,
                                     const Prepared& prep,
                                     const std::vector<RayOutcome>& outcomes,
                                     int score_step) {
  FreeSpaceAccumulator acc(prep.raster.geometry());
  for (const auto& o : outcomes) {
    for (const auto& [cell, step] : o.steps) {
      acc.add(cell, static_cast<std::int64_t>(step) * score_step);
    }
  }
  for (const CellIndex c : prep.raster.cells()) acc.pin_free(c);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].collision) acc.pin_occupied(prep.raster.sample_cells()[i]);
  }
  return acc;
}

}  // namespace

FreeSpaceAccumulator mark_free_space(std::span<const TrajectorySample> samples,
                                     WorldPoint router,
                                     const GridGeometry& geometry,
                                     const SparseParams& params) {
  const auto prep = prepare(samples, router, geometry, params);
  const auto outcomes = run_rays(samples, prep, params, false);
  return accumulate_free(samples, prep, outcomes, params.score_step);
}

SparseResult build_sparse_map(std::span<const TrajectorySample> samples,
                              WorldPoint router, const GridGeometry& geometry,
                              const SparseParams& params) {
  const auto prep = prepare(samples, router, geometry, params);
  const auto outcomes = run_rays(samples, prep, params, true);

  SparseResult result;
  result.free_space = accumulate_free(samples, prep, outcomes, params.score_step);
  result.beliefs = WallBeliefGrid(geometry);
  auto& stats = result.stats;
  // Fusion is applied serially in processing order, one cell at a time.
  for (const auto& o : outcomes) {
    if (!o.processed) {
      ++stats.skipped_rays;
      continue;
    }
    ++stats.rays;
    if (o.degenerate) ++stats.degenerate_rays;
    if (!o.telescopes) ++stats.telescoping_violations;
    stats.empty_segments += o.empty_segments;
    for (const auto& b : o.beliefs) result.beliefs.fuse_beliefs(b.cell, b.mu, b.sigma);
    for (const CellIndex c : o.cleared) result.beliefs.clear(c);
  }
  // The trajectory itself is free space and can hold no wall.
  for (const CellIndex c : prep.raster.cells()) result.beliefs.clear(c);
  if (stats.degenerate_rays > 0) {
    spdlog::info("{} rays had inconsistent crossings and contributed no wall "
                 "belief",
                 stats.degenerate_rays);
  }

  const double cutoff = params.wall_threshold * result.beliefs.max_belief();
  result.occupancy = GridMap(geometry, kUnknownValue);
  for (std::size_t i = 0; i < geometry.cell_count(); ++i) {
    const CellIndex c = geometry.cell_at(i);
    CellState state = CellState::kUnknown;
    const double mu = result.beliefs.belief(c);
    if (mu > 0.0 && mu >= cutoff) {
      state = CellState::kOccupied;
    } else if (result.free_space.score(c) >= params.free_threshold) {
      state = CellState::kFree;
    }
    if (result.free_space.is_trajectory(c)) state = CellState::kFree;
    if (result.free_space.is_collision(c)) state = CellState::kOccupied;
    result.occupancy.set_state(c, state);
  }
  return result;
}

}  // namespace sfw
