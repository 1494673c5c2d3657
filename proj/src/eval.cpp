#include "sfw/eval.hpp"

#include <algorithm>

#include <fmt/format.h>
#include "json.hpp"

#include "sfw/error.hpp"

namespace sfw {
namespace {

// True if any cell of `map` within Chebyshev distance `radius` of c is
// Occupied.
bool wall_within(const GridMap& map, CellIndex c, int radius) {
  const int r0 = std::max(0, c.row - radius);
  const int r1 = std::min(map.height() - 1, c.row + radius);
  const int c0 = std::max(0, c.col - radius);
  const int c1 = std::min(map.width() - 1, c.col + radius);
  for (int row = r0; row <= r1; ++row) {
    for (int col = c0; col <= c1; ++col) {
      if (map.is_occupied({col, row})) return true;
    }
  }
  return false;
}

double ratio(std::size_t num, std::size_t den, double if_empty) {
  return den == 0 ? if_empty : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

EvalReport evaluate(const GridMap& result, const GridMap& truth, int tolerance,
                    std::span<const std::uint8_t> region) {
  if (result.width() != truth.width() || result.height() != truth.height()) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("result {}x{} vs truth {}x{}", result.width(),
                            result.height(), truth.width(), truth.height()));
  }
  const auto& g = result.geometry();
  if (!region.empty() && region.size() != g.cell_count()) {
    throw Error(ErrorCode::kDimensionMismatch, "region mask size mismatch");
  }
  if (tolerance < 0) {
    throw Error(ErrorCode::kInvalidArgument, "tolerance must be >= 0");
  }

  EvalReport rep;
  rep.tolerance = tolerance;
  std::size_t free_inter = 0, free_union = 0, truth_free = 0;
  std::size_t tp_pred = 0, tp_truth = 0;
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    const CellIndex c = g.cell_at(i);
    const CellState r = result.state(c);
    switch (r) {
      case CellState::kUnknown: ++rep.unknown_cells; break;
      case CellState::kFree: ++rep.free_cells; break;
      case CellState::kOccupied: ++rep.occupied_cells; break;
    }
    if (!region.empty() && region[i] == 0) continue;
    const CellState t = truth.state(c);
    const bool rf = r == CellState::kFree;
    const bool tf = t == CellState::kFree;
    if (rf && tf) ++free_inter;
    if (rf || tf) ++free_union;
    if (tf) ++truth_free;
    if (r == CellState::kOccupied) {
      ++rep.predicted_walls;
      if (wall_within(truth, c, tolerance)) ++tp_pred;
    }
    if (t == CellState::kOccupied) {
      ++rep.true_walls;
      if (wall_within(result, c, tolerance)) ++tp_truth;
    }
  }
  rep.free_iou = ratio(free_inter, free_union, 1.0);
  rep.explored_fraction = ratio(free_inter, truth_free, 1.0);
  rep.precision_defined = rep.predicted_walls > 0;
  rep.recall_defined = rep.true_walls > 0;
  rep.wall_precision = ratio(tp_pred, rep.predicted_walls, 1.0);
  rep.wall_recall = ratio(tp_truth, rep.true_walls, 1.0);
  return rep;
}

KeyValueFile report_to_kv(const EvalReport& r) {
  KeyValueFile kv;
  kv.set("free_iou", r.free_iou);
  kv.set("wall_precision", r.wall_precision);
  kv.set("wall_recall", r.wall_recall);
  kv.set("explored_fraction", r.explored_fraction);
  kv.set("tolerance", r.tolerance);
  kv.set("precision_defined", r.precision_defined ? 1 : 0);
  kv.set("recall_defined", r.recall_defined ? 1 : 0);
  kv.set("predicted_walls", static_cast<int>(r.predicted_walls));
  kv.set("true_walls", static_cast<int>(r.true_walls));
  kv.set("unknown_cells", static_cast<int>(r.unknown_cells));
  kv.set("free_cells", static_cast<int>(r.free_cells));
  kv.set("occupied_cells", static_cast<int>(r.occupied_cells));
  return kv;
}

std::string report_to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["free_iou"] = r.free_iou;
  j["wall_precision"] = r.wall_precision;
  j["wall_recall"] = r.wall_recall;
  j["explored_fraction"] = r.explored_fraction;
  j["tolerance"] = r.tolerance;
  j["precision_defined"] = r.precision_defined;
  j["recall_defined"] = r.recall_defined;
  j["predicted_walls"] = r.predicted_walls;
  j["true_walls"] = r.true_walls;
  j["counts"] = {{"unknown", r.unknown_cells},
                 {"free", r.free_cells},
                 {"occupied", r.occupied_cells}};
  return j.dump(2);
}

}  // namespace sfw
