#ifndef SFW_EVAL_HPP_
#define SFW_EVAL_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "sfw/grid.hpp"
#include "sfw/keyvalue.hpp"

namespace sfw {

struct EvalReport {
  double free_iou = 0.0;
  double wall_precision = 1.0;
  double wall_recall = 1.0;
  double explored_fraction = 0.0;
  int tolerance = 1;
  // False when the result predicts no wall; precision is then reported as 1.
  bool precision_defined = false;
  // False when the truth has no wall; recall is then reported as 1.
  bool recall_defined = false;
  std::size_t predicted_walls = 0;
  std::size_t true_walls = 0;
  // Cell counts of the result over the whole grid.
  std::size_t unknown_cells = 0;
  std::size_t free_cells = 0;
  std::size_t occupied_cells = 0;
};

// Compares a reconstructed map against ground truth.
//  free_iou          |Free_r & Free_t| / |Free_r | Free_t|  (1 if both empty)
//  wall_precision    predicted walls with a true wall within Chebyshev
//                    distance <= tolerance
//  wall_recall       true walls with a predicted wall within tolerance
//  explored_fraction true free cells the result marks Free
// A non-empty `region` mask (one byte per cell) restricts the ratios to the
// cells where it is non-zero; the state counts always cover the whole grid.
// Throws kDimensionMismatch.
EvalReport evaluate(const GridMap& result, const GridMap& truth, int tolerance,
                    std::span<const std::uint8_t> region = {});

KeyValueFile report_to_kv(const EvalReport& report);
std::string report_to_json(const EvalReport& report);

}  // namespace sfw

#endif  // SFW_EVAL_HPP_
