#ifndef SFW_TRACE_IO_HPP_
#define SFW_TRACE_IO_HPP_

#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <vector>

#include "sfw/grid.hpp"

namespace sfw {

// One row of a trajectory trace. Columns are named in the CSV header:
//   t,x,y            always present (s, m, m)
//   rssi             raw measurement (dBm)
//   rssi_filtered    smoothed measurement (dBm)
//   k                wall count used for mapping
//   k_true           simulator ground truth
//   collision        0/1 contact-sensor flag
struct TraceRecord {
  double t = 0.0;
  WorldPoint position;
  std::optional<double> rssi;
  std::optional<double> rssi_filtered;
  std::optional<int> k;
  std::optional<int> k_true;
  bool collision = false;
};

// Throws kMalformedFile on a missing required column or bad number.
std::vector<TraceRecord> read_trace_csv(std::istream& in);
std::vector<TraceRecord> load_trace_csv(const std::filesystem::path& path);

// Writes every optional column that is set on the first record; all records
// must agree.
void write_trace_csv(const std::vector<TraceRecord>& records, std::ostream& out);
void save_trace_csv(const std::vector<TraceRecord>& records,
                    const std::filesystem::path& path);

}  // namespace sfw

#endif  // SFW_TRACE_IO_HPP_
