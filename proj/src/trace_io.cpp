#include "sfw/trace_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "sfw/error.hpp"
#include "sfw/keyvalue.hpp"

namespace sfw {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    if (!field.empty() && field.back() == '\r') field.pop_back();
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

int parse_int_field(const std::string& text, int line_no) {
  const double v = parse_double(text);
  if (v != static_cast<double>(static_cast<int>(v))) {
    throw Error(ErrorCode::kMalformedFile,
                fmt::format("line {}: '{}' is not an integer", line_no, text));
  }
  return static_cast<int>(v);
}

}  // namespace

std::vector<TraceRecord> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::kMalformedFile, "trace CSV is empty");
  }
  const auto header = split_csv_line(line);
  int col_t = -1, col_x = -1, col_y = -1, col_rssi = -1, col_filtered = -1,
      col_k = -1, col_k_true = -1, col_collision = -1;
  for (int i = 0; i < static_cast<int>(header.size()); ++i) {
    const std::string& h = header[static_cast<std::size_t>(i)];
    if (h == "t") col_t = i;
    else if (h == "x") col_x = i;
    else if (h == "y") col_y = i;
    else if (h == "rssi") col_rssi = i;
    else if (h == "rssi_filtered") col_filtered = i;
    else if (h == "k") col_k = i;
    else if (h == "k_true") col_k_true = i;
    else if (h == "collision") col_collision = i;
  }
  if (col_t < 0 || col_x < 0 || col_y < 0) {
    throw Error(ErrorCode::kMalformedFile, "trace CSV needs t,x,y columns");
  }

  std::vector<TraceRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (f.size() != header.size()) {
      throw Error(ErrorCode::kMalformedFile,
                  fmt::format("line {}: expected {} fields, got {}", line_no,
                              header.size(), f.size()));
    }
    auto at = [&](int col) { return f[static_cast<std::size_t>(col)]; };
    TraceRecord r;
    r.t = parse_double(at(col_t));
    r.position = {parse_double(at(col_x)), parse_double(at(col_y))};
    if (col_rssi >= 0) r.rssi = parse_double(at(col_rssi));
    if (col_filtered >= 0) r.rssi_filtered = parse_double(at(col_filtered));
    if (col_k >= 0) r.k = parse_int_field(at(col_k), line_no);
    if (col_k_true >= 0) r.k_true = parse_int_field(at(col_k_true), line_no);
    if (col_collision >= 0) r.collision = parse_int_field(at(col_collision), line_no) != 0;
    records.push_back(r);
  }
  return records;
}

std::vector<TraceRecord> load_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIoFailure,
                fmt::format("cannot open {}", path.string()));
  }
  return read_trace_csv(in);
}

void write_trace_csv(const std::vector<TraceRecord>& records,
                     std::ostream& out) {
  const TraceRecord first = records.empty() ? TraceRecord{} : records.front();
  const bool has_rssi = first.rssi.has_value();
  const bool has_filtered = first.rssi_filtered.has_value();
  const bool has_k = first.k.has_value();
  const bool has_k_true = first.k_true.has_value();
  const bool has_collision =
      std::any_of(records.begin(), records.end(),
                  [](const TraceRecord& r) { return r.collision; });

  out << "t,x,y";
  if (has_rssi) out << ",rssi";
  if (has_filtered) out << ",rssi_filtered";
  if (has_k) out << ",k";
  if (has_k_true) out << ",k_true";
  if (has_collision) out << ",collision";
  out << '\n';
  for (const auto& r : records) {
    if (r.rssi.has_value() != has_rssi ||
        r.rssi_filtered.has_value() != has_filtered ||
        r.k.has_value() != has_k || r.k_true.has_value() != has_k_true) {
      throw Error(ErrorCode::kInvalidArgument,
                  "trace records disagree on their columns");
    }
    out << format_double(r.t) << ',' << format_double(r.position.x) << ','
        << format_double(r.position.y);
    if (has_rssi) out << ',' << format_double(*r.rssi);
    if (has_filtered) out << ',' << format_double(*r.rssi_filtered);
    if (has_k) out << ',' << *r.k;
    if (has_k_true) out << ',' << *r.k_true;
    if (has_collision) out << ',' << (r.collision ? 1 : 0);
    out << '\n';
  }
}

void save_trace_csv(const std::vector<TraceRecord>& records,
                    const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::kIoFailure,
                fmt::format("cannot write {}", path.string()));
  }
  write_trace_csv(records, out);
}

}  // namespace sfw
