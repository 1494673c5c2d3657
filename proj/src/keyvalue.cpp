#include "sfw/keyvalue.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "sfw/error.hpp"

namespace sfw {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string format_double(double value) { return fmt::format("{}", value); }

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  double value = 0.0;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  if (!t.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || t.empty()) {
    throw Error(ErrorCode::kMalformedFile,
                fmt::format("not a number: '{}'", text));
  }
  return value;
}

KeyValueFile KeyValueFile::parse(std::istream& in) {
  KeyValueFile kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorCode::kMalformedFile,
                  fmt::format("line {}: expected key=value", line_no));
    }
    kv.entries_[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return kv;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIoFailure,
                fmt::format("cannot open {}", path.string()));
  }
  return parse(in);
}

void KeyValueFile::write(std::ostream& out) const {
  for (const auto& [key, value] : entries_) out << key << '=' << value << '\n';
}

void KeyValueFile::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::kIoFailure,
                fmt::format("cannot write {}", path.string()));
  }
  write(out);
}

const std::string& KeyValueFile::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw Error(ErrorCode::kMalformedFile, fmt::format("missing key '{}'", key));
  }
  return it->second;
}

double KeyValueFile::get_double(const std::string& key) const {
  return parse_double(get(key));
}

int KeyValueFile::get_int(const std::string& key) const {
  const std::string& text = get(key);
  int value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kMalformedFile,
                fmt::format("key '{}': not an integer", key));
  }
  return value;
}

std::vector<double> KeyValueFile::get_doubles(const std::string& key) const {
  std::vector<double> values;
  std::stringstream ss(get(key));
  std::string item;
  while (std::getline(ss, item, ',')) values.push_back(parse_double(item));
  return values;
}

void KeyValueFile::set(const std::string& key, double value) {
  entries_[key] = format_double(value);
}

void KeyValueFile::set(const std::string& key, int value) {
  entries_[key] = std::to_string(value);
}

void KeyValueFile::set(const std::string& key,
                       const std::vector<double>& values) {
  std::string joined;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) joined += ',';
    joined += format_double(values[i]);
  }
  entries_[key] = joined;
}

}  // namespace sfw
