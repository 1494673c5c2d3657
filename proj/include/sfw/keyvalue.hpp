#ifndef SFW_KEYVALUE_HPP_
#define SFW_KEYVALUE_HPP_

#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace sfw {

// Plain "key=value" text, one pair per line. Blank lines and lines starting
// with '#' are skipped. Keys are kept sorted so written files are stable.
class KeyValueFile {
 public:
  static KeyValueFile parse(std::istream& in);
  static KeyValueFile load(const std::filesystem::path& path);

  void write(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;

  void set(const std::string& key, std::string value) {
    entries_[key] = std::move(value);
  }
  void set(const std::string& key, double value);
  void set(const std::string& key, int value);
  void set(const std::string& key, const std::vector<double>& values);

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);
double parse_double(const std::string& text);

}  // namespace sfw

#endif  // SFW_KEYVALUE_HPP_
