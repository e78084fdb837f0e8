#pragma once

// Line-oriented "KEY: value [value ...] [unit]" documents shared by the RPC
// sidecar, camera, warp, report and manifest formats.

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace satpin {

class KvDocument {
 public:
  static KvDocument parse(std::string_view text);

  bool contains(const std::string& key) const;
  const std::vector<std::string>& tokens(const std::string& key) const;

  // Single numeric value; trailing unit words ("pixels", "degrees", "meters")
  // are ignored.
  double number(const std::string& key) const;
  std::vector<double> numbers(const std::string& key, std::size_t count) const;
  std::string text(const std::string& key) const;

 private:
  std::map<std::string, std::vector<std::string>> entries_;
};

// %.17g: enough digits to reproduce any double exactly.
std::string format_double(double value);

double parse_double(std::string_view token, const std::string& key);

class KvWriter {
 public:
  KvWriter& add(const std::string& key, double value);
  KvWriter& add(const std::string& key, const std::vector<double>& values);
  KvWriter& add_text(const std::string& key, const std::string& value);
  KvWriter& add_int(const std::string& key, long long value);

  const std::string& str() const { return out_; }

 private:
  std::string out_;
};

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace satpin
