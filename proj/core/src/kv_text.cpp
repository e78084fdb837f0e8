#include "satpin/kv_text.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "satpin/error.hpp"

namespace satpin {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool is_unit_word(std::string_view token) {
  return token == "pixels" || token == "pixel" || token == "degrees" ||
         token == "degree" || token == "meters" || token == "meter";
}

}  // namespace

KvDocument KvDocument::parse(std::string_view text) {
  KvDocument doc;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      fail(ErrorKind::kParse, "line " + std::to_string(line_no) + ": expected 'KEY: value'");
    }
    std::string key(trim(line.substr(0, colon)));
    std::vector<std::string> tokens;
    std::istringstream rest{std::string(line.substr(colon + 1))};
    for (std::string tok; rest >> tok;) tokens.push_back(tok);
    doc.entries_[std::move(key)] = std::move(tokens);
  }
  return doc;
}

bool KvDocument::contains(const std::string& key) const { return entries_.count(key) != 0; }

const std::vector<std::string>& KvDocument::tokens(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) fail(ErrorKind::kParse, "missing key " + key);
  return it->second;
}

double KvDocument::number(const std::string& key) const {
  const auto values = numbers(key, 1);
  return values.front();
}

std::vector<double> KvDocument::numbers(const std::string& key, std::size_t count) const {
  const auto& toks = tokens(key);
  std::vector<double> values;
  for (const auto& tok : toks) {
    if (is_unit_word(tok)) break;
    values.push_back(parse_double(tok, key));
  }
  if (values.size() != count) {
    fail(ErrorKind::kParse, "key " + key + ": expected " + std::to_string(count) +
                                " value(s), got " + std::to_string(values.size()));
  }
  return values;
}

std::string KvDocument::text(const std::string& key) const {
  const auto& toks = tokens(key);
  std::string joined;
  for (const auto& tok : toks) {
    if (!joined.empty()) joined += ' ';
    joined += tok;
  }
  return joined;
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

double parse_double(std::string_view token, const std::string& key) {
  const std::string s(token);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
    fail(ErrorKind::kParse, "key " + key + ": non-numeric value '" + s + "'");
  }
  return v;
}

KvWriter& KvWriter::add(const std::string& key, double value) {
  out_ += key + ": " + format_double(value) + "\n";
  return *this;
}

KvWriter& KvWriter::add(const std::string& key, const std::vector<double>& values) {
  out_ += key + ":";
  for (double v : values) out_ += " " + format_double(v);
  out_ += "\n";
  return *this;
}

KvWriter& KvWriter::add_text(const std::string& key, const std::string& value) {
  out_ += key + ": " + value + "\n";
  return *this;
}

KvWriter& KvWriter::add_int(const std::string& key, long long value) {
  out_ += key + ": " + std::to_string(value) + "\n";
  return *this;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) fail(ErrorKind::kIo, "write failed for " + path.string());
}

}  // namespace satpin
