#pragma once

#include "stepverify/errors.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <string>

namespace stepverify {

// ordered_json keeps field order stable so identical runs serialize to
// identical bytes.
using Json = nlohmann::ordered_json;

// Streams a line-delimited JSON file. Blank lines are skipped but still
// counted, so error line numbers match the file.
inline void for_each_jsonl(const std::filesystem::path& path,
                           const std::function<void(std::size_t, const Json&)>& fn) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open file");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    Json record = Json::parse(line, nullptr, false);
    if (record.is_discarded()) throw MalformedRecord(path.string(), line_no, "invalid JSON");
    fn(line_no, record);
  }
}

class JsonlWriter {
 public:
  explicit JsonlWriter(const std::filesystem::path& path) : path_(path.string()), out_(path) {
    if (!out_) throw IoError(path_, "cannot open file for writing");
  }

  void write(const Json& record) { out_ << record.dump() << '\n'; }

  void close() {
    out_.close();
    if (out_.fail()) throw IoError(path_, "write failed");
  }

 private:
  std::string path_;
  std::ofstream out_;
};

inline void write_json_file(const std::filesystem::path& path, const Json& value) {
  std::ofstream out(path);
  if (!out) throw IoError(path.string(), "cannot open file for writing");
  out << value.dump(2) << '\n';
}

inline Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), "cannot open file");
  Json value = Json::parse(in, nullptr, false);
  if (value.is_discarded()) throw MalformedRecord(path.string(), 1, "invalid JSON");
  return value;
}

}  // namespace stepverify
