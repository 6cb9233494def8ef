#pragma once

#include <string>
#include <vector>

namespace otto {

// 17 significant digits, '.' decimal separator; round-trips doubles exactly.
std::string fmt17(double v);

// Buffers rows in memory and writes the whole file atomically (tmp + rename).
class CsvFile {
 public:
  explicit CsvFile(std::string path);
  CsvFile(const CsvFile&) = delete;
  CsvFile& operator=(const CsvFile&) = delete;
  ~CsvFile();

  void line(const std::string& s);
  void row(const std::vector<double>& values);
  void close();

 private:
  std::string path_;
  std::string buf_;
  bool closed_ = false;
};

}  // namespace otto
