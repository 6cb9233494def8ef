#include "otto/csv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <utility>

namespace otto {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

CsvFile::CsvFile(std::string path) : path_(std::move(path)) {}

CsvFile::~CsvFile() {
  try {
    close();
  } catch (...) {
  }
}

void CsvFile::line(const std::string& s) {
  buf_ += s;
  buf_ += '\n';
}

void CsvFile::row(const std::vector<double>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) s += ',';
    s += fmt17(values[i]);
  }
  line(s);
}

void CsvFile::close() {
  if (closed_) return;
  closed_ = true;
  namespace fs = std::filesystem;
  fs::path target(path_);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << buf_;
  }
  fs::rename(tmp, target);
}

}  // namespace otto
