#pragma once

#include <string>
#include <vector>

#include "bridgelab/common.hpp"

namespace bridgelab {

// Deterministic float formatting shared by every CSV we emit: %.12g, so a
// rerun with identical inputs is byte-identical.
std::string format_double(double v);

// UTF-8, comma-separated, one '#'-prefixed metadata line, then a header row.
// No timestamps or other run-varying content goes into the file.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& metadata,
            const std::vector<std::string>& header);
  ~CsvWriter();

  void row(const std::vector<double>& values);
  void row_text(const std::vector<std::string>& cells);
  void close();

 private:
  std::string path_;
  std::string buffer_;
  std::size_t columns_ = 0;
  bool closed_ = false;
};

}  // namespace bridgelab
