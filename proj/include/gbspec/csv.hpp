#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "gbspec/errors.hpp"

namespace gbspec {

// Lossless round-trip float formatting (17 significant digits).
std::string fmt_f17(double v);
std::string fmt_i(long long v);

// Streaming CSV writer.  Provenance lines are '#' comments ahead of the
// header row; the body (header + rows) is byte-deterministic for equal
// inputs.  If the writer is destroyed before finalize() — an error or an
// interrupt unwound the stack — a trailing INCOMPLETE marker is appended.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& schema,
            const std::vector<std::string>& columns,
            const std::vector<std::string>& provenance = {});
  ~CsvWriter();

  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(const std::vector<std::string>& cells);
  void finalize();

 private:
  std::ofstream out_;
  std::size_t ncols_;
  bool finalized_ = false;
};

// Reads back a CSV body (non-comment lines) for comparisons.
std::vector<std::string> read_csv_body(const std::string& path);

}  // namespace gbspec
