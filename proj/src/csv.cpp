#include "gbspec/csv.hpp"

#include <cstdio>

namespace gbspec {

std::string fmt_f17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_i(long long v) { return std::to_string(v); }

CsvWriter::CsvWriter(const std::string& path, const std::string& schema,
                     const std::vector<std::string>& columns,
                     const std::vector<std::string>& provenance)
    : out_(path), ncols_(columns.size()) {
  if (!out_) throw IoError("cannot open output file: " + path);
  out_ << "# schema=" << schema << "\n";
  for (const auto& line : provenance) out_ << "# " << line << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i)
    out_ << columns[i] << (i + 1 < columns.size() ? "," : "");
  out_ << "\n";
}

CsvWriter::~CsvWriter() {
  if (!finalized_ && out_.is_open()) {
    out_ << "INCOMPLETE\n";
    out_.flush();
  }
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != ncols_)
    throw IoError("CSV row width mismatch: got " + std::to_string(cells.size()) +
                  ", expected " + std::to_string(ncols_));
  for (std::size_t i = 0; i < cells.size(); ++i)
    out_ << cells[i] << (i + 1 < cells.size() ? "," : "");
  out_ << "\n";
  if (!out_) throw IoError("CSV write failed");
}

void CsvWriter::finalize() {
  out_.flush();
  if (!out_) throw IoError("CSV flush failed");
  finalized_ = true;
}

std::vector<std::string> read_csv_body(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    lines.push_back(line);
  }
  return lines;
}

}  // namespace gbspec
