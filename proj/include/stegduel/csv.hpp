#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "stegduel/errors.hpp"

namespace stegduel {

/// Shortest round-trippable decimal form; "inf"/"nan" for non-finite values.
/// Fixed formatting keeps reruns byte-identical.
inline std::string csv_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Minimal RFC-4180 subset writer: comma-separated, one header row, LF line
/// endings. Fields here never contain commas or quotes.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header)
      : out_(path, std::ios::binary | std::ios::trunc), path_(path) {
    if (!out_) throw IoError(path + ": cannot open for writing");
    row(header);
  }

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << fields[i];
    }
    out_ << '\n';
    if (!out_) throw IoError(path_ + ": write failed");
  }

 private:
  std::ofstream out_;
  std::string path_;
};

}  // namespace stegduel
