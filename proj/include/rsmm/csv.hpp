#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rsmm {

// shortest round-trip decimal, locale independent
std::string format_double(double x);

class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& cells);

 private:
  std::ostream& os_;
  std::size_t width_;
};

}  // namespace rsmm
