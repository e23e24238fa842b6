#pragma once

#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace eislab {

// Shortest-safe round-trip text: 17 significant digits.
std::string format_double(double x);

// Comma-separated writer with a header row. Fields containing commas or
// quotes are quoted.
class CsvWriter {
 public:
  using Field = std::variant<std::string, double, long long, std::size_t, int>;

  CsvWriter(std::ostream& os, const std::vector<std::string>& header);
  void row(std::initializer_list<Field> fields);
  void row(const std::vector<Field>& fields);

 private:
  std::ostream& os_;
  std::size_t columns_;
};

}  // namespace eislab
