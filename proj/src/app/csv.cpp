#include "eislab/app/csv.hpp"

#include <cmath>
#include <cstdio>

#include "eislab/core/error.hpp"

namespace eislab {
namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& os, const std::vector<std::string>& header) : os_(os), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << quote(header[i]);
  os_ << '\n';
}

void CsvWriter::row(std::initializer_list<Field> fields) { row(std::vector<Field>(fields)); }

void CsvWriter::row(const std::vector<Field>& fields) {
  if (fields.size() != columns_) throw DimensionError("CSV row width does not match the header");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os_ << ',';
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, std::string>) {
            os_ << quote(v);
          } else if constexpr (std::is_same_v<T, double>) {
            os_ << format_double(v);
          } else {
            os_ << v;
          }
        },
        fields[i]);
  }
  os_ << '\n';
}

}  // namespace eislab
