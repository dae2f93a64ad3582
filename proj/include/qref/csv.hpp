#ifndef QREF_CSV_HPP
#define QREF_CSV_HPP

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "qref/errors.hpp"

namespace qref {

// Quote per RFC 4180: fields containing commas, quotes, or line breaks are
// wrapped in double quotes with embedded quotes doubled.
inline std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// 17 significant digits round-trip doubles exactly and keep outputs byte-stable.
inline std::string csv_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw ConfigError("cannot open '" + path + "' for writing");
    row(header);
  }

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << csv_quote(fields[i]);
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

}  // namespace qref

#endif
