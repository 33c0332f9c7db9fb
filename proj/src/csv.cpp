#include "cavtel/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace cavtel::csv {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

Writer::Writer(std::vector<std::string> header) : n_cols_(header.size()) {
  if (header.empty()) throw std::invalid_argument("empty CSV header");
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out_ += ',';
    out_ += header[i];
  }
  out_ += '\n';
}

Writer& Writer::comment(const std::string& text) {
  if (row_open_) throw std::logic_error("comment inside an open row");
  out_ += "# ";
  out_ += text;
  out_ += '\n';
  return *this;
}

Writer& Writer::begin_row() {
  if (row_open_) throw std::logic_error("row already open");
  row_open_ = true;
  in_row_ = 0;
  return *this;
}

Writer& Writer::col(double v) { return col(format_number(v)); }

Writer& Writer::col(std::uint64_t v) { return col(std::to_string(v)); }

Writer& Writer::col(int v) { return col(std::to_string(v)); }

Writer& Writer::col(const std::string& v) {
  if (!row_open_) throw std::logic_error("column outside a row");
  if (in_row_) out_ += ',';
  out_ += v;
  ++in_row_;
  return *this;
}

Writer& Writer::end_row() {
  if (!row_open_) throw std::logic_error("no open row");
  if (in_row_ != n_cols_)
    throw std::logic_error("row has " + std::to_string(in_row_) +
                           " columns, header has " + std::to_string(n_cols_));
  out_ += '\n';
  row_open_ = false;
  return *this;
}

void Writer::write_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << out_;
  if (!out) throw std::runtime_error("failed writing output file: " + path);
}

}  // namespace cavtel::csv
