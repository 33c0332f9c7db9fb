#pragma once
// Minimal CSV emission with fixed formatting (12 significant digits), so
// identical runs serialize to identical bytes.

#include <cstdint>
#include <string>
#include <vector>

namespace cavtel::csv {

// %.12g rendering used for every floating-point field.
std::string format_number(double v);

class Writer {
 public:
  explicit Writer(std::vector<std::string> header);

  Writer& comment(const std::string& text);  // "# ..." line
  Writer& begin_row();
  Writer& col(double v);
  Writer& col(std::uint64_t v);
  Writer& col(int v);
  Writer& col(const std::string& v);
  Writer& end_row();  // validates the column count

  const std::string& str() const { return out_; }
  void write_file(const std::string& path) const;

 private:
  std::size_t n_cols_ = 0;
  std::size_t in_row_ = 0;
  bool row_open_ = false;
  std::string out_;
};

}  // namespace cavtel::csv
