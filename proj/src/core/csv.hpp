#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gfd {

// 17 significant digits, shortest exponent form.
std::string format_real(double v);

class Csv {
 public:
  explicit Csv(std::vector<std::string> header);
  Csv& cell(double v);
  Csv& cell(std::int64_t v);
  Csv& cell(std::uint64_t v);
  Csv& cell(int v) { return cell(static_cast<std::int64_t>(v)); }
  Csv& cell(bool v) { return cell(static_cast<std::int64_t>(v)); }
  Csv& cell(const std::string& v);
  void end_row();
  const std::string& text() const { return text_; }
  std::size_t rows() const { return rows_; }

 private:
  void sep();
  std::string text_;
  std::size_t columns_;
  std::size_t col_ = 0;
  std::size_t rows_ = 0;
};

// Writes bytes verbatim; io error naming the path on failure.
void write_file(const std::string& path, const std::string& bytes);
std::string read_file(const std::string& path);

}  // namespace gfd
