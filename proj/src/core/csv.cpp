#include "core/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "core/error.hpp"

namespace gfd {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

Csv::Csv(std::vector<std::string> header) : columns_(header.size()) {
  for (const auto& h : header) cell(h);
  end_row();
  rows_ = 0;
}

void Csv::sep() {
  if (col_ == columns_) fail(Errc::structural, "too many CSV cells in row");
  if (col_++) text_ += ',';
}

Csv& Csv::cell(double v) {
  sep();
  text_ += format_real(v);
  return *this;
}

Csv& Csv::cell(std::int64_t v) {
  sep();
  text_ += std::to_string(v);
  return *this;
}

Csv& Csv::cell(std::uint64_t v) {
  sep();
  text_ += std::to_string(v);
  return *this;
}

Csv& Csv::cell(const std::string& v) {
  sep();
  if (v.find_first_of(",\"\n") == std::string::npos) {
    text_ += v;
  } else {
    text_ += '"';
    for (char c : v) {
      if (c == '"') text_ += '"';
      text_ += c;
    }
    text_ += '"';
  }
  return *this;
}

void Csv::end_row() {
  if (col_ != columns_) fail(Errc::structural, "short CSV row");
  text_ += '\n';
  col_ = 0;
  ++rows_;
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(Errc::io, "cannot open for writing: " + path);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) fail(Errc::io, "write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(Errc::io, "cannot open for reading: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace gfd
