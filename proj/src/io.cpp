#include "sasd/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "sasd/errors.hpp"

namespace sasd {

namespace {

std::string slurp(const std::filesystem::path& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spill(const std::filesystem::path& path, const std::string& data, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << data;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string_view trim(std::string_view s) {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

double parse_value(std::string_view field, std::size_t line) {
  field = trim(field);
  if (field.empty()) throw InputError("line " + std::to_string(line) + ": empty field", line);
  if (field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw InputError("line " + std::to_string(line) + ": not a number '" + std::string(field) + "'",
                     line);
  }
  if (!std::isfinite(v)) {
    throw InputError("line " + std::to_string(line) + ": non-finite value", line);
  }
  return v;
}

// Calls fn(line_number, content) for every non-blank, non-comment line.
template <typename Fn>
void for_each_line(const std::string& text, Fn fn) {
  std::size_t line = 0, pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    ++line;
    const std::string_view content = trim(std::string_view(text).substr(pos, end - pos));
    if (!content.empty() && content.front() != '#') fn(line, content);
    pos = end + 1;
  }
}

std::uint32_t load_u32(const char* p) {
  unsigned char b[4];
  std::memcpy(b, p, 4);
  return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
         static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
}

double load_f64(const char* p) {
  std::uint64_t u = 0;
  for (int i = 7; i >= 0; --i) u = u << 8 | static_cast<unsigned char>(p[i]);
  return std::bit_cast<double>(u);
}

void store_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void store_f64(std::string& out, double v) {
  const auto u = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((u >> (8 * i)) & 0xff));
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

Vec parse_signal_csv(const std::string& text) {
  Vec out;
  for_each_line(text, [&](std::size_t line, std::string_view content) {
    if (content.find(',') != std::string_view::npos) {
      throw InputError("line " + std::to_string(line) + ": expected one value per line", line);
    }
    out.push_back(parse_value(content, line));
  });
  if (out.empty()) throw InputError("signal file holds no values", 0);
  return out;
}

Vec read_signal_csv(const std::filesystem::path& path) {
  try {
    return parse_signal_csv(slurp(path, false));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what(), e.position());
  }
}

void write_signal_csv(const std::filesystem::path& path, std::span<const double> v) {
  std::string s;
  for (double x : v) {
    s += format_double(x);
    s += '\n';
  }
  spill(path, s, false);
}

Image parse_matrix_csv(const std::string& text) {
  Vec values;
  std::size_t rows = 0, cols = 0;
  for_each_line(text, [&](std::size_t line, std::string_view content) {
    std::size_t count = 0;
    std::size_t pos = 0;
    for (;;) {
      const std::size_t comma = content.find(',', pos);
      values.push_back(parse_value(content.substr(pos, comma - pos), line));
      ++count;
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (rows == 0) {
      cols = count;
    } else if (count != cols) {
      throw InputError("line " + std::to_string(line) + ": row has " + std::to_string(count) +
                           " columns, expected " + std::to_string(cols),
                       line);
    }
    ++rows;
  });
  if (rows == 0) throw InputError("matrix file holds no rows", 0);
  return Image(Extent{rows, cols}, std::move(values));
}

Image read_matrix_csv(const std::filesystem::path& path) {
  try {
    return parse_matrix_csv(slurp(path, false));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what(), e.position());
  }
}

void write_matrix_csv(const std::filesystem::path& path, const Image& img) {
  std::string s;
  for (std::size_t i = 0; i < img.shape.rows; ++i) {
    for (std::size_t j = 0; j < img.shape.cols; ++j) {
      if (j) s += ',';
      s += format_double(img(i, j));
    }
    s += '\n';
  }
  spill(path, s, false);
}

Image parse_raw_grid(const std::string& bytes) {
  if (bytes.size() < 8) throw InputError("raw grid: truncated header at byte " + std::to_string(bytes.size()), bytes.size());
  const std::uint32_t rows = load_u32(bytes.data());
  const std::uint32_t cols = load_u32(bytes.data() + 4);
  if (rows == 0 || cols == 0) throw InputError("raw grid: zero dimension at byte 0", 0);
  const std::size_t count = static_cast<std::size_t>(rows) * cols;
  const std::size_t expected = 8 + 8 * count;
  if (bytes.size() != expected) {
    const std::size_t at = std::min(bytes.size(), expected);
    throw InputError("raw grid: expected " + std::to_string(expected) + " bytes, found " +
                         std::to_string(bytes.size()) + " (mismatch at byte " + std::to_string(at) + ")",
                     at);
  }
  Vec values(count);
  for (std::size_t i = 0; i < count; ++i) {
    values[i] = load_f64(bytes.data() + 8 + 8 * i);
    if (!std::isfinite(values[i])) {
      throw InputError("raw grid: non-finite value at byte " + std::to_string(8 + 8 * i), 8 + 8 * i);
    }
  }
  return Image(Extent{rows, cols}, std::move(values));
}

Image read_raw_grid(const std::filesystem::path& path) {
  try {
    return parse_raw_grid(slurp(path, true));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what(), e.position());
  }
}

void write_raw_grid(const std::filesystem::path& path, const Image& img) {
  std::string s;
  s.reserve(8 + 8 * img.values.size());
  store_u32(s, static_cast<std::uint32_t>(img.shape.rows));
  store_u32(s, static_cast<std::uint32_t>(img.shape.cols));
  for (double v : img.values) store_f64(s, v);
  spill(path, s, true);
}

}  // namespace sasd
