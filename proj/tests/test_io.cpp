#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>

#include "sasd/errors.hpp"
#include "sasd/io.hpp"
#include "support.hpp"

using namespace sasd;
using namespace sasd::test;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("sasd_io_" + name);
}

std::string raw_header(std::uint32_t r, std::uint32_t c) {
  std::string s(8, '\0');
  for (int i = 0; i < 4; ++i) {
    s[i] = static_cast<char>((r >> (8 * i)) & 0xff);
    s[4 + i] = static_cast<char>((c >> (8 * i)) & 0xff);
  }
  return s;
}

std::string raw_double(double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  std::string s(8, '\0');
  for (int i = 0; i < 8; ++i) s[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  return s;
}

template <typename Fn>
std::string error_of(Fn&& fn) {
  try {
    fn();
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(FormatDouble, RoundTripsExactly) {
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 1000; ++rep) {
    const double v = std::uniform_real_distribution<double>(-1e6, 1e6)(rng) *
                     std::pow(10.0, std::uniform_int_distribution<int>(-300, 290)(rng));
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(3.0), "3");
}

TEST(SignalCsv, RoundTripWithCommentsAndBlanks) {
  const Vec v = parse_signal_csv("# header\n1.5\n\n-2e-3\n  7\n");
  EXPECT_EQ(v, (Vec{1.5, -2e-3, 7.0}));
  std::mt19937_64 rng(2);
  const Vec w = uniform_vec(rng, 50);
  const auto p = temp_path("sig.csv");
  write_signal_csv(p, w);
  EXPECT_EQ(read_signal_csv(p), w);
  std::filesystem::remove(p);
}

TEST(SignalCsv, ErrorsCarryLineNumber) {
  EXPECT_NE(error_of([] { parse_signal_csv("1\n2\nabc\n"); }).find("line 3"), std::string::npos);
  EXPECT_NE(error_of([] { parse_signal_csv("1\nnan\n"); }).find("line 2"), std::string::npos);
  EXPECT_NE(error_of([] { parse_signal_csv("1,2\n"); }).find("line 1"), std::string::npos);
  EXPECT_THROW(parse_signal_csv("# only a comment\n"), InputError);
  EXPECT_THROW(read_signal_csv(temp_path("missing.csv")), InputError);
}

TEST(MatrixCsv, RoundTripAndRagged) {
  const Image m = parse_matrix_csv("1,2,3\n4,5,6\n");
  EXPECT_EQ(m.shape, (Extent{2, 3}));
  EXPECT_EQ(m.values, (Vec{1, 2, 3, 4, 5, 6}));
  std::mt19937_64 rng(3);
  Image r(4, 5);
  r.values = uniform_vec(rng, 20);
  const auto p = temp_path("mat.csv");
  write_matrix_csv(p, r);
  const Image back = read_matrix_csv(p);
  EXPECT_EQ(back.shape, r.shape);
  EXPECT_EQ(back.values, r.values);
  std::filesystem::remove(p);
  EXPECT_NE(error_of([] { parse_matrix_csv("1,2\n3\n"); }).find("line 2"), std::string::npos);
}

TEST(RawGrid, RoundTripAndErrors) {
  std::mt19937_64 rng(4);
  Image r(3, 7);
  r.values = uniform_vec(rng, 21);
  const auto p = temp_path("grid.bin");
  write_raw_grid(p, r);
  EXPECT_EQ(std::filesystem::file_size(p), 8u + 21u * 8u);
  const Image back = read_raw_grid(p);
  EXPECT_EQ(back.shape, r.shape);
  EXPECT_EQ(back.values, r.values);
  std::filesystem::remove(p);

  const std::string ok = raw_header(1, 2) + raw_double(1.0) + raw_double(-2.5);
  EXPECT_EQ(parse_raw_grid(ok).values, (Vec{1.0, -2.5}));
  EXPECT_THROW(parse_raw_grid(ok.substr(0, 20)), InputError);
  EXPECT_THROW(parse_raw_grid("abc"), InputError);
  const std::string bad = raw_header(1, 2) + raw_double(1.0) +
                          raw_double(std::numeric_limits<double>::infinity());
  EXPECT_NE(error_of([&] { parse_raw_grid(bad); }).find("16"), std::string::npos);
}
