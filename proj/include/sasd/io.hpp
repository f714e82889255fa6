#pragma once

// Reading and writing signals. 1D: CSV with one value per line. 2D: a
// comma-separated matrix (one row per line) or a raw grid of two uint32
// dimensions followed by rows×cols float64 values, all little-endian.
// Parse failures throw InputError carrying the 1-based line or the byte offset.

#include <filesystem>
#include <string>

#include "sasd/types.hpp"

namespace sasd {

Vec read_signal_csv(const std::filesystem::path& path);
Vec parse_signal_csv(const std::string& text);
void write_signal_csv(const std::filesystem::path& path, std::span<const double> v);

Image read_matrix_csv(const std::filesystem::path& path);
Image parse_matrix_csv(const std::string& text);
void write_matrix_csv(const std::filesystem::path& path, const Image& img);

Image read_raw_grid(const std::filesystem::path& path);
Image parse_raw_grid(const std::string& bytes);
void write_raw_grid(const std::filesystem::path& path, const Image& img);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace sasd
