#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ssct/field.hpp"

namespace ssct {

// SSCT raw grid format (little-endian):
//   magic "SSCT" | u16 version=1 | u16 dtype | u32 rows | u32 cols | payload
// dtype 1 = real f64, dtype 2 = complex f64 interleaved re/im, row-major.
struct RawGrid {
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    bool is_real = false;
    std::vector<cplx> values;  // rows*cols, imaginary parts zero when is_real
};

RawGrid read_raw(const std::filesystem::path& path);
void write_raw(const std::filesystem::path& path, const RawGrid& grid);

// Stream variants; used where raw blocks are embedded in a larger file
// (the per-tile coefficient dump).
RawGrid read_raw_stream(std::istream& is, const std::string& what);
void write_raw_stream(std::ostream& os, const RawGrid& grid, const std::string& what);

// Square-field wrappers over the raw format. write_field stores dtype 1
// when field.is_real, dtype 2 otherwise; read_field round-trips bit-exactly.
SpatialField read_field(const std::filesystem::path& path);
void write_field(const SpatialField& field, const std::filesystem::path& path);

// CSV export `row,col,re,im` with 17 significant digits.
void write_field_csv(const SpatialField& field, const std::filesystem::path& path);

// 16-bit binary PGM heatmap, min-max scaled. The scaling applied is
// recorded in a sidecar text file at `<path>.txt`.
void write_pgm16(const std::vector<double>& values, std::size_t rows, std::size_t cols,
                 const std::filesystem::path& path);

}  // namespace ssct
