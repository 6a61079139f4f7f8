#include "ssct/io.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "ssct/errors.hpp"

namespace ssct {

namespace {

constexpr char kMagic[4] = {'S', 'S', 'C', 'T'};
constexpr std::uint16_t kVersion = 1;
constexpr std::uint16_t kDtypeReal = 1;
constexpr std::uint16_t kDtypeComplex = 2;

// The format is little-endian by definition; these helpers write the raw
// object representation, which matches on every platform this builds on.
template <typename T>
void put(std::ostream& os, T value) {
    os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& is, const char* what) {
    T value{};
    is.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!is) throw FormatError(std::string("truncated header: ") + what);
    return value;
}

}  // namespace

RawGrid read_raw_stream(std::istream& is, const std::string& what) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw FormatError(what + ": bad magic, not an SSCT raw block");
    const auto version = get<std::uint16_t>(is, "version");
    if (version != kVersion)
        throw FormatError(what + ": unsupported version " + std::to_string(version));
    const auto dtype = get<std::uint16_t>(is, "dtype");
    if (dtype != kDtypeReal && dtype != kDtypeComplex)
        throw FormatError(what + ": unknown dtype " + std::to_string(dtype));

    RawGrid grid;
    grid.rows = get<std::uint32_t>(is, "rows");
    grid.cols = get<std::uint32_t>(is, "cols");
    grid.is_real = (dtype == kDtypeReal);
    const std::size_t count = static_cast<std::size_t>(grid.rows) * grid.cols;
    grid.values.resize(count);

    if (grid.is_real) {
        std::vector<double> re(count);
        is.read(reinterpret_cast<char*>(re.data()),
                static_cast<std::streamsize>(count * sizeof(double)));
        if (!is) throw FormatError(what + ": truncated payload");
        for (std::size_t i = 0; i < count; ++i) grid.values[i] = cplx(re[i], 0.0);
    } else {
        is.read(reinterpret_cast<char*>(grid.values.data()),
                static_cast<std::streamsize>(count * sizeof(cplx)));
        if (!is) throw FormatError(what + ": truncated payload");
    }
    return grid;
}

RawGrid read_raw(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open " + path.string());
    return read_raw_stream(is, path.string());
}

void write_raw_stream(std::ostream& os, const RawGrid& grid, const std::string& what) {
    if (grid.values.size() != static_cast<std::size_t>(grid.rows) * grid.cols)
        throw DimensionError("write_raw: value count does not match rows*cols");
    os.write(kMagic, 4);
    put(os, kVersion);
    put(os, grid.is_real ? kDtypeReal : kDtypeComplex);
    put(os, grid.rows);
    put(os, grid.cols);
    if (grid.is_real) {
        for (const cplx& z : grid.values) put(os, z.real());
    } else {
        os.write(reinterpret_cast<const char*>(grid.values.data()),
                 static_cast<std::streamsize>(grid.values.size() * sizeof(cplx)));
    }
    if (!os) throw FormatError("write failed: " + what);
}

void write_raw(const std::filesystem::path& path, const RawGrid& grid) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw FormatError("cannot write " + path.string());
    write_raw_stream(os, grid, path.string());
}

SpatialField read_field(const std::filesystem::path& path) {
    RawGrid grid = read_raw(path);
    if (grid.rows != grid.cols)
        throw DimensionError(path.string() + ": field must be square, got " +
                             std::to_string(grid.rows) + "x" + std::to_string(grid.cols));
    SpatialField f;
    f.L = grid.rows;
    f.values = std::move(grid.values);
    f.is_real = grid.is_real;
    f.validate();
    return f;
}

void write_field(const SpatialField& field, const std::filesystem::path& path) {
    RawGrid grid;
    grid.rows = grid.cols = static_cast<std::uint32_t>(field.L);
    grid.is_real = field.is_real;
    grid.values = field.values;
    write_raw(path, grid);
}

void write_field_csv(const SpatialField& field, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw FormatError("cannot write " + path.string());
    os << "row,col,re,im\n" << std::setprecision(17);
    for (std::size_t r = 0; r < field.L; ++r)
        for (std::size_t c = 0; c < field.L; ++c) {
            const cplx& z = field.at(r, c);
            os << r << ',' << c << ',' << z.real() << ',' << z.imag() << '\n';
        }
}

void write_pgm16(const std::vector<double>& values, std::size_t rows, std::size_t cols,
                 const std::filesystem::path& path) {
    if (values.size() != rows * cols) throw DimensionError("write_pgm16: size mismatch");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (values.empty()) lo = hi = 0.0;
    const double span = (hi > lo) ? hi - lo : 1.0;

    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw FormatError("cannot write " + path.string());
    os << "P5\n" << cols << ' ' << rows << "\n65535\n";
    for (double v : values) {
        const double u = (v - lo) / span;
        const auto q = static_cast<std::uint16_t>(std::clamp(u, 0.0, 1.0) * 65535.0 + 0.5);
        // PGM 16-bit samples are big-endian
        const std::array<char, 2> be{static_cast<char>(q >> 8), static_cast<char>(q & 0xff)};
        os.write(be.data(), 2);
    }

    std::ofstream side(path.string() + ".txt", std::ios::trunc);
    side << std::setprecision(17) << "min " << lo << "\nmax " << hi
         << "\nscale pixel = (value - min) / (max - min) * 65535\n";
}

}  // namespace ssct
