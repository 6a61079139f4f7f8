#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "ssct/field.hpp"

namespace ssct {

// Geometry of the Fourier-domain tiling. The angular exponent s controls
// how many orientations an annulus at radius a carries (~ a^{1-s}) and the
// radial exponent t controls annulus thickness (~ a^t). s = t gives the
// wave-packet geometry; s < t gives needle-like curvelets.
struct TilingParams {
    std::size_t L = 0;
    double s = 0.625;             // angular scaling exponent, 1/2 < s <= t
    double t = 0.875;             // radial scaling exponent, t < 1
    double a_min = 4.0;           // first annulus radius, >= 1
    double finest_cap = 0.0;      // radial step cap; 0 -> default L/32
    double radial_overlap = 1.0;  // step multiplier between annulus centers
    double angular_overlap = 1.0; // divisor in the angle-count rule
    bool real_mode = false;       // keep only theta in [0, pi); mirrors implied

    void validate() const;  // throws ConfigError
    double resolved_cap() const;
};

// One window g_{a,theta} stored densely over its centered-frequency
// bounding box. Window values are zero outside the fan-shaped support.
struct Tile {
    double a = 0.0;      // radial center; 0 for the low-pass disk
    double theta = 0.0;  // angular center in [0, 2pi)
    double L_a = 1.0;    // normalization a^{(s+t)/2} (1 for the low-pass tile)
    std::int64_t lo1 = 0, lo2 = 0;  // bounding-box origin in centered coords
    std::size_t n1 = 0, n2 = 0;     // bounding-box extents
    std::vector<double> window;     // n1*n2 row-major, values in [0, 1]

    bool is_lowpass() const { return a == 0.0; }
    std::size_t support_size() const;
    double window_at(std::int64_t xi1, std::int64_t xi2) const;
};

// Point set P plus window functions forming a squared partition of unity
// on Xi: sum over tiles of g^2 == 1 at every grid frequency (over the
// half-plane tiles and their implied mirrors when real_mode).
struct Tiling {
    TilingParams params;
    std::size_t lowpass_index = 0;
    std::vector<Tile> tiles;

    std::size_t tile_count() const { return tiles.size(); }

    // Largest bounding-box extent over all tiles; the coefficient grid
    // L_B must be at least this for the frequency wrapping to be exact.
    std::size_t max_box_extent() const;

    // sum of g^2 over tiles (counting mirrors when real_mode) at one
    // centered frequency; equals 1 by construction.
    double window_square_sum(std::int64_t xi1, std::int64_t xi2) const;

    void write_summary_csv(const std::filesystem::path& path) const;
};

// Builds the tiling: annulus centers start at a_min and advance by
// radial_overlap * min(a^t, finest_cap) out to the grid's corner radius;
// annulus j carries max(1, ceil(2π a_j^{1-s} / angular_overlap)) equally
// spaced angles (rounded up to even in real_mode); plus one low-pass disk.
// Windows are smoothstep-profiled bumps renormalized pointwise so the
// squared sum over Xi is exactly 1.
Tiling build_tiling(const TilingParams& params);

// Window value of one tile at a grid frequency; 0 outside the support.
// Throws DimensionError if xi lies outside [-L/2, L/2)^2.
double window_value(const Tiling& tiling, const Tile& tile, std::int64_t xi1, std::int64_t xi2);

}  // namespace ssct
