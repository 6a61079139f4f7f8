#include "ssct/tiling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>

#include "ssct/errors.hpp"

namespace ssct {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Gaussian-core compact bump exp(-beta u^2 / (1 - u^2)) on |u| < 1: all
// derivatives vanish at the support edge, and the variation is spread over
// the whole support rather than a narrow transition, so the discrete
// curvelets decay near-Gaussian in space for many support widths. Profiles
// with concentrated transitions (raised cosine, exp(-1/u) steps) leave
// coefficient tails above sqrt(eps) a few needle lengths away from a
// banded component, which poisons the wave-vector estimates there.
constexpr double kBumpBeta = 2.5;

double window_bump(double u) {
    const double u_sq = u * u;
    if (u_sq >= 1.0) return 0.0;
    return std::exp(-kBumpBeta * u_sq / (1.0 - u_sq));
}

double circ_dist(double x, double y) {
    double d = std::fmod(std::abs(x - y), kTwoPi);
    return std::min(d, kTwoPi - d);
}

// Radial profile of one annulus: a bump centered at `center` whose inner
// and outer half-widths reach the neighboring centers. The outermost
// annulus instead keeps value 1 beyond its center so the square's corners
// stay covered.
struct RadialBand {
    double r_lo, center, r_hi;
    bool plateau_out;

    double eval(double r) const {
        if (r <= center) {
            if (r <= r_lo) return 0.0;
            return window_bump((center - r) / (center - r_lo));
        }
        if (plateau_out) return 1.0;
        if (r >= r_hi) return 0.0;
        return window_bump((r - center) / (r_hi - center));
    }
};

struct LowpassBand {
    double plateau, edge;  // 1 for r <= plateau, 0 for r >= edge

    double eval(double r) const {
        if (r <= plateau) return 1.0;
        if (r >= edge) return 0.0;
        return window_bump((r - plateau) / (edge - plateau));
    }
};

// Extremes of cos over the arc [alpha, beta] (beta - alpha <= 2pi).
std::pair<double, double> cos_range(double alpha, double beta) {
    double lo = std::min(std::cos(alpha), std::cos(beta));
    double hi = std::max(std::cos(alpha), std::cos(beta));
    // does the arc contain an angle congruent to 0 (cos=1) or pi (cos=-1)?
    auto contains = [&](double target) {
        double k = std::ceil((alpha - target) / kTwoPi);
        return target + k * kTwoPi <= beta;
    };
    if (contains(0.0)) hi = 1.0;
    if (contains(std::numbers::pi)) lo = -1.0;
    return {lo, hi};
}

struct Box {
    std::int64_t lo1, hi1, lo2, hi2;  // inclusive
    bool empty() const { return lo1 > hi1 || lo2 > hi2; }
};

// Conservative integer bounding box of the fan {r in [r0,r1], angle in
// [theta-w, theta+w]} clipped to the centered grid square.
Box fan_box(double r0, double r1, double theta, double w, std::int64_t fmin, std::int64_t fmax) {
    auto [c_lo, c_hi] = cos_range(theta - w, theta + w);
    auto [s_lo, s_hi] = cos_range(theta - w - std::numbers::pi / 2.0, theta + w - std::numbers::pi / 2.0);
    auto corner_min = [&](double lo, double hi) {
        return std::min(std::min(r0 * lo, r0 * hi), std::min(r1 * lo, r1 * hi));
    };
    auto corner_max = [&](double lo, double hi) {
        return std::max(std::max(r0 * lo, r0 * hi), std::max(r1 * lo, r1 * hi));
    };
    Box box;
    box.lo1 = std::max<std::int64_t>(fmin, static_cast<std::int64_t>(std::floor(corner_min(c_lo, c_hi))) - 1);
    box.hi1 = std::min<std::int64_t>(fmax, static_cast<std::int64_t>(std::ceil(corner_max(c_lo, c_hi))) + 1);
    box.lo2 = std::max<std::int64_t>(fmin, static_cast<std::int64_t>(std::floor(corner_min(s_lo, s_hi))) - 1);
    box.hi2 = std::min<std::int64_t>(fmax, static_cast<std::int64_t>(std::ceil(corner_max(s_lo, s_hi))) + 1);
    return box;
}

// Evaluates a window over a candidate box, trims to the nonzero extent and
// fills the Tile. Returns false when the support is empty on this grid.
template <typename Eval>
bool fill_tile(Tile& tile, const Box& box, Eval&& eval) {
    if (box.empty()) return false;
    const std::size_t rows = static_cast<std::size_t>(box.hi1 - box.lo1 + 1);
    const std::size_t cols = static_cast<std::size_t>(box.hi2 - box.lo2 + 1);
    std::vector<double> patch(rows * cols, 0.0);
    std::int64_t min1 = box.hi1 + 1, max1 = box.lo1 - 1, min2 = box.hi2 + 1, max2 = box.lo2 - 1;
    for (std::int64_t x1 = box.lo1; x1 <= box.hi1; ++x1)
        for (std::int64_t x2 = box.lo2; x2 <= box.hi2; ++x2) {
            const double v = eval(x1, x2);
            if (v <= 0.0) continue;
            patch[static_cast<std::size_t>(x1 - box.lo1) * cols + static_cast<std::size_t>(x2 - box.lo2)] = v;
            min1 = std::min(min1, x1);
            max1 = std::max(max1, x1);
            min2 = std::min(min2, x2);
            max2 = std::max(max2, x2);
        }
    if (min1 > max1) return false;

    tile.lo1 = min1;
    tile.lo2 = min2;
    tile.n1 = static_cast<std::size_t>(max1 - min1 + 1);
    tile.n2 = static_cast<std::size_t>(max2 - min2 + 1);
    tile.window.assign(tile.n1 * tile.n2, 0.0);
    for (std::size_t i = 0; i < tile.n1; ++i) {
        const std::size_t src = (static_cast<std::size_t>(min1 - box.lo1) + i) * cols +
                                static_cast<std::size_t>(min2 - box.lo2);
        std::copy_n(patch.begin() + static_cast<std::ptrdiff_t>(src), tile.n2,
                    tile.window.begin() + static_cast<std::ptrdiff_t>(i * tile.n2));
    }
    return true;
}

}  // namespace

void TilingParams::validate() const {
    if (L < 16) throw ConfigError("tiling: grid side L must be at least 16");
    if (!(s > 0.5 && s <= t && t < 1.0))
        throw ConfigError("tiling: scaling exponents must satisfy 1/2 < s <= t < 1");
    if (a_min < 1.0) throw ConfigError("tiling: a_min must be at least 1");
    if (a_min >= static_cast<double>(L) / 2.0)
        throw ConfigError("tiling: a_min must be below L/2");
    if (radial_overlap <= 0.0 || angular_overlap <= 0.0)
        throw ConfigError("tiling: overlap factors must be positive");
    if (finest_cap < 0.0 || resolved_cap() > static_cast<double>(L) / 2.0)
        throw ConfigError("tiling: finest_cap must lie in (0, L/2]");
    if (resolved_cap() <= 0.0) throw ConfigError("tiling: finest_cap must be positive");
}

double TilingParams::resolved_cap() const {
    return finest_cap > 0.0 ? finest_cap : static_cast<double>(L) / 32.0;
}

std::size_t Tile::support_size() const {
    std::size_t n = 0;
    for (double v : window)
        if (v > 0.0) ++n;
    return n;
}

double Tile::window_at(std::int64_t xi1, std::int64_t xi2) const {
    if (xi1 < lo1 || xi2 < lo2) return 0.0;
    const std::size_t i1 = static_cast<std::size_t>(xi1 - lo1);
    const std::size_t i2 = static_cast<std::size_t>(xi2 - lo2);
    if (i1 >= n1 || i2 >= n2) return 0.0;
    return window[i1 * n2 + i2];
}

std::size_t Tiling::max_box_extent() const {
    std::size_t m = 0;
    for (const Tile& tile : tiles) m = std::max({m, tile.n1, tile.n2});
    return m;
}

double Tiling::window_square_sum(std::int64_t xi1, std::int64_t xi2) const {
    const auto L = static_cast<std::int64_t>(params.L);
    auto neg_wrap = [L](std::int64_t v) {
        std::int64_t w = ((-v + L / 2) % L + L) % L - L / 2;
        return w;
    };
    double acc = 0.0;
    for (const Tile& tile : tiles) {
        const double g = tile.window_at(xi1, xi2);
        acc += g * g;
        if (params.real_mode && !tile.is_lowpass()) {
            const double gm = tile.window_at(neg_wrap(xi1), neg_wrap(xi2));
            acc += gm * gm;
        }
    }
    return acc;
}

void Tiling::write_summary_csv(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw FormatError("cannot write " + path.string());
    os << "tile_id,a,theta,L_a,support_size\n" << std::setprecision(17);
    for (std::size_t i = 0; i < tiles.size(); ++i) {
        const Tile& tile = tiles[i];
        os << i << ',' << tile.a << ',' << tile.theta << ',' << tile.L_a << ','
           << tile.support_size() << '\n';
    }
}

Tiling build_tiling(const TilingParams& params) {
    params.validate();
    const auto L = static_cast<std::int64_t>(params.L);
    const std::int64_t fmin = SpectrumField::freq_min(params.L);
    const std::int64_t fmax = SpectrumField::freq_max(params.L);
    const double half = static_cast<double>(params.L) / 2.0;
    const double corner = std::hypot(half, half);
    const double cap = params.resolved_cap();

    // Annulus centers: a_{j+1} = a_j + radial_overlap * min(a_j^t, cap).
    // The recurrence reaches L/2 and then keeps going to the corner radius
    // so every frequency of the square grid lies under some annulus.
    std::vector<double> centers{params.a_min};
    while (centers.back() < corner) {
        const double a = centers.back();
        centers.push_back(a + params.radial_overlap * std::min(std::pow(a, params.t), cap));
    }

    Tiling tiling;
    tiling.params = params;

    {
        Tile lp;
        lp.a = 0.0;
        lp.theta = 0.0;
        lp.L_a = 1.0;
        LowpassBand band{params.a_min / 2.0, params.a_min};
        Box box{std::max<std::int64_t>(fmin, -static_cast<std::int64_t>(std::ceil(params.a_min)) - 1),
                std::min<std::int64_t>(fmax, static_cast<std::int64_t>(std::ceil(params.a_min)) + 1),
                std::max<std::int64_t>(fmin, -static_cast<std::int64_t>(std::ceil(params.a_min)) - 1),
                std::min<std::int64_t>(fmax, static_cast<std::int64_t>(std::ceil(params.a_min)) + 1)};
        fill_tile(lp, box, [&](std::int64_t x1, std::int64_t x2) {
            return band.eval(std::hypot(static_cast<double>(x1), static_cast<double>(x2)));
        });
        tiling.lowpass_index = 0;
        tiling.tiles.push_back(std::move(lp));
    }

    for (std::size_t j = 0; j < centers.size(); ++j) {
        const double a = centers[j];
        const double prev = (j == 0) ? params.a_min / 2.0 : centers[j - 1];
        const bool last = (j + 1 == centers.size());
        const double next = last ? corner + 1.0 : centers[j + 1];
        RadialBand band{prev, a, next, last};

        std::size_t n_angles = std::max<std::size_t>(
            1, static_cast<std::size_t>(
                   std::ceil(kTwoPi * std::pow(a, 1.0 - params.s) / params.angular_overlap)));
        if (params.real_mode && (n_angles % 2) != 0) ++n_angles;
        const double spacing = kTwoPi / static_cast<double>(n_angles);
        const std::size_t kept = params.real_mode ? n_angles / 2 : n_angles;

        for (std::size_t k = 0; k < kept; ++k) {
            Tile tile;
            tile.a = a;
            tile.theta = spacing * static_cast<double>(k);
            tile.L_a = std::pow(a, (params.s + params.t) / 2.0);
            const double r_hi = last ? corner : next;
            const Box box = fan_box(prev, r_hi, tile.theta, spacing, fmin, fmax);
            const bool ok = fill_tile(tile, box, [&](std::int64_t x1, std::int64_t x2) {
                const double r = std::hypot(static_cast<double>(x1), static_cast<double>(x2));
                const double rad = band.eval(r);
                if (rad <= 0.0 || r == 0.0) return 0.0;
                double ang = std::atan2(static_cast<double>(x2), static_cast<double>(x1));
                if (ang < 0.0) ang += kTwoPi;
                const double d = circ_dist(ang, tile.theta);
                if (d >= spacing) return 0.0;
                return rad * window_bump(d / spacing);
            });
            if (ok) tiling.tiles.push_back(std::move(tile));
        }
    }

    if (params.real_mode && params.L % 2 == 0) {
        // The Nyquist points (-L/2, 0), (0, -L/2) and (-L/2, -L/2) are their
        // own wrapped negations, so no half-plane fan reaches them. One-point
        // tiles carry them; the self-mirrored accumulation below renormalizes
        // each to 1/sqrt(2), which the doubled band-tile weight turns back
        // into exactly 1.
        struct SelfPaired {
            std::int64_t x1, x2;
            double theta;
        };
        const SelfPaired points[] = {{fmin, 0, 0.0},
                                     {0, fmin, std::numbers::pi / 2.0},
                                     {fmin, fmin, std::numbers::pi / 4.0}};
        for (const SelfPaired& p : points) {
            Tile nyq;
            nyq.a = std::hypot(static_cast<double>(p.x1), static_cast<double>(p.x2));
            nyq.theta = p.theta;
            nyq.L_a = std::pow(nyq.a, (params.s + params.t) / 2.0);
            nyq.lo1 = p.x1;
            nyq.lo2 = p.x2;
            nyq.n1 = nyq.n2 = 1;
            nyq.window = {1.0};
            tiling.tiles.push_back(std::move(nyq));
        }

        // Pairs on the row xi2 = -L/2 negate onto the same row, entirely in
        // the dropped half-plane; one row tile carries the xi1 > 0
        // representatives and the mirrored accumulation covers the rest.
        if (params.L >= 4) {
            Tile row;
            row.a = std::hypot(static_cast<double>(params.L) / 4.0, half);
            row.theta = std::numbers::pi / 2.0;
            row.L_a = std::pow(row.a, (params.s + params.t) / 2.0);
            row.lo1 = 1;
            row.lo2 = fmin;
            row.n1 = static_cast<std::size_t>(L / 2 - 1);
            row.n2 = 1;
            row.window.assign(row.n1, 1.0);
            tiling.tiles.push_back(std::move(row));
        }
    }

    // Pointwise renormalization g <- g / sqrt(sum g^2) makes the squared
    // partition of unity exact. In real_mode the dropped mirror tiles are
    // accounted for through the wrapped negation -xi mod L, which keeps the
    // sum symmetric on the Nyquist cross and real reconstruction exact.
    std::vector<double> sum_sq(params.L * params.L, 0.0);
    auto flat = [&](std::int64_t x1, std::int64_t x2) {
        return static_cast<std::size_t>(x1 - fmin) * params.L + static_cast<std::size_t>(x2 - fmin);
    };
    auto neg_wrap = [L](std::int64_t v) { return ((-v + L / 2) % L + L) % L - L / 2; };

    for (const Tile& tile : tiling.tiles) {
        for (std::size_t i1 = 0; i1 < tile.n1; ++i1)
            for (std::size_t i2 = 0; i2 < tile.n2; ++i2) {
                const double g = tile.window[i1 * tile.n2 + i2];
                if (g <= 0.0) continue;
                const std::int64_t x1 = tile.lo1 + static_cast<std::int64_t>(i1);
                const std::int64_t x2 = tile.lo2 + static_cast<std::int64_t>(i2);
                sum_sq[flat(x1, x2)] += g * g;
                if (params.real_mode && !tile.is_lowpass())
                    sum_sq[flat(neg_wrap(x1), neg_wrap(x2))] += g * g;
            }
    }
    for (std::size_t idx = 0; idx < sum_sq.size(); ++idx) {
        if (sum_sq[idx] <= 0.0) {
            const std::int64_t x1 = static_cast<std::int64_t>(idx / params.L) + fmin;
            const std::int64_t x2 = static_cast<std::int64_t>(idx % params.L) + fmin;
            throw NumericalError("tiling: frequency (" + std::to_string(x1) + "," +
                                 std::to_string(x2) + ") not covered by any window");
        }
    }
    for (Tile& tile : tiling.tiles) {
        for (std::size_t i1 = 0; i1 < tile.n1; ++i1)
            for (std::size_t i2 = 0; i2 < tile.n2; ++i2) {
                double& g = tile.window[i1 * tile.n2 + i2];
                if (g <= 0.0) continue;
                const std::int64_t x1 = tile.lo1 + static_cast<std::int64_t>(i1);
                const std::int64_t x2 = tile.lo2 + static_cast<std::int64_t>(i2);
                g /= std::sqrt(sum_sq[flat(x1, x2)]);
            }
    }
    return tiling;
}

double window_value(const Tiling& tiling, const Tile& tile, std::int64_t xi1, std::int64_t xi2) {
    const std::int64_t fmin = SpectrumField::freq_min(tiling.params.L);
    const std::int64_t fmax = SpectrumField::freq_max(tiling.params.L);
    if (xi1 < fmin || xi1 > fmax || xi2 < fmin || xi2 > fmax)
        throw DimensionError("window_value: frequency outside [-L/2, L/2)^2");
    return tile.window_at(xi1, xi2);
}

}  // namespace ssct
