#include "ssct/field.hpp"

#include <cmath>
#include <numbers>

#include "ssct/errors.hpp"
#include "ssct/fft.hpp"

namespace ssct {

namespace {

constexpr std::size_t kMinSide = 16;

double sum_sq(const std::vector<cplx>& v) {
    double acc = 0.0;
    for (const cplx& z : v) acc += std::norm(z);
    return acc;
}

void check_square(std::size_t side, std::size_t count, const char* what) {
    if (side == 0 || count != side * side)
        throw DimensionError(std::string(what) + ": expected a square L x L value array");
    if (side < kMinSide)
        throw DimensionError(std::string(what) + ": side length must be at least 16");
}

}  // namespace

SpatialField::SpatialField(std::size_t side, cplx fill, bool real_flag)
    : L(side), values(side * side, fill), is_real(real_flag) {}

double SpatialField::energy() const { return sum_sq(values); }

void SpatialField::validate() const {
    check_square(L, values.size(), "SpatialField");
    if (is_real) {
        for (const cplx& z : values)
            if (z.imag() != 0.0)
                throw DimensionError("SpatialField: is_real set but imaginary parts are nonzero");
    }
}

SpectrumField::SpectrumField(std::size_t side) : L(side), values(side * side) {}

double SpectrumField::energy() const { return sum_sq(values); }

SpectrumField dft2(const SpatialField& f) {
    check_square(f.L, f.values.size(), "dft2");
    const std::size_t L = f.L;
    SpectrumField out(L);

    // FFTW produces wrap-order bins xi mod L; reorder to centered storage
    // and scale by 1/L. exp(-2πi x·xi) is invariant under xi -> xi + L, so
    // bin (k1,k2) holds every centered frequency congruent to it.
    std::vector<cplx> buf = f.values;
    fft::forward2d(buf.data(), L);
    const double scale = 1.0 / static_cast<double>(L);
    const std::size_t half = L / 2;
    for (std::size_t k1 = 0; k1 < L; ++k1) {
        const std::size_t c1 = (k1 + half) % L;  // centered row for wrap row k1
        for (std::size_t k2 = 0; k2 < L; ++k2) {
            const std::size_t c2 = (k2 + half) % L;
            out.values[c1 * L + c2] = buf[k1 * L + k2] * scale;
        }
    }
    return out;
}

SpatialField idft2(const SpectrumField& g) {
    check_square(g.L, g.values.size(), "idft2");
    const std::size_t L = g.L;
    std::vector<cplx> buf(L * L);
    const std::size_t half = L / 2;
    for (std::size_t c1 = 0; c1 < L; ++c1) {
        const std::size_t k1 = (c1 + L - half) % L;
        for (std::size_t c2 = 0; c2 < L; ++c2) {
            const std::size_t k2 = (c2 + L - half) % L;
            buf[k1 * L + k2] = g.values[c1 * L + c2];
        }
    }
    fft::backward2d(buf.data(), L);
    SpatialField out(L);
    const double scale = 1.0 / static_cast<double>(L);
    for (std::size_t i = 0; i < buf.size(); ++i) out.values[i] = buf[i] * scale;
    return out;
}

double taper_profile(std::size_t i, std::size_t w) {
    if (w == 0 || i >= w) return 1.0;
    const double u = static_cast<double>(i) / static_cast<double>(w);
    return 0.5 * (1.0 - std::cos(std::numbers::pi * u));
}

SpatialField periodize(const SpatialField& f, double margin) {
    check_square(f.L, f.values.size(), "periodize");
    if (margin < 0.0 || margin >= 0.5) throw ConfigError("periodize: margin must lie in [0, 0.5)");
    if (margin == 0.0) return f;

    const std::size_t L = f.L;
    const std::size_t w = static_cast<std::size_t>(std::llround(margin * static_cast<double>(L)));
    std::vector<double> axis(L, 1.0);
    for (std::size_t i = 0; i < L; ++i) {
        double v = taper_profile(i, w);
        v = std::min(v, taper_profile(L - 1 - i, w));
        axis[i] = v;
    }
    SpatialField out = f;
    for (std::size_t n1 = 0; n1 < L; ++n1)
        for (std::size_t n2 = 0; n2 < L; ++n2) out.values[n1 * L + n2] *= axis[n1] * axis[n2];
    return out;
}

}  // namespace ssct
