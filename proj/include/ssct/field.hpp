#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace ssct {

using cplx = std::complex<double>;

// Periodic field sampled on the L x L unit-square grid x = (n1/L, n2/L).
// Storage is row-major with n1 as the row index: values[n1*L + n2].
struct SpatialField {
    std::size_t L = 0;
    std::vector<cplx> values;
    bool is_real = false;

    SpatialField() = default;
    SpatialField(std::size_t side, cplx fill = cplx(0.0, 0.0), bool real_flag = false);

    cplx& at(std::size_t n1, std::size_t n2) { return values[n1 * L + n2]; }
    const cplx& at(std::size_t n1, std::size_t n2) const { return values[n1 * L + n2]; }

    std::size_t size() const { return values.size(); }

    // sum_x |f(x)|^2
    double energy() const;

    // Throws DimensionError / ConfigError if the invariants do not hold
    // (L >= 16, L^2 values, zero imaginary parts when is_real).
    void validate() const;
};

// Spectrum on the centered integer frequency grid Xi = [-L/2, L/2)^2.
// Storage index k = xi + L/2 per axis: values[(xi1 + L/2)*L + (xi2 + L/2)].
struct SpectrumField {
    std::size_t L = 0;
    std::vector<cplx> values;

    SpectrumField() = default;
    explicit SpectrumField(std::size_t side);

    static std::int64_t freq_min(std::size_t L) { return -static_cast<std::int64_t>(L / 2); }
    static std::int64_t freq_max(std::size_t L) { return static_cast<std::int64_t>(L / 2) - 1; }

    // Centered frequency -> storage index (one axis).
    std::size_t index_of(std::int64_t xi) const {
        return static_cast<std::size_t>(xi + static_cast<std::int64_t>(L / 2));
    }
    // Storage index -> centered frequency (one axis).
    std::int64_t freq_of(std::size_t k) const {
        return static_cast<std::int64_t>(k) - static_cast<std::int64_t>(L / 2);
    }

    cplx& at(std::int64_t xi1, std::int64_t xi2) { return values[index_of(xi1) * L + index_of(xi2)]; }
    const cplx& at(std::int64_t xi1, std::int64_t xi2) const {
        return values[index_of(xi1) * L + index_of(xi2)];
    }

    double energy() const;
};

// Isometric discrete Fourier transform pair:
//   fhat(xi) = (1/L) sum_x exp(-2πi x·xi) f(x)
//   g(x)     = (1/L) sum_xi exp(+2πi x·xi) g(xi)
// The 1/L factor makes both maps unitary between l2(X) and l2(Xi).
SpectrumField dft2(const SpatialField& f);
SpatialField idft2(const SpectrumField& g);

// Multiplies f by a separable raised-cosine taper that is 1 on the interior
// and decays to 0 within margin*L samples of each edge. margin = 0 is the
// identity. Used to periodize non-periodic inputs before transforming.
SpatialField periodize(const SpatialField& f, double margin);

// Taper profile for one axis, exposed for tests: w = band width in samples.
double taper_profile(std::size_t i, std::size_t w);

}  // namespace ssct
