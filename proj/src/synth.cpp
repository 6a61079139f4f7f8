#include "ssct/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "ssct/errors.hpp"

namespace ssct {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

double PhaseSpec::phi(double x1, double x2) const {
    const double w1 = flip1 ? 1.0 - x1 : x1;
    const double w2 = flip2 ? 1.0 - x2 : x2;
    return slope1 * w1 + slope2 * w2 + amp1 * std::sin(kTwoPi * w1) + amp2 * std::sin(kTwoPi * w2) +
           offset;
}

std::array<double, 2> PhaseSpec::grad_phi(double x1, double x2) const {
    const double w1 = flip1 ? 1.0 - x1 : x1;
    const double w2 = flip2 ? 1.0 - x2 : x2;
    const double d1 = flip1 ? -1.0 : 1.0;
    const double d2 = flip2 ? -1.0 : 1.0;
    return {d1 * (slope1 + kTwoPi * amp1 * std::cos(kTwoPi * w1)),
            d2 * (slope2 + kTwoPi * amp2 * std::cos(kTwoPi * w2))};
}

double BandSpec::envelope(double phi_value) const {
    if (std::isinf(sigma)) return 1.0;
    const double u = (phi_value - center) / sigma;
    return std::exp(-u * u);
}

SpatialField banded_imf(const PhaseSpec& spec, const BandSpec& band, std::size_t L) {
    if (!std::isinf(band.sigma) && band.sigma <= 0.0)
        throw ConfigError("banded_imf: sigma must be positive");
    SpatialField f(L);
    for (std::size_t n1 = 0; n1 < L; ++n1) {
        const double x1 = static_cast<double>(n1) / static_cast<double>(L);
        for (std::size_t n2 = 0; n2 < L; ++n2) {
            const double x2 = static_cast<double>(n2) / static_cast<double>(L);
            const double p = spec.phi(x1, x2);
            const double mag = spec.amplitude * band.envelope(p);
            const double arg = kTwoPi * spec.wavenumber * p;
            f.at(n1, n2) = cplx(mag * std::cos(arg), mag * std::sin(arg));
        }
    }
    return f;
}

SpatialField deformed_plane_wave(const PhaseSpec& spec, std::size_t L) {
    return banded_imf(spec, BandSpec{0.0, std::numeric_limits<double>::infinity()}, L);
}

VectorField2 exact_wavevectors(const PhaseSpec& spec, std::size_t side) {
    VectorField2 out(side);
    for (std::size_t m1 = 0; m1 < side; ++m1) {
        const double x1 = static_cast<double>(m1) / static_cast<double>(side);
        for (std::size_t m2 = 0; m2 < side; ++m2) {
            const double x2 = static_cast<double>(m2) / static_cast<double>(side);
            const auto g = spec.grad_phi(x1, x2);
            const std::size_t i = m1 * side + m2;
            out.v1[i] = spec.wavenumber * g[0];
            out.v2[i] = spec.wavenumber * g[1];
            out.defined[i] = 1;
        }
    }
    return out;
}

SpatialField superpose(const SpatialField& a, const SpatialField& b) {
    if (a.L != b.L) throw DimensionError("superpose: field sides differ");
    SpatialField out = a;
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += b.values[i];
    out.is_real = a.is_real && b.is_real;
    return out;
}

SpatialField add_noise(const SpatialField& f, double snr_db, std::uint64_t seed, bool real_noise) {
    if (std::isinf(snr_db)) return f;
    cplx mean(0.0, 0.0);
    for (const cplx& z : f.values) mean += z;
    mean /= static_cast<double>(f.values.size());
    double var = 0.0;
    for (const cplx& z : f.values) var += std::norm(z - mean);
    var /= static_cast<double>(f.values.size());
    if (var <= 0.0) throw NumericalError("add_noise: input field has zero variance");

    const double sigma_sq = var / std::pow(10.0, snr_db / 10.0);
    std::mt19937_64 rng(seed);
    SpatialField out = f;
    if (real_noise) {
        std::normal_distribution<double> dist(0.0, std::sqrt(sigma_sq));
        for (cplx& z : out.values) z += dist(rng);
    } else {
        std::normal_distribution<double> dist(0.0, std::sqrt(sigma_sq / 2.0));
        for (cplx& z : out.values) z += cplx(dist(rng), dist(rng));
        out.is_real = false;
    }
    return out;
}

SpatialField random_shift_disrupt(const SpatialField& f, std::uint64_t seed,
                                  std::size_t max_shift) {
    const std::size_t L = f.L;
    SpatialField out(L, cplx(0.0, 0.0), f.is_real);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> dist(0, max_shift);
    for (std::size_t n2 = 0; n2 < L; ++n2) {
        const std::size_t offset = max_shift == 0 ? 0 : dist(rng);
        for (std::size_t n1 = 0; n1 < L; ++n1)
            out.at((n1 + offset) % L, n2) = f.at(n1, n2);
    }
    return out;
}

}  // namespace ssct
