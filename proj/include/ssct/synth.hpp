#pragma once

#include <array>
#include <cstdint>
#include <limits>

#include "ssct/field.hpp"
#include "ssct/synchro.hpp"

namespace ssct {

// Closed-form phase family
//   phi(x) = slope1*w1 + slope2*w2 + amp1*sin(2π w1) + amp2*sin(2π w2) + offset,
// with w_i = x_i or (1 - x_i) per the flip flags. flip2 = true with unit
// slopes and 0.1 sine amplitudes is the deformed plane wave used
// throughout the experiments.
struct PhaseSpec {
    double slope1 = 1.0, slope2 = 1.0;
    double amp1 = 0.1, amp2 = 0.1;
    bool flip1 = false, flip2 = true;
    double offset = 0.0;
    double wavenumber = 135.0;  // N
    double amplitude = 1.0;     // constant alpha(x)

    double phi(double x1, double x2) const;
    std::array<double, 2> grad_phi(double x1, double x2) const;
};

// Gaussian band exp(-(phi - center)^2 / sigma^2) around the level set
// phi = center. sigma = +inf disables the envelope.
struct BandSpec {
    double center = 0.7;
    double sigma = std::numeric_limits<double>::infinity();

    double envelope(double phi_value) const;
};

// f(x) = alpha * exp(2πi N phi(x)) sampled on the L x L grid.
SpatialField deformed_plane_wave(const PhaseSpec& spec, std::size_t L);

// f(x) = exp(-(phi-c)^2/sigma^2) * alpha * exp(2πi N phi(x)).
SpatialField banded_imf(const PhaseSpec& spec, const BandSpec& band, std::size_t L);

// Exact local wave-vectors N grad phi(b) on the side x side position grid.
VectorField2 exact_wavevectors(const PhaseSpec& spec, std::size_t side);

// Pointwise sum; the fields must agree in size.
SpatialField superpose(const SpatialField& a, const SpatialField& b);

// Adds i.i.d. zero-mean Gaussian noise with per-sample variance
// sigma^2 = Var(f) / 10^(snr_db/10); complex isotropic unless real_noise.
// Throws NumericalError when Var(f) = 0.
SpatialField add_noise(const SpatialField& f, double snr_db, std::uint64_t seed,
                       bool real_noise = false);

// Circularly shifts each column (fixed n2) by an independent uniform
// integer offset in [0, max_shift]. max_shift = 0 is the identity.
SpatialField random_shift_disrupt(const SpatialField& f, std::uint64_t seed,
                                  std::size_t max_shift);

}  // namespace ssct
