#pragma once

#include <memory>
#include <vector>

#include "ssct/field.hpp"
#include "ssct/tiling.hpp"

namespace ssct {

// Coefficients of one tile over the position grid B = {(m1/L_B, m2/L_B)},
// stored row-major with m1 as the row index. grad1/grad2 hold the two
// components of the discrete gradient when computed.
struct TileCoefficients {
    std::vector<cplx> w;
    std::vector<cplx> grad1, grad2;
};

// Transform values W_f(a,theta,b) for every tile of a tiling.
struct CoefficientSet {
    std::shared_ptr<const Tiling> tiling;
    std::size_t L_B = 0;
    bool has_gradient = false;
    std::vector<TileCoefficients> tiles;

    // Frame weight: mirrored tiles of a real_mode tiling carry the energy
    // of their dropped conjugate twin.
    double hermitian_weight(std::size_t tile_index) const;
};

// Smallest power of two >= L^t, doubled until every tile's support
// bounding box fits inside one L_B x L_B fundamental cell. A nonzero
// override is validated against the same fit requirement and returned
// unchanged; an override that is too small raises ConfigError naming the
// offending tile.
std::size_t resolve_coeff_side(const Tiling& tiling, std::size_t override_side = 0);

// Streaming kernels. compute_tile evaluates
//   W(b)      = (1/L_a) sum_xi exp(+2πi b·xi) g(xi) fhat(xi)
//   gradW(b)  = (1/L_a) sum_xi 2πi xi exp(+2πi b·xi) g(xi) fhat(xi)
// for all b in one pass: the products are wrapped onto the L_B x L_B cell
// (exact, since b-grid sampling aliases frequencies mod L_B) and inverse
// FFTs of size L_B finish the job.
TileCoefficients compute_tile(const SpectrumField& fhat, const Tile& tile, std::size_t L_B,
                              bool with_gradient);

// Adds one tile's transpose contribution (L_a/L_B^2) g(xi) What(xi mod L_B)
// to the spectrum accumulator. mask, when nonnull, disables individual b
// samples before the forward FFT.
void accumulate_tile_transpose(const Tile& tile, std::size_t L_B, const std::vector<cplx>& w,
                               const std::uint8_t* mask, SpectrumField& accum);

// Forward discrete general curvelet transform per Eq. (D1); matches the
// direct summation to near machine precision.
CoefficientSet forward(const SpatialField& f, std::shared_ptr<const Tiling> tiling,
                       std::size_t L_B = 0, unsigned threads = 1);

// Forward transform plus the discrete gradient (D3).
CoefficientSet gradient(const SpatialField& f, std::shared_ptr<const Tiling> tiling,
                        std::size_t L_B = 0, unsigned threads = 1);

// Transpose (D2): sum over (tile, b) of mask * W * w_{a theta b}(x) * (L_a/L_B)^2.
// With a full mask and coeffs = forward(f) this reconstructs f. For
// real_mode tilings the band-pass contribution is doubled and the real
// part returned. mask, when given, must hold one L_B^2 vector per tile.
SpatialField transpose(const CoefficientSet& coeffs,
                       const std::vector<std::vector<std::uint8_t>>* mask = nullptr,
                       unsigned threads = 1);

// sum |W|^2 (L_a/L_B)^2 over all coefficients (counting mirror weights in
// real_mode); equals ||f||_2^2 for coeffs = forward(f).
double frame_energy(const CoefficientSet& coeffs);

}  // namespace ssct
