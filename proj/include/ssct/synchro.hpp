#pragma once

#include <cstdint>
#include <filesystem>
#include <unordered_map>
#include <vector>

#include "ssct/transform.hpp"

namespace ssct {

// Local wave-vector estimates v_f = Re[grad W / (2πi W)] kept where
// |W| >= sqrt(eps), with the squeeze weight |W|^2 (L_a/L_B)^2 attached
// (doubled for real_mode band tiles). The low-pass tile never contributes.
struct WaveVectorEstimates {
    struct Entry {
        std::uint32_t b = 0;  // flat index m1*L_B + m2
        double v1 = 0.0, v2 = 0.0;
        double weight = 0.0;
    };

    std::size_t L_B = 0;
    double epsilon = 0.0;
    std::vector<std::vector<Entry>> per_tile;      // aligned with tiling tiles
    std::vector<std::uint8_t> relevant;            // L_B^2; 1 where any entry exists

    std::size_t entry_count() const;
    double total_weight() const;
    void write_csv(const std::filesystem::path& path) const;
};

// Sparse synchrosqueezed energy T_f(v, b) over cells
// D_v = [(n1-1/2)Δ, (n1+1/2)Δ) x [(n2-1/2)Δ, (n2+1/2)Δ).
struct SqueezeField {
    struct CellKey {
        std::int32_t n1 = 0, n2 = 0;
        std::uint32_t b = 0;
        bool operator==(const CellKey&) const = default;
    };
    struct CellKeyHash {
        std::size_t operator()(const CellKey& k) const {
            std::uint64_t h = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.n1)) << 32) |
                              static_cast<std::uint32_t>(k.n2);
            h ^= static_cast<std::uint64_t>(k.b) * 0x9e3779b97f4a7c15ull;
            h ^= h >> 33;
            h *= 0xff51afd7ed558ccdull;
            h ^= h >> 33;
            return static_cast<std::size_t>(h);
        }
    };

    double step = 1.0;  // Δ
    std::size_t L_B = 0;
    std::unordered_map<CellKey, double, CellKeyHash> mass;

    // Half-open cell rule: values exactly on the upper boundary belong to
    // the next cell.
    static std::int32_t cell_of(double v, double step);

    double total_mass() const;
    // sum of cell masses at each b (an L_B^2 heatmap of squeezed energy).
    std::vector<double> mass_by_position() const;
    void write_csv(const std::filesystem::path& path) const;
};

// Dense 2-vector field on the B grid with a defined-entry mask; used for
// mean estimates and for exact ground truth.
struct VectorField2 {
    std::size_t side = 0;
    std::vector<double> v1, v2;
    std::vector<std::uint8_t> defined;

    explicit VectorField2(std::size_t s = 0)
        : side(s), v1(s * s, 0.0), v2(s * s, 0.0), defined(s * s, 0) {}
};

// Relative-error map R(b) = |vm(b) - exact(b)| / |exact(b)| with the
// summary taken over pixels where exact is defined and nonzero; R is
// reported as zero where vm is undefined.
struct ErrorMap {
    std::size_t side = 0;
    std::vector<double> r;
    std::vector<std::uint8_t> valid;  // 0 marks per-pixel division errors
    double max_r = 0.0;
    double mean_r = 0.0;

    void write_csv(const std::filesystem::path& path) const;
};

// Per-tile streaming kernel behind estimate_wavevectors; weight_scale is
// the tile's hermitian_weight * (L_a/L_B)^2, applied to |W|^2.
std::vector<WaveVectorEstimates::Entry> estimate_tile(const TileCoefficients& tc,
                                                      std::size_t L_B, double eps,
                                                      double weight_scale);

// Threshold rule |W| >= sqrt(eps); requires gradients. Throws StateError
// when coeffs lacks them.
WaveVectorEstimates estimate_wavevectors(const CoefficientSet& coeffs, double eps);

// Stacks each estimate's weight into the cell containing its vector.
SqueezeField squeeze(const WaveVectorEstimates& est, double step);
void squeeze_into(SqueezeField& sq, const std::vector<WaveVectorEstimates::Entry>& entries);

// T-mass-weighted mean of cell-center vectors over cells with T >= delta;
// undefined where no cell passes.
VectorField2 mean_wavevector(const SqueezeField& sq, double delta);

ErrorMap relative_error(const VectorField2& vm, const VectorField2& exact);

}  // namespace ssct
