#include "ssct/transform.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "ssct/errors.hpp"
#include "ssct/fft.hpp"
#include "ssct/parallel.hpp"

namespace ssct {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t wrap_mod(std::int64_t v, std::size_t n) {
    const auto m = static_cast<std::int64_t>(n);
    return static_cast<std::size_t>(((v % m) + m) % m);
}

void check_coeffs(const CoefficientSet& coeffs) {
    if (!coeffs.tiling) throw StateError("coefficient set has no tiling");
    if (coeffs.tiles.size() != coeffs.tiling->tile_count())
        throw DimensionError("coefficient set does not match its tiling");
}

}  // namespace

double CoefficientSet::hermitian_weight(std::size_t tile_index) const {
    if (!tiling->params.real_mode) return 1.0;
    return tiling->tiles[tile_index].is_lowpass() ? 1.0 : 2.0;
}

std::size_t resolve_coeff_side(const Tiling& tiling, std::size_t override_side) {
    const std::size_t need = tiling.max_box_extent();
    if (override_side > 0) {
        if (override_side < need) {
            for (std::size_t i = 0; i < tiling.tiles.size(); ++i) {
                const Tile& tile = tiling.tiles[i];
                if (std::max(tile.n1, tile.n2) > override_side)
                    throw ConfigError(
                        "L_B=" + std::to_string(override_side) + " cannot hold tile " +
                        std::to_string(i) + " (a=" + std::to_string(tile.a) +
                        ", theta=" + std::to_string(tile.theta) + ", box " +
                        std::to_string(tile.n1) + "x" + std::to_string(tile.n2) + ")");
            }
        }
        return override_side;
    }
    const double lt = std::pow(static_cast<double>(tiling.params.L), tiling.params.t);
    std::size_t side = std::bit_ceil(static_cast<std::size_t>(std::ceil(lt)));
    while (side < need) side *= 2;
    return side;
}

TileCoefficients compute_tile(const SpectrumField& fhat, const Tile& tile, std::size_t L_B,
                              bool with_gradient) {
    TileCoefficients out;
    const std::size_t nb = L_B * L_B;
    out.w.assign(nb, cplx(0.0, 0.0));
    if (with_gradient) {
        out.grad1.assign(nb, cplx(0.0, 0.0));
        out.grad2.assign(nb, cplx(0.0, 0.0));
    }

    for (std::size_t i1 = 0; i1 < tile.n1; ++i1) {
        const std::int64_t x1 = tile.lo1 + static_cast<std::int64_t>(i1);
        const std::size_t q1 = wrap_mod(x1, L_B);
        for (std::size_t i2 = 0; i2 < tile.n2; ++i2) {
            const double g = tile.window[i1 * tile.n2 + i2];
            if (g == 0.0) continue;
            const std::int64_t x2 = tile.lo2 + static_cast<std::int64_t>(i2);
            const cplx v = g * fhat.at(x1, x2);
            const std::size_t q = q1 * L_B + wrap_mod(x2, L_B);
            out.w[q] += v;
            if (with_gradient) {
                const cplx jv(-v.imag() * kTwoPi, v.real() * kTwoPi);  // 2πi v
                out.grad1[q] += jv * static_cast<double>(x1);
                out.grad2[q] += jv * static_cast<double>(x2);
            }
        }
    }

    const double inv_la = 1.0 / tile.L_a;
    fft::backward2d(out.w.data(), L_B);
    for (cplx& z : out.w) z *= inv_la;
    if (with_gradient) {
        fft::backward2d(out.grad1.data(), L_B);
        fft::backward2d(out.grad2.data(), L_B);
        for (cplx& z : out.grad1) z *= inv_la;
        for (cplx& z : out.grad2) z *= inv_la;
    }
    return out;
}

void accumulate_tile_transpose(const Tile& tile, std::size_t L_B, const std::vector<cplx>& w,
                               const std::uint8_t* mask, SpectrumField& accum) {
    const std::size_t nb = L_B * L_B;
    if (w.size() != nb) throw DimensionError("tile coefficient array does not match L_B");

    std::vector<cplx> buf(nb);
    if (mask) {
        for (std::size_t i = 0; i < nb; ++i) buf[i] = mask[i] ? w[i] : cplx(0.0, 0.0);
    } else {
        buf = w;
    }
    fft::forward2d(buf.data(), L_B);

    const double scale = tile.L_a / static_cast<double>(nb);
    for (std::size_t i1 = 0; i1 < tile.n1; ++i1) {
        const std::int64_t x1 = tile.lo1 + static_cast<std::int64_t>(i1);
        const std::size_t q1 = wrap_mod(x1, L_B);
        for (std::size_t i2 = 0; i2 < tile.n2; ++i2) {
            const double g = tile.window[i1 * tile.n2 + i2];
            if (g == 0.0) continue;
            const std::int64_t x2 = tile.lo2 + static_cast<std::int64_t>(i2);
            accum.at(x1, x2) += scale * g * buf[q1 * L_B + wrap_mod(x2, L_B)];
        }
    }
}

namespace {

CoefficientSet run_forward(const SpatialField& f, std::shared_ptr<const Tiling> tiling,
                           std::size_t L_B, bool with_gradient, unsigned threads) {
    if (!tiling) throw StateError("forward: null tiling");
    f.validate();
    if (f.L != tiling->params.L)
        throw DimensionError("forward: field side does not match the tiling");
    if (tiling->params.real_mode && !f.is_real)
        throw ConfigError("forward: real_mode tiling requires a real-valued field");

    CoefficientSet coeffs;
    coeffs.tiling = std::move(tiling);
    coeffs.L_B = resolve_coeff_side(*coeffs.tiling, L_B);
    coeffs.has_gradient = with_gradient;
    coeffs.tiles.resize(coeffs.tiling->tile_count());

    const SpectrumField fhat = dft2(f);
    const std::size_t side = coeffs.L_B;
    parallel_for(coeffs.tiles.size(), threads, [&](std::size_t i) {
        coeffs.tiles[i] = compute_tile(fhat, coeffs.tiling->tiles[i], side, with_gradient);
    });
    return coeffs;
}

}  // namespace

CoefficientSet forward(const SpatialField& f, std::shared_ptr<const Tiling> tiling,
                       std::size_t L_B, unsigned threads) {
    return run_forward(f, std::move(tiling), L_B, false, threads);
}

CoefficientSet gradient(const SpatialField& f, std::shared_ptr<const Tiling> tiling,
                        std::size_t L_B, unsigned threads) {
    return run_forward(f, std::move(tiling), L_B, true, threads);
}

SpatialField transpose(const CoefficientSet& coeffs,
                       const std::vector<std::vector<std::uint8_t>>* mask, unsigned threads) {
    check_coeffs(coeffs);
    const Tiling& tiling = *coeffs.tiling;
    const std::size_t nb = coeffs.L_B * coeffs.L_B;
    if (mask) {
        if (mask->size() != coeffs.tiles.size())
            throw DimensionError("transpose: mask tile count mismatch");
        for (const auto& m : *mask)
            if (m.size() != nb) throw DimensionError("transpose: mask entry size mismatch");
    }

    // Per-tile contributions are computed in parallel as sparse frequency
    // updates, then folded in tile order so sums are independent of the
    // thread count.
    struct Contribution {
        std::vector<std::pair<std::size_t, cplx>> entries;  // flat spectrum index
    };
    std::vector<Contribution> parts(coeffs.tiles.size());
    const std::size_t L = tiling.params.L;
    parallel_for(coeffs.tiles.size(), threads, [&](std::size_t i) {
        SpectrumField local(L);
        const std::uint8_t* m = mask ? (*mask)[i].data() : nullptr;
        accumulate_tile_transpose(tiling.tiles[i], coeffs.L_B, coeffs.tiles[i].w, m, local);
        const Tile& tile = tiling.tiles[i];
        auto& entries = parts[i].entries;
        entries.reserve(tile.n1 * tile.n2);
        for (std::size_t i1 = 0; i1 < tile.n1; ++i1)
            for (std::size_t i2 = 0; i2 < tile.n2; ++i2) {
                const std::int64_t x1 = tile.lo1 + static_cast<std::int64_t>(i1);
                const std::int64_t x2 = tile.lo2 + static_cast<std::int64_t>(i2);
                const cplx v = local.at(x1, x2);
                if (v != cplx(0.0, 0.0))
                    entries.emplace_back(local.index_of(x1) * L + local.index_of(x2), v);
            }
    });

    const bool real_mode = tiling.params.real_mode;
    SpectrumField accum(L);
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const double factor = real_mode && !tiling.tiles[i].is_lowpass() ? 2.0 : 1.0;
        for (const auto& [idx, v] : parts[i].entries) accum.values[idx] += factor * v;
    }

    SpatialField out = idft2(accum);
    if (real_mode) {
        for (cplx& z : out.values) z = cplx(z.real(), 0.0);
        out.is_real = true;
    }
    return out;
}

double frame_energy(const CoefficientSet& coeffs) {
    check_coeffs(coeffs);
    const double cell = 1.0 / (static_cast<double>(coeffs.L_B) * static_cast<double>(coeffs.L_B));
    double total = 0.0;
    for (std::size_t i = 0; i < coeffs.tiles.size(); ++i) {
        const Tile& tile = coeffs.tiling->tiles[i];
        double acc = 0.0;
        for (const cplx& z : coeffs.tiles[i].w) acc += std::norm(z);
        const double la_over_lb = tile.L_a * tile.L_a * cell;
        total += coeffs.hermitian_weight(i) * la_over_lb * acc;
    }
    return total;
}

}  // namespace ssct
