#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>

#include "oracles.hpp"
#include "ssct/errors.hpp"
#include "ssct/transform.hpp"

using namespace ssct;

namespace {

std::shared_ptr<const Tiling> make_tiling(std::size_t L, double s = 0.625, double t = 0.875,
                                          bool real_mode = false) {
    TilingParams tp;
    tp.L = L;
    tp.s = s;
    tp.t = t;
    tp.real_mode = real_mode;
    return std::make_shared<Tiling>(build_tiling(tp));
}

}  // namespace

TEST_CASE("forward matches the direct (D1) summation at L = 32") {
    auto tiling = make_tiling(32);
    const SpatialField f = oracle::random_field(32, 41);
    const CoefficientSet coeffs = forward(f, tiling);
    const SpectrumField fhat = oracle::dft2_direct(f);
    for (std::size_t t = 0; t < coeffs.tiles.size(); ++t) {
        const auto direct = oracle::forward_tile_direct(fhat, tiling->tiles[t], coeffs.L_B);
        const double scale = std::max(oracle::max_abs(direct), 1e-30);
        CHECK(oracle::max_abs_diff(coeffs.tiles[t].w, direct) / scale < 1e-10);
    }
}

TEST_CASE("gradient matches the direct (D3) summation at L = 32") {
    auto tiling = make_tiling(32);
    const SpatialField f = oracle::random_field(32, 43);
    const CoefficientSet coeffs = gradient(f, tiling);
    const SpectrumField fhat = oracle::dft2_direct(f);
    for (std::size_t t = 0; t < coeffs.tiles.size(); t += 7) {
        const auto [g1, g2] = oracle::gradient_tile_direct(fhat, tiling->tiles[t], coeffs.L_B);
        const double scale = std::max({oracle::max_abs(g1), oracle::max_abs(g2), 1e-30});
        CHECK(oracle::max_abs_diff(coeffs.tiles[t].grad1, g1) / scale < 1e-10);
        CHECK(oracle::max_abs_diff(coeffs.tiles[t].grad2, g2) / scale < 1e-10);
    }
}

TEST_CASE("transpose matches the direct (D2) summation at L = 32") {
    auto tiling = make_tiling(32);
    const SpatialField f = oracle::random_field(32, 47);
    const CoefficientSet coeffs = forward(f, tiling);
    const SpatialField fast = transpose(coeffs);
    const SpatialField direct = oracle::transpose_direct(coeffs);
    CHECK(oracle::rel_l2(fast, direct) < 1e-10);
}

TEST_CASE("plane-wave coefficients follow the closed form") {
    const std::size_t L = 128;
    const std::int64_t k1 = 32, k2 = 0;
    auto tiling = make_tiling(L);
    const SpatialField f = oracle::plane_wave(L, k1, k2);
    const CoefficientSet coeffs = forward(f, tiling);
    const std::size_t L_B = coeffs.L_B;
    for (std::size_t t = 0; t < coeffs.tiles.size(); ++t) {
        const Tile& tile = tiling->tiles[t];
        const double g = tile.window_at(k1, k2);
        for (std::size_t m1 = 0; m1 < L_B; m1 += 37)
            for (std::size_t m2 = 0; m2 < L_B; m2 += 41) {
                const double phase = oracle::kTwoPi *
                                     (static_cast<double>(m1) * static_cast<double>(k1) +
                                      static_cast<double>(m2) * static_cast<double>(k2)) /
                                     static_cast<double>(L_B);
                const cplx expect = (static_cast<double>(L) / tile.L_a) * g *
                                    cplx(std::cos(phase), std::sin(phase));
                CHECK(std::abs(coeffs.tiles[t].w[m1 * L_B + m2] - expect) < 1e-8);
            }
    }
}

TEST_CASE("zero fields give zero coefficients and gradients") {
    auto tiling = make_tiling(32);
    const SpatialField f(32);
    const CoefficientSet coeffs = gradient(f, tiling);
    for (const TileCoefficients& tc : coeffs.tiles) {
        CHECK(oracle::max_abs(tc.w) == 0.0);
        CHECK(oracle::max_abs(tc.grad1) == 0.0);
        CHECK(oracle::max_abs(tc.grad2) == 0.0);
    }
}

TEST_CASE("tight frame and perfect reconstruction across sizes and geometries") {
    for (std::size_t L : {32u, 64u, 128u})
        for (double t : {0.875, 0.625}) {
            auto tiling = make_tiling(L, 0.625, t);
            for (std::uint64_t seed : {1u, 2u}) {
                const SpatialField f = oracle::random_field(L, seed * 100 + L);
                const CoefficientSet coeffs = forward(f, tiling);
                const double energy = f.energy();
                CHECK(std::abs(frame_energy(coeffs) - energy) / energy < 1e-10);
                CHECK(oracle::rel_l2(transpose(coeffs), f) < 1e-10);
            }
        }
}

TEST_CASE("real_mode halves the tiles and reconstructs real fields exactly") {
    for (std::size_t L : {32u, 64u}) {
        auto tiling = make_tiling(L, 0.625, 0.875, /*real_mode=*/true);
        const SpatialField f = oracle::random_field(L, 71 + L, /*real_valued=*/true);
        const CoefficientSet coeffs = forward(f, tiling);
        const double energy = f.energy();
        CHECK(std::abs(frame_energy(coeffs) - energy) / energy < 1e-10);
        const SpatialField back = transpose(coeffs);
        CHECK(back.is_real);
        CHECK(oracle::rel_l2(back, f) < 1e-10);
    }
}

TEST_CASE("real_mode rejects complex-valued inputs") {
    auto tiling = make_tiling(32, 0.625, 0.875, true);
    const SpatialField f = oracle::random_field(32, 5);
    CHECK_THROWS_AS(forward(f, tiling), ConfigError);
}

TEST_CASE("gradient of a plane wave is 2 pi i xi0 times the coefficient") {
    const std::size_t L = 64;
    const std::int64_t k1 = 16, k2 = -8;
    auto tiling = make_tiling(L);
    const SpatialField f = oracle::plane_wave(L, k1, k2);
    const CoefficientSet coeffs = gradient(f, tiling);
    const double freq_scale = oracle::kTwoPi * std::hypot(double(k1), double(k2));
    for (std::size_t t = 0; t < coeffs.tiles.size(); ++t) {
        const TileCoefficients& tc = coeffs.tiles[t];
        const double scale = freq_scale * std::max(oracle::max_abs(tc.w), 1e-30);
        for (std::size_t m = 0; m < tc.w.size(); ++m) {
            if (std::abs(tc.w[m]) <= 1e-8) continue;
            const cplx j(0.0, oracle::kTwoPi);
            CHECK(std::abs(tc.grad1[m] - j * static_cast<double>(k1) * tc.w[m]) / scale < 1e-10);
            CHECK(std::abs(tc.grad2[m] - j * static_cast<double>(k2) * tc.w[m]) / scale < 1e-10);
        }
    }
}

TEST_CASE("an all-false mask reconstructs the zero field") {
    auto tiling = make_tiling(32);
    const SpatialField f = oracle::random_field(32, 3);
    const CoefficientSet coeffs = forward(f, tiling);
    std::vector<std::vector<std::uint8_t>> mask(coeffs.tiles.size(),
                                                std::vector<std::uint8_t>(coeffs.L_B * coeffs.L_B, 0));
    const SpatialField out = transpose(coeffs, &mask);
    double peak = 0.0;
    for (const cplx& z : out.values) peak = std::max(peak, std::abs(z));
    CHECK(peak == 0.0);
}

TEST_CASE("masking the tiles covering one frequency extracts that plane wave") {
    const std::size_t L = 64;
    auto tiling = make_tiling(L);
    SpatialField f = oracle::plane_wave(L, 16, 0);
    const SpatialField other = oracle::plane_wave(L, 0, 16);
    for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] += other.values[i];

    const CoefficientSet coeffs = forward(f, tiling);
    std::vector<std::vector<std::uint8_t>> mask(coeffs.tiles.size());
    for (std::size_t t = 0; t < coeffs.tiles.size(); ++t) {
        const bool keep = tiling->tiles[t].window_at(16, 0) > 0.0;
        mask[t].assign(coeffs.L_B * coeffs.L_B, keep ? 1 : 0);
    }
    const SpatialField got = transpose(coeffs, &mask);
    const SpatialField expect = oracle::plane_wave(L, 16, 0);
    CHECK(oracle::rel_l2(got, expect) < 1e-8);
}

TEST_CASE("frame energy of zero coefficients vanishes and scales quadratically") {
    auto tiling = make_tiling(32);
    SpatialField f = oracle::random_field(32, 9);
    const CoefficientSet coeffs = forward(f, tiling);
    const double base = frame_energy(coeffs);
    for (cplx& z : f.values) z *= 2.0;
    const CoefficientSet doubled = forward(f, tiling);
    CHECK(frame_energy(doubled) == doctest::Approx(4.0 * base).epsilon(1e-12));
    CoefficientSet zero = coeffs;
    for (TileCoefficients& tc : zero.tiles) std::fill(tc.w.begin(), tc.w.end(), cplx(0.0, 0.0));
    CHECK(frame_energy(zero) == 0.0);
}

TEST_CASE("translation covariance") {
    const std::size_t L = 32;
    auto tiling = make_tiling(L);

    SUBCASE("one-step shift with L_B = L moves coefficients without a phase") {
        const SpatialField f = oracle::random_field(L, 55);
        SpatialField shifted(L);
        for (std::size_t n1 = 0; n1 < L; ++n1)
            for (std::size_t n2 = 0; n2 < L; ++n2)
                shifted.at(n1, n2) = f.at((n1 + L - 1) % L, n2);
        const CoefficientSet a = forward(f, tiling, L);
        const CoefficientSet b = forward(shifted, tiling, L);
        for (std::size_t t = 0; t < a.tiles.size(); ++t) {
            double worst = 0.0;
            for (std::size_t m1 = 0; m1 < L; ++m1)
                for (std::size_t m2 = 0; m2 < L; ++m2)
                    worst = std::max(worst, std::abs(b.tiles[t].w[m1 * L + m2] -
                                                     a.tiles[t].w[((m1 + L - 1) % L) * L + m2]));
            const double scale = std::max(oracle::max_abs(a.tiles[t].w), 1e-30);
            CHECK(worst / scale < 1e-10);
        }
    }

    SUBCASE("L/L_B-step shifts circularly shift the magnitude field") {
        const SpatialField f = oracle::random_field(L, 56);
        const CoefficientSet a = forward(f, tiling);
        const std::size_t L_B = a.L_B;
        const std::size_t step = L / L_B;
        REQUIRE(step * L_B == L);
        SpatialField shifted(L);
        for (std::size_t n1 = 0; n1 < L; ++n1)
            for (std::size_t n2 = 0; n2 < L; ++n2)
                shifted.at(n1, n2) = f.at((n1 + L - step) % L, n2);
        const CoefficientSet b = forward(shifted, tiling);
        for (std::size_t t = 0; t < a.tiles.size(); ++t) {
            double worst = 0.0;
            for (std::size_t m1 = 0; m1 < L_B; ++m1)
                for (std::size_t m2 = 0; m2 < L_B; ++m2)
                    worst = std::max(worst,
                                     std::abs(std::abs(b.tiles[t].w[m1 * L_B + m2]) -
                                              std::abs(a.tiles[t].w[((m1 + L_B - 1) % L_B) * L_B + m2])));
            const double scale = std::max(oracle::max_abs(a.tiles[t].w), 1e-30);
            CHECK(worst / scale < 1e-10);
        }
    }
}

TEST_CASE("a too-small coefficient grid is rejected naming the offending tile") {
    auto tiling = make_tiling(64);
    const SpatialField f = oracle::random_field(64, 1);
    try {
        forward(f, tiling, 8);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("tile") != std::string::npos);
    }
}

TEST_CASE("threaded forward and transpose are bitwise identical to serial") {
    auto tiling = make_tiling(64);
    const SpatialField f = oracle::random_field(64, 123);
    const CoefficientSet serial = forward(f, tiling, 0, 1);
    const CoefficientSet threaded = forward(f, tiling, 0, 4);
    for (std::size_t t = 0; t < serial.tiles.size(); ++t)
        CHECK(std::memcmp(serial.tiles[t].w.data(), threaded.tiles[t].w.data(),
                          serial.tiles[t].w.size() * sizeof(cplx)) == 0);
    const SpatialField r1 = transpose(serial, nullptr, 1);
    const SpatialField r4 = transpose(threaded, nullptr, 4);
    CHECK(std::memcmp(r1.values.data(), r4.values.data(), r1.values.size() * sizeof(cplx)) == 0);
}
