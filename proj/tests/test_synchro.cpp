#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>

#include "oracles.hpp"
#include "ssct/errors.hpp"
#include "ssct/synchro.hpp"

using namespace ssct;

namespace {

std::shared_ptr<const Tiling> make_tiling(std::size_t L) {
    TilingParams tp;
    tp.L = L;
    return std::make_shared<Tiling>(build_tiling(tp));
}

}  // namespace

TEST_CASE("plane-wave estimates equal the wave vector everywhere") {
    const std::size_t L = 64;
    auto tiling = make_tiling(L);
    const CoefficientSet coeffs = gradient(oracle::plane_wave(L, 16, 0), tiling);
    const WaveVectorEstimates est = estimate_wavevectors(coeffs, 1e-4);
    REQUIRE(est.entry_count() > 0);
    for (const auto& entries : est.per_tile)
        for (const auto& e : entries) {
            CHECK(std::abs(e.v1 - 16.0) < 1e-8);
            CHECK(std::abs(e.v2 - 0.0) < 1e-8);
        }
}

TEST_CASE("zero fields give empty estimate sets") {
    auto tiling = make_tiling(32);
    const CoefficientSet coeffs = gradient(SpatialField(32), tiling);
    const WaveVectorEstimates est = estimate_wavevectors(coeffs, 1e-4);
    CHECK(est.entry_count() == 0);
}

TEST_CASE("missing gradients raise a state error") {
    auto tiling = make_tiling(32);
    const CoefficientSet coeffs = forward(oracle::random_field(32, 2), tiling);
    CHECK_THROWS_AS(estimate_wavevectors(coeffs, 1e-4), StateError);
    CHECK_THROWS_AS(estimate_wavevectors(coeffs, 0.0), ConfigError);
}

TEST_CASE("two plane waves estimate per covering tile") {
    const std::size_t L = 64;
    auto tiling = make_tiling(L);
    SpatialField f = oracle::plane_wave(L, 16, 0);
    const SpatialField other = oracle::plane_wave(L, 0, 16);
    for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] += other.values[i];
    const CoefficientSet coeffs = gradient(f, tiling);
    const WaveVectorEstimates est = estimate_wavevectors(coeffs, 1e-4);
    for (std::size_t t = 0; t < est.per_tile.size(); ++t) {
        const Tile& tile = coeffs.tiling->tiles[t];
        const bool covers_a = tile.window_at(16, 0) > 0.0;
        const bool covers_b = tile.window_at(0, 16) > 0.0;
        if (covers_a == covers_b) continue;  // mixed or empty tiles are not clean cases
        for (const auto& e : est.per_tile[t]) {
            if (covers_a) {
                CHECK(std::abs(e.v1 - 16.0) < 1e-6);
                CHECK(std::abs(e.v2) < 1e-6);
            } else {
                CHECK(std::abs(e.v1) < 1e-6);
                CHECK(std::abs(e.v2 - 16.0) < 1e-6);
            }
        }
    }
}

TEST_CASE("low-frequency content never produces estimates") {
    const std::size_t L = 64;
    auto tiling = make_tiling(L);
    // |xi| = 1 lies inside the low-pass plateau (a_min/2 = 2)
    const CoefficientSet coeffs = gradient(oracle::plane_wave(L, 1, 0), tiling);
    const WaveVectorEstimates est = estimate_wavevectors(coeffs, 1e-4);
    CHECK(est.entry_count() == 0);
}

TEST_CASE("squeeze puts a plane wave's mass in one cell and conserves it") {
    const std::size_t L = 64;
    auto tiling = make_tiling(L);
    const SpatialField f = oracle::plane_wave(L, 16, 0);
    const CoefficientSet coeffs = gradient(f, tiling);
    const WaveVectorEstimates est = estimate_wavevectors(coeffs, 1e-12);
    const SqueezeField sq = squeeze(est, 4.0);
    for (const auto& [key, mass] : sq.mass) {
        CHECK(key.n1 == 4);
        CHECK(key.n2 == 0);
        CHECK(mass > 0.0);
    }
    CHECK(sq.total_mass() == doctest::Approx(f.energy()).epsilon(1e-6));
}

TEST_CASE("squeeze mass equals the thresholded estimate weight to 1e-12") {
    auto tiling = make_tiling(64);
    const CoefficientSet coeffs = gradient(oracle::random_field(64, 31), tiling);
    const WaveVectorEstimates est = estimate_wavevectors(coeffs, 1e-4);
    const SqueezeField sq = squeeze(est, 2.0);
    const double want = est.total_weight();
    CHECK(std::abs(sq.total_mass() - want) <= 1e-12 * want);
}

TEST_CASE("cell boundaries are half open") {
    CHECK(SqueezeField::cell_of(18.0, 4.0) == 5);   // upper boundary of cell 4 goes up
    CHECK(SqueezeField::cell_of(17.999999, 4.0) == 4);
    CHECK(SqueezeField::cell_of(-18.0, 4.0) == -4); // [-18, -14) belongs to cell -4
    CHECK(SqueezeField::cell_of(0.0, 4.0) == 0);

    SqueezeField sq;
    sq.step = 4.0;
    sq.L_B = 16;
    squeeze_into(sq, {{0, 18.0, 0.0, 1.0}});
    REQUIRE(sq.mass.size() == 1);
    CHECK(sq.mass.begin()->first.n1 == 5);
}

TEST_CASE("empty estimates squeeze to an empty field") {
    WaveVectorEstimates est;
    est.L_B = 8;
    const SqueezeField sq = squeeze(est, 1.0);
    CHECK(sq.mass.empty());
    CHECK(sq.total_mass() == 0.0);
}

TEST_CASE("mean wave-vector basics") {
    SqueezeField sq;
    sq.step = 1.0;
    sq.L_B = 4;

    SUBCASE("single cell gives its center with a full mask at that b") {
        sq.mass[{32, 0, 5}] = 2.5;
        const VectorField2 vm = mean_wavevector(sq, 0.0);
        CHECK(vm.defined[5] == 1);
        CHECK(vm.v1[5] == 32.0);
        CHECK(vm.v2[5] == 0.0);
        CHECK(vm.defined[0] == 0);
    }
    SUBCASE("delta above every mass masks the field") {
        sq.mass[{32, 0, 5}] = 2.5;
        const VectorField2 vm = mean_wavevector(sq, 3.0);
        for (std::uint8_t d : vm.defined) CHECK(d == 0);
    }
    SUBCASE("weighted average of two cells") {
        sq.mass[{32, 0, 7}] = 3.0;
        sq.mass[{36, 0, 7}] = 1.0;
        const VectorField2 vm = mean_wavevector(sq, 0.0);
        CHECK(vm.v1[7] == doctest::Approx(33.0));
        CHECK(vm.v2[7] == 0.0);
    }
}

TEST_CASE("raising delta weakly shrinks the defined mask") {
    auto tiling = make_tiling(64);
    const CoefficientSet coeffs = gradient(oracle::random_field(64, 77), tiling);
    const SqueezeField sq = squeeze(estimate_wavevectors(coeffs, 1e-4), 2.0);
    const VectorField2 lo = mean_wavevector(sq, 0.0);
    const VectorField2 hi = mean_wavevector(sq, 0.5);
    for (std::size_t i = 0; i < lo.defined.size(); ++i)
        if (hi.defined[i]) CHECK(lo.defined[i] == 1);
}

TEST_CASE("estimates are invariant under amplitude scaling") {
    const std::size_t L = 64;
    auto tiling = make_tiling(L);
    SpatialField f = oracle::random_field(L, 13);
    SpatialField scaled = f;
    for (cplx& z : scaled.values) z *= 3.7;
    const WaveVectorEstimates ea = estimate_wavevectors(gradient(f, tiling), 1e-4);
    const WaveVectorEstimates eb = estimate_wavevectors(gradient(scaled, tiling), 1e-4);
    for (std::size_t t = 0; t < ea.per_tile.size(); ++t) {
        std::size_t ia = 0, ib = 0;
        while (ia < ea.per_tile[t].size() && ib < eb.per_tile[t].size()) {
            const auto& a = ea.per_tile[t][ia];
            const auto& b = eb.per_tile[t][ib];
            if (a.b < b.b) { ++ia; continue; }
            if (b.b < a.b) { ++ib; continue; }
            CHECK(std::abs(a.v1 - b.v1) < 1e-10);
            CHECK(std::abs(a.v2 - b.v2) < 1e-10);
            CHECK(std::isfinite(a.v1));
            CHECK(std::isfinite(a.v2));
            ++ia;
            ++ib;
        }
    }
}

TEST_CASE("relative error map semantics") {
    VectorField2 exact(4);
    for (std::size_t i = 0; i < 16; ++i) {
        exact.v1[i] = 10.0;
        exact.v2[i] = 0.0;
        exact.defined[i] = 1;
    }
    SUBCASE("identical fields give zero error") {
        const ErrorMap em = relative_error(exact, exact);
        CHECK(em.max_r == 0.0);
        CHECK(em.mean_r == 0.0);
    }
    SUBCASE("a 1 percent scaling gives one percent error everywhere") {
        VectorField2 vm = exact;
        for (double& v : vm.v1) v *= 1.01;
        const ErrorMap em = relative_error(vm, exact);
        CHECK(em.max_r == doctest::Approx(0.01));
        CHECK(em.mean_r == doctest::Approx(0.01));
    }
    SUBCASE("masked vm entries report zero but still count") {
        VectorField2 vm = exact;
        vm.defined[3] = 0;
        for (double& v : vm.v1) v *= 1.01;
        const ErrorMap em = relative_error(vm, exact);
        CHECK(em.r[3] == 0.0);
        CHECK(em.valid[3] == 1);
        CHECK(em.max_r == doctest::Approx(0.01));
    }
    SUBCASE("zero exact vectors are flagged per pixel") {
        VectorField2 bad = exact;
        bad.v1[2] = 0.0;
        const ErrorMap em = relative_error(exact, bad);
        CHECK(em.valid[2] == 0);
    }
}
