// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Tolerances are fixed here, not read from configuration.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "ssct/pipeline.hpp"
#include "ssct/presets.hpp"
#include "ssct/synth.hpp"

using namespace ssct;

namespace {

int g_failures = 0;

void report(const std::string& name, bool pass, const std::string& detail, double seconds) {
    std::printf("%s %-22s %s [%.1fs]\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str(),
                seconds);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

void criterion(const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
    const auto start = std::chrono::steady_clock::now();
    bool pass = false;
    std::string detail;
    try {
        auto [ok, text] = body();
        pass = ok;
        detail = text;
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report(name, pass, detail, seconds);
}

std::shared_ptr<const Tiling> make_tiling(std::size_t L, double s, double t) {
    TilingParams tp;
    tp.L = L;
    tp.s = s;
    tp.t = t;
    return std::make_shared<Tiling>(build_tiling(tp));
}

// --- criterion 1 & 2: tight frame and perfect reconstruction ---------------

std::pair<bool, std::string> frame_and_reconstruction(bool reconstruction) {
    double worst = 0.0;
    for (std::size_t L : {32u, 64u, 128u})
        for (double t : {0.875, 0.625}) {
            auto tiling = make_tiling(L, 0.625, t);
            for (std::uint64_t seed = 0; seed < 20; ++seed) {
                const SpatialField f = oracle::random_field(L, seed * 977 + L + (t < 0.7 ? 7 : 0));
                const CoefficientSet coeffs = forward(f, tiling);
                double err;
                if (reconstruction) {
                    err = oracle::rel_l2(transpose(coeffs), f);
                } else {
                    const double energy = f.energy();
                    err = std::abs(frame_energy(coeffs) - energy) / energy;
                }
                worst = std::max(worst, err);
            }
        }
    char buf[128];
    std::snprintf(buf, sizeof(buf), "worst rel err %.3e (bound 1e-10)", worst);
    return {worst <= 1e-10, buf};
}

// --- criterion 3: direct-summation oracle equivalence ----------------------

std::pair<bool, std::string> oracle_equivalence() {
    auto tiling = make_tiling(32, 0.625, 0.875);
    const SpatialField f = oracle::random_field(32, 4242);
    const SpectrumField fhat = oracle::dft2_direct(f);
    const CoefficientSet coeffs = gradient(f, tiling);

    double worst = 0.0;
    for (std::size_t t = 0; t < coeffs.tiles.size(); ++t) {
        const Tile& tile = tiling->tiles[t];
        const auto w = oracle::forward_tile_direct(fhat, tile, coeffs.L_B);
        const auto [g1, g2] = oracle::gradient_tile_direct(fhat, tile, coeffs.L_B);
        const double sw = std::max(oracle::max_abs(w), 1e-30);
        const double sg = std::max({oracle::max_abs(g1), oracle::max_abs(g2), 1e-30});
        worst = std::max(worst, oracle::max_abs_diff(coeffs.tiles[t].w, w) / sw);
        worst = std::max(worst, oracle::max_abs_diff(coeffs.tiles[t].grad1, g1) / sg);
        worst = std::max(worst, oracle::max_abs_diff(coeffs.tiles[t].grad2, g2) / sg);
    }
    const SpatialField back = transpose(coeffs);
    const SpatialField back_direct = oracle::transpose_direct(coeffs);
    worst = std::max(worst, oracle::rel_l2(back, back_direct));

    char buf[128];
    std::snprintf(buf, sizeof(buf), "worst rel dev %.3e (bound 1e-10)", worst);
    return {worst <= 1e-10, buf};
}

// --- criterion 4: Example 1 ------------------------------------------------

std::pair<bool, std::string> example1() {
    const RunConfig cfg = preset("example1");
    const SpatialField f = generate(cfg.generator, cfg.L, cfg.seed);
    DecomposeConfig dc = cfg.decompose;
    dc.tiling.L = cfg.L;
    const std::size_t side = resolve_coeff_side(build_tiling(dc.tiling), dc.coeff_side);
    const VectorField2 truth =
        component_truth(cfg.generator.components[0], side, cfg.generator.taper_margin);
    const EstimateResult res = estimate_field(f, dc, &truth);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "max R0 %.4f (bound 0.05), mean %.4f", res.error->max_r,
                  res.error->mean_r);
    return {res.error->max_r <= 0.05, buf};
}

// --- criterion 5: banded SSCT vs SSWPT --------------------------------------

std::pair<bool, std::string> banded_comparison() {
    const RunConfig cfg = preset("banded1");
    const SpatialField f = generate(cfg.generator, cfg.L, cfg.seed);
    double max_r[2];
    for (const bool wave_packet : {false, true}) {
        DecomposeConfig dc = cfg.decompose;
        dc.tiling.L = cfg.L;
        if (wave_packet) {
            dc.tiling.t = dc.tiling.s;
            dc.coeff_side = 0;
        }
        const std::size_t side = resolve_coeff_side(build_tiling(dc.tiling), dc.coeff_side);
        const VectorField2 truth = exact_wavevectors(cfg.generator.components[0].phase, side);
        const EstimateResult res = estimate_field(f, dc, &truth);
        max_r[wave_packet] = res.error->max_r;
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf), "ssct %.4f (bound 0.05), sswpt %.4f, ratio %.2f (bound 2)",
                  max_r[0], max_r[1], max_r[1] / max_r[0]);
    return {max_r[0] <= 0.05 && max_r[1] >= 2.0 * max_r[0], buf};
}

// --- criterion 6: Table 1 --------------------------------------------------

std::pair<bool, std::string> table1() {
    const RunConfig cfg = preset("snr_table");
    const SpatialField clean = generate(cfg.generator, cfg.L, cfg.seed);
    DecomposeConfig dc = cfg.decompose;
    dc.tiling.L = cfg.L;
    const std::size_t side = resolve_coeff_side(build_tiling(dc.tiling), dc.coeff_side);
    const VectorField2 truth = exact_wavevectors(cfg.generator.components[0].phase, side);

    std::vector<std::pair<double, double>> pairs;
    for (std::size_t i = 0; i < cfg.sweep->snr_db.size(); ++i)
        pairs.emplace_back(cfg.sweep->snr_db[i], cfg.sweep->delta[i]);
    const auto rows = snr_sweep(clean, truth, pairs, cfg.sweep->seeds, dc);

    const double paper[5] = {0.03, 0.03, 0.03, 0.045, 0.06};
    bool pass = true;
    std::string detail;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double cap = 2.0 * paper[i];
        if (rows[i].worst > cap) pass = false;
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%s%.3f/%.2f", i ? " " : "", rows[i].worst, cap);
        detail += buf;
    }
    // monotone trend: rows are ordered by decreasing SNR; the worst error
    // must not decrease as noise grows (0.005 slack absorbs seed wiggle)
    for (std::size_t i = 0; i + 1 < rows.size(); ++i)
        if (rows[i].worst > rows[i + 1].worst + 0.005) {
            pass = false;
            detail += " trend-violation";
            break;
        }
    return {pass, detail};
}

// --- criterion 7: clustering vs brute force --------------------------------

std::pair<bool, std::string> clustering_oracle() {
    std::mt19937_64 seeds(20260810);
    std::size_t checked = 0;
    for (int run = 0; run < 100; ++run) {
        const std::size_t n = 50 + static_cast<std::size_t>(seeds() % 451);
        std::mt19937_64 rng(seeds());
        std::uniform_real_distribution<double> ux(0.0, 1.0);
        std::uniform_real_distribution<double> ua(0.0, 64.0);
        std::uniform_real_distribution<double> ut(0.0, 2.0 * std::numbers::pi);
        std::vector<PhasePoint> pts;
        for (std::size_t i = 0; i < n; ++i) {
            PhasePoint p;
            p.x1 = ux(rng);
            p.x2 = ux(rng);
            p.a = ua(rng);
            // bias some angles to the wrap seam
            p.theta = (i % 5 == 0) ? std::fmod(ut(rng) * 0.02, 2.0 * std::numbers::pi) : ut(rng);
            p.mass = ux(rng) + 0.1;
            pts.push_back(p);
        }
        const AdjacencyParams params{0.03 + 0.07 * (run % 3), 0.1 + 0.15 * (run % 2),
                                     3.0 + static_cast<double>(run % 9)};
        const Clustering got = polar_cluster(pts, params);

        // transitive-closure reference
        std::vector<std::uint32_t> comp(n);
        for (std::size_t i = 0; i < n; ++i) comp[i] = static_cast<std::uint32_t>(i);
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                    if (adjacent(pts[i], pts[j], params) && comp[i] != comp[j]) {
                        const auto lo = std::min(comp[i], comp[j]);
                        const auto hi = std::max(comp[i], comp[j]);
                        for (auto& c : comp)
                            if (c == hi) c = lo;
                        changed = true;
                    }
        }
        std::map<std::uint32_t, std::uint32_t> fwd, rev;
        for (std::size_t i = 0; i < n; ++i) {
            auto [it, ins] = fwd.try_emplace(got.labels[i], comp[i]);
            if (!ins && it->second != comp[i]) return {false, "partition mismatch"};
            auto [jt, jns] = rev.try_emplace(comp[i], got.labels[i]);
            if (!jns && jt->second != got.labels[i]) return {false, "partition mismatch"};
        }

        // permutation invariance (exact)
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0u);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<PhasePoint> shuffled(n);
        for (std::size_t i = 0; i < n; ++i) shuffled[i] = pts[perm[i]];
        const Clustering again = polar_cluster(shuffled, params);
        for (std::size_t i = 0; i < n; ++i)
            if (again.labels[i] != got.labels[perm[i]]) return {false, "permutation variance"};
        ++checked;
    }
    return {checked == 100, "100 random sets (<=500 points) match, permutation invariant"};
}

// --- criterion 8: decomposition ---------------------------------------------

std::pair<bool, std::string> decomposition() {
    // (a) two plane waves
    const std::size_t L = 128;
    SpatialField waves = oracle::plane_wave(L, 32, 0);
    const SpatialField second = oracle::plane_wave(L, 0, 32);
    for (std::size_t i = 0; i < waves.values.size(); ++i) waves.values[i] += second.values[i];
    DecomposeConfig dc;
    dc.tiling.L = L;
    dc.epsilon = 1e-4;
    dc.cell_step = 1.0;
    dc.delta = 0.0;
    dc.adjacency = {0.1, std::numbers::pi / 8.0, 8.0};
    const ModeSet planes = decompose(waves, dc);
    if (planes.modes.size() != 2) return {false, "plane-wave mode count"};
    const SpatialField wa = oracle::plane_wave(L, 32, 0);
    const SpatialField wb = oracle::plane_wave(L, 0, 32);
    double err_a = std::min(oracle::rel_l2(planes.modes[0], wa), oracle::rel_l2(planes.modes[1], wa));
    double err_b = std::min(oracle::rel_l2(planes.modes[0], wb), oracle::rel_l2(planes.modes[1], wb));
    const double plane_err = std::max(err_a, err_b);

    // (b) example2 preset, noiseless
    const RunConfig cfg = preset("example2");
    const SpatialField f = generate(cfg.generator, cfg.L, cfg.seed);
    DecomposeConfig dc2 = cfg.decompose;
    dc2.tiling.L = cfg.L;
    const ModeSet ms = decompose(f, dc2);
    double comp_err = 1e9;
    bool two_modes = ms.modes.size() == 2;
    if (two_modes) {
        comp_err = 0.0;
        for (std::size_t k = 0; k < 2; ++k) {
            GeneratorSpec single;
            single.components = {cfg.generator.components[k]};
            single.taper_margin = cfg.generator.taper_margin;
            const SpatialField truth = generate(single, cfg.L, cfg.seed);
            const double e = std::min(oracle::rel_l2(ms.modes[0], truth),
                                      oracle::rel_l2(ms.modes[1], truth));
            comp_err = std::max(comp_err, e);
        }
    }

    // (c) exact-cover accounting at delta = 0: every thresholded
    // coefficient lands in some cluster, so nothing is discarded
    DecomposeConfig dc3 = dc;
    dc3.tiling.L = 32;
    dc3.adjacency = {0.05, 0.2, 4.0};
    const SpatialField rnd = oracle::random_field(32, 99);
    const ModeSet cover = decompose(rnd, dc3);
    const double cover_dev = std::abs(cover.discarded_energy) / cover.total_coefficient_energy;
    const double frame_dev =
        std::abs(cover.total_coefficient_energy - rnd.energy()) / rnd.energy();

    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "plane err %.2e (1e-6); example2 modes %zu err %.3f (0.15); cover dev %.2e (1e-10)",
                  plane_err, ms.modes.size(), comp_err, std::max(cover_dev, frame_dev));
    const bool pass = plane_err <= 1e-6 && two_modes && comp_err <= 0.15 &&
                      cover_dev <= 1e-10 && frame_dev <= 1e-10;
    return {pass, buf};
}

// --- criterion 9: in-run mass conservation and delta monotonicity -----------

std::pair<bool, std::string> mass_and_monotonicity() {
    // mass conservation is asserted inside every pipeline run (the squeeze
    // stage throws on violation); run the pipeline across deltas and check
    // the recovered energy never grows
    const RunConfig cfg = preset("smoke2");
    const SpatialField f = generate(cfg.generator, cfg.L, cfg.seed);
    DecomposeConfig dc = cfg.decompose;
    dc.tiling.L = cfg.L;
    double prev = std::numeric_limits<double>::infinity();
    std::size_t runs = 0;
    for (double delta : {0.0, 0.2, 1.0, 5.0}) {
        dc.delta = delta;
        const ModeSet ms = decompose(f, dc);
        double assigned = 0.0;
        for (double e : ms.mode_energies) assigned += e;
        if (assigned > prev * (1.0 + 1e-12)) return {false, "recovered energy grew with delta"};
        prev = assigned;
        ++runs;
    }
    return {runs == 4, "squeeze mass conserved in-run; recovered energy monotone in delta"};
}

}  // namespace

int main() {
    std::printf("ssct acceptance suite\n");
    const auto start = std::chrono::steady_clock::now();

    criterion("tight_frame", [] { return frame_and_reconstruction(false); });
    criterion("reconstruction", [] { return frame_and_reconstruction(true); });
    criterion("oracle_equivalence", oracle_equivalence);
    criterion("example1", example1);
    criterion("banded_comparison", banded_comparison);
    criterion("table1", table1);
    criterion("clustering", clustering_oracle);
    criterion("decomposition", decomposition);
    criterion("mass_monotonicity", mass_and_monotonicity);

    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%d criterion(s) failed, total %.1fs\n", g_failures, seconds);
    return g_failures == 0 ? 0 : 1;
}
