#include "ssct/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "ssct/errors.hpp"
#include "ssct/parallel.hpp"
#include "ssct/synth.hpp"

namespace ssct {

namespace {

// Kahan-Neumaier accumulator; keeps energy comparisons exact to ~1 ulp of
// the total regardless of entry count and order.
struct CompensatedSum {
    double value = 0.0, comp = 0.0;
    void add(double x) {
        const double t = value + x;
        comp += (std::abs(value) >= std::abs(x)) ? (value - t) + x : (x - t) + value;
        value = t;
    }
    double get() const { return value + comp; }
};

// Shared first half of the pipeline: per-tile coefficients, thresholded
// estimates, and the squeezed energy field, with the total-mass identity
// verified in-run.
struct SqueezeStage {
    std::shared_ptr<const Tiling> tiling;
    std::size_t L_B = 0;
    SpectrumField fhat;
    std::vector<std::vector<WaveVectorEstimates::Entry>> entries;  // per tile
    std::vector<std::uint8_t> relevant;
    SqueezeField squeeze;
    double total_energy = 0.0;        // all coefficient energy, any magnitude
    double thresholded_energy = 0.0;  // entries only
};

SqueezeStage run_squeeze_stage(const SpatialField& f, const DecomposeConfig& cfg) {
    cfg.validate();
    f.validate();
    TilingParams tp = cfg.tiling;
    tp.L = f.L;

    SqueezeStage stage;
    stage.tiling = std::make_shared<Tiling>(build_tiling(tp));
    stage.L_B = resolve_coeff_side(*stage.tiling, cfg.coeff_side);
    if (tp.real_mode && !f.is_real)
        throw ConfigError("decompose: real_mode requires a real-valued input field");

    stage.fhat = dft2(f);
    const SpectrumField& fhat = stage.fhat;
    const std::size_t n_tiles = stage.tiling->tile_count();
    const std::size_t nb = stage.L_B * stage.L_B;
    stage.entries.resize(n_tiles);
    std::vector<double> tile_energy(n_tiles, 0.0);

    const double cell = 1.0 / static_cast<double>(nb);
    parallel_for(n_tiles, cfg.threads, [&](std::size_t t) {
        const Tile& tile = stage.tiling->tiles[t];
        const TileCoefficients tc = compute_tile(fhat, tile, stage.L_B, !tile.is_lowpass());
        const double hermw = (tp.real_mode && !tile.is_lowpass()) ? 2.0 : 1.0;
        const double scale = hermw * tile.L_a * tile.L_a * cell;
        double acc = 0.0;
        for (const cplx& z : tc.w) acc += std::norm(z);
        tile_energy[t] = scale * acc;
        if (!tile.is_lowpass())
            stage.entries[t] = estimate_tile(tc, stage.L_B, cfg.epsilon, scale);
    });

    stage.relevant.assign(nb, 0);
    stage.squeeze.step = cfg.resolved_step(f.L);
    stage.squeeze.L_B = stage.L_B;
    CompensatedSum entry_weight;
    for (std::size_t t = 0; t < n_tiles; ++t) {
        stage.total_energy += tile_energy[t];
        for (const auto& e : stage.entries[t]) {
            entry_weight.add(e.weight);
            stage.relevant[e.b] = 1;
        }
        squeeze_into(stage.squeeze, stage.entries[t]);
    }
    stage.thresholded_energy = entry_weight.get();

    const double total_mass = stage.squeeze.total_mass();
    const double ref = std::max(std::abs(stage.thresholded_energy), 1e-300);
    if (std::abs(total_mass - stage.thresholded_energy) > 1e-12 * ref)
        throw NumericalError("squeeze mass conservation violated: mass " +
                             std::to_string(total_mass) + " vs energy " +
                             std::to_string(stage.thresholded_energy));
    return stage;
}

SpatialField real_or_complex_inverse(const SpectrumField& accum, bool real_mode) {
    SpatialField out = idft2(accum);
    if (real_mode) {
        for (cplx& z : out.values) z = cplx(z.real(), 0.0);
        out.is_real = true;
    }
    return out;
}

}  // namespace

void DecomposeConfig::validate() const {
    if (epsilon <= 0.0) throw ConfigError("config: epsilon must be positive");
    if (cell_step < 0.0) throw ConfigError("config: cell step must be nonnegative");
    if (delta < 0.0) throw ConfigError("config: delta must be nonnegative");
    adjacency.validate();
}

double DecomposeConfig::resolved_step(std::size_t L) const {
    if (cell_step > 0.0) return cell_step;
    return std::max(1.0, static_cast<double>(L) / 128.0);
}

ModeSet decompose(const SpatialField& f, const DecomposeConfig& cfg) {
    SqueezeStage stage = run_squeeze_stage(f, cfg);
    const bool real_mode = stage.tiling->params.real_mode;
    const std::size_t L = f.L;
    const std::size_t nb = stage.L_B * stage.L_B;

    ModeSet out;
    out.squeeze = stage.squeeze;
    out.coeff_side = stage.L_B;
    out.tile_count = stage.tiling->tile_count();
    out.total_coefficient_energy = stage.total_energy;
    out.thresholded_energy = stage.thresholded_energy;

    // Step (iii): cluster the thresholded squeeze cells.
    ReducedClustering rc = reduce_then_cluster(stage.squeeze, cfg.delta, cfg.adjacency);
    std::size_t n_modes = rc.clustering.K;
    if (cfg.max_modes > 0) n_modes = std::min(n_modes, cfg.max_modes);
    out.report = cluster_report(rc.points, rc.clustering);

    std::unordered_map<SqueezeField::CellKey, std::uint32_t, SqueezeField::CellKeyHash> cell_label;
    cell_label.reserve(rc.points.size());
    for (std::size_t i = 0; i < rc.points.size(); ++i) {
        const std::uint32_t label = rc.clustering.labels[i];
        if (label >= 1 && label <= n_modes) cell_label.emplace(rc.points[i].origin, label);
    }

    if (stage.thresholded_energy == 0.0) out.warning_empty = true;

    // Assigned-energy bookkeeping in the same entry order as the
    // thresholded total, so the discarded bucket is exact.
    CompensatedSum assigned_weight;
    const double step_for_keys = stage.squeeze.step;
    for (std::size_t t = 0; t < stage.tiling->tile_count(); ++t) {
        if (stage.tiling->tiles[t].is_lowpass()) continue;
        for (const auto& e : stage.entries[t]) {
            SqueezeField::CellKey key{SqueezeField::cell_of(e.v1, step_for_keys),
                                      SqueezeField::cell_of(e.v2, step_for_keys), e.b};
            if (cell_label.find(key) != cell_label.end()) assigned_weight.add(e.weight);
        }
    }

    // Step (iv): restrict W to each cluster and apply the transpose. Per
    // tile the masked contributions are computed in parallel and folded in
    // tile order, so the result does not depend on the thread count.
    struct TilePart {
        // per mode: sparse spectrum updates (flat index, value)
        std::vector<std::vector<std::pair<std::size_t, cplx>>> by_mode;
        std::vector<double> mode_energy;
        std::vector<std::pair<std::size_t, cplx>> lowpass;
    };
    const std::size_t n_tiles = stage.tiling->tile_count();
    std::vector<TilePart> parts(n_tiles);
    const SpectrumField& fhat = stage.fhat;
    const double step = stage.squeeze.step;

    parallel_for(n_tiles, cfg.threads, [&](std::size_t t) {
        const Tile& tile = stage.tiling->tiles[t];
        TilePart& part = parts[t];
        const TileCoefficients tc = compute_tile(fhat, tile, stage.L_B, false);

        auto collect = [&](const std::uint8_t* mask, std::vector<std::pair<std::size_t, cplx>>& dst) {
            SpectrumField local(L);
            accumulate_tile_transpose(tile, stage.L_B, tc.w, mask, local);
            dst.reserve(tile.n1 * tile.n2);
            for (std::size_t i1 = 0; i1 < tile.n1; ++i1)
                for (std::size_t i2 = 0; i2 < tile.n2; ++i2) {
                    const std::int64_t x1 = tile.lo1 + static_cast<std::int64_t>(i1);
                    const std::int64_t x2 = tile.lo2 + static_cast<std::int64_t>(i2);
                    const cplx v = local.at(x1, x2);
                    if (v != cplx(0.0, 0.0))
                        dst.emplace_back(local.index_of(x1) * L + local.index_of(x2), v);
                }
        };

        if (tile.is_lowpass()) {
            collect(nullptr, part.lowpass);
            return;
        }
        if (n_modes == 0) return;

        part.by_mode.resize(n_modes);
        part.mode_energy.assign(n_modes, 0.0);
        std::vector<std::vector<std::uint8_t>> masks;
        std::vector<std::uint32_t> used;  // 1-based labels present in this tile
        for (const auto& e : stage.entries[t]) {
            SqueezeField::CellKey key{SqueezeField::cell_of(e.v1, step),
                                      SqueezeField::cell_of(e.v2, step), e.b};
            const auto it = cell_label.find(key);
            if (it == cell_label.end()) continue;
            const std::uint32_t label = it->second;
            auto pos = std::find(used.begin(), used.end(), label);
            if (pos == used.end()) {
                used.push_back(label);
                masks.emplace_back(nb, 0);
                pos = std::prev(used.end());
            }
            masks[static_cast<std::size_t>(pos - used.begin())][e.b] = 1;
            part.mode_energy[label - 1] += e.weight;
        }
        for (std::size_t u = 0; u < used.size(); ++u)
            collect(masks[u].data(), part.by_mode[used[u] - 1]);
    });

    // Fixed-order fold into per-mode spectra.
    std::vector<SpectrumField> accum(n_modes, SpectrumField(L));
    SpectrumField lowpass_accum(L);
    out.mode_energies.assign(n_modes, 0.0);
    const double band_factor = real_mode ? 2.0 : 1.0;
    for (const TilePart& part : parts) {
        for (const auto& [idx, v] : part.lowpass) lowpass_accum.values[idx] += v;
        for (std::size_t k = 0; k < part.by_mode.size(); ++k)
            for (const auto& [idx, v] : part.by_mode[k]) accum[k].values[idx] += band_factor * v;
        for (std::size_t k = 0; k < part.mode_energy.size(); ++k)
            out.mode_energies[k] += part.mode_energy[k];
    }

    out.modes.reserve(n_modes);
    for (std::size_t k = 0; k < n_modes; ++k)
        out.modes.push_back(real_or_complex_inverse(accum[k], real_mode));
    out.residual_lowpass = real_or_complex_inverse(lowpass_accum, real_mode);

    out.residual = f;
    for (const SpatialField& mode : out.modes)
        for (std::size_t i = 0; i < out.residual.values.size(); ++i)
            out.residual.values[i] -= mode.values[i];
    out.residual.is_real = real_mode || (f.is_real && out.modes.empty());

    out.discarded_energy = stage.thresholded_energy - assigned_weight.get();
    return out;
}

EstimateResult estimate_field(const SpatialField& f, const DecomposeConfig& cfg,
                              const VectorField2* truth, bool keep_estimates) {
    SqueezeStage stage = run_squeeze_stage(f, cfg);

    EstimateResult out;
    out.coeff_side = stage.L_B;
    out.tile_count = stage.tiling->tile_count();
    out.relevant = stage.relevant;
    out.thresholded_energy = stage.thresholded_energy;
    out.warning_empty = stage.thresholded_energy == 0.0;
    out.mean_vectors = mean_wavevector(stage.squeeze, cfg.delta);
    if (keep_estimates) {
        WaveVectorEstimates est;
        est.L_B = stage.L_B;
        est.epsilon = cfg.epsilon;
        est.per_tile = std::move(stage.entries);
        est.relevant = stage.relevant;
        out.estimates = std::move(est);
    }
    out.squeeze = std::move(stage.squeeze);

    if (truth) {
        if (truth->side != stage.L_B)
            throw DimensionError("estimate_field: ground truth side " +
                                 std::to_string(truth->side) + " does not match L_B " +
                                 std::to_string(stage.L_B));
        out.error = relative_error(out.mean_vectors, *truth);
    }
    return out;
}

std::vector<SnrSweepRow> snr_sweep(const SpatialField& clean, const VectorField2& truth,
                                   const std::vector<std::pair<double, double>>& snr_delta_pairs,
                                   const std::vector<std::uint64_t>& seeds,
                                   const DecomposeConfig& cfg) {
    std::vector<SnrSweepRow> rows;
    rows.reserve(snr_delta_pairs.size());
    for (const auto& [snr_db, delta] : snr_delta_pairs) {
        SnrSweepRow row;
        row.snr_db = snr_db;
        row.delta = delta;
        DecomposeConfig run_cfg = cfg;
        run_cfg.delta = delta;
        for (const std::uint64_t seed : seeds) {
            const SpatialField noisy = add_noise(clean, snr_db, seed);
            const EstimateResult res = estimate_field(noisy, run_cfg, &truth);
            row.max_r.push_back(res.error->max_r);
            if (std::isinf(snr_db)) break;  // noiseless runs are seed-independent
        }
        row.worst = *std::max_element(row.max_r.begin(), row.max_r.end());
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace ssct
