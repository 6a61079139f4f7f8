#pragma once

#include <optional>
#include <vector>

#include "ssct/cluster.hpp"
#include "ssct/synchro.hpp"
#include "ssct/transform.hpp"

namespace ssct {

struct DecomposeConfig {
    TilingParams tiling;
    std::size_t coeff_side = 0;  // L_B override; 0 resolves the default
    double epsilon = 1e-4;       // coefficient threshold, |W| >= sqrt(eps)
    double cell_step = 0.0;      // Δ; 0 resolves to max(1, L/128)
    double delta = 0.0;          // squeeze-mass threshold for clustering/means
    AdjacencyParams adjacency;
    std::size_t max_modes = 0;  // 0 = unlimited
    unsigned threads = 1;

    void validate() const;
    double resolved_step(std::size_t L) const;
};

struct ModeSet {
    std::vector<SpatialField> modes;  // cluster order, mass-descending
    SpatialField residual;            // input minus the sum of modes
    SpatialField residual_lowpass;    // low-pass reconstruction inside the residual
    std::vector<ClusterReportRow> report;
    SqueezeField squeeze;
    std::vector<double> mode_energies;      // coefficient energy per mode
    double total_coefficient_energy = 0.0;  // = ||f||^2 by the tight frame
    double thresholded_energy = 0.0;        // energy of |W| >= sqrt(eps)
    double discarded_energy = 0.0;          // thresholded but assigned to no mode
    std::size_t coeff_side = 0;
    std::size_t tile_count = 0;
    bool warning_empty = false;  // nothing above threshold; modes empty
};

// Four-step decomposition: transform (with gradients), synchrosqueeze,
// polar clustering with the two-stage reduction, masked transpose per
// cluster. Low-pass content stays in the residual.
ModeSet decompose(const SpatialField& f, const DecomposeConfig& cfg);

struct EstimateResult {
    VectorField2 mean_vectors;
    SqueezeField squeeze;
    std::vector<std::uint8_t> relevant;  // b with any thresholded coefficient
    std::optional<ErrorMap> error;       // present when ground truth was given
    std::optional<WaveVectorEstimates> estimates;  // only when requested
    double thresholded_energy = 0.0;
    std::size_t coeff_side = 0;
    std::size_t tile_count = 0;
    bool warning_empty = false;
};

// Steps (i)-(ii) plus the thresholded mean estimate v^{m,delta}; when
// ground truth N grad phi is supplied the R_delta(b) map is attached.
// keep_estimates retains the per-coefficient estimates for export.
EstimateResult estimate_field(const SpatialField& f, const DecomposeConfig& cfg,
                              const VectorField2* truth = nullptr, bool keep_estimates = false);

struct SnrSweepRow {
    double snr_db = 0.0;
    double delta = 0.0;
    std::vector<double> max_r;  // one per seed
    double worst = 0.0;
};

// For each (snr_db, delta) pair and each seed: add calibrated noise to the
// clean field, estimate, and record max R_delta over the relevant mask.
std::vector<SnrSweepRow> snr_sweep(const SpatialField& clean, const VectorField2& truth,
                                   const std::vector<std::pair<double, double>>& snr_delta_pairs,
                                   const std::vector<std::uint64_t>& seeds,
                                   const DecomposeConfig& cfg);

}  // namespace ssct
