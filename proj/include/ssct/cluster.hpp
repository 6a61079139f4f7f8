#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "ssct/synchro.hpp"

namespace ssct {

// A thresholded phase-space sample: spatial position x_p in [0,1)^2 and
// polar Fourier coordinates (a_p, theta_p) of its wave-vector cell.
struct PhasePoint {
    double x1 = 0.0, x2 = 0.0;
    double a = 0.0;             // |v|
    double theta = 0.0;         // argument of v in [0, 2pi)
    double mass = 0.0;          // T value
    SqueezeField::CellKey origin;
};

struct AdjacencyParams {
    double d0 = 0.1;      // spatial threshold
    double theta0 = 0.3;  // angular threshold (circular distance)
    double R0 = 8.0;      // radial threshold

    void validate() const;  // throws ConfigError
};

// Partition of the point list into chain-connected clusters. Cluster ids
// run 1..K ordered by descending total mass (ties broken on the
// lexicographically smaller mass centroid).
struct Clustering {
    std::vector<std::uint32_t> labels;  // per input point, 1-based
    std::size_t K = 0;
};

// Inclusive thresholds: |x_p-x_q| <= d0, |a_p-a_q| <= R0 and circular
// angular distance min(|dθ|, 2π-|dθ|) <= theta0. Spatial distance is
// Euclidean and non-periodic.
bool adjacent(const PhasePoint& p, const PhasePoint& q, const AdjacencyParams& params);

// Connected components of the adjacency graph, via union-find over a
// d0-pitch spatial bucket grid (the all-pairs scan is quadratic).
Clustering polar_cluster(const std::vector<PhasePoint>& points, const AdjacencyParams& params);

// Converts the squeeze entries with T >= delta to phase points (cell
// centers, positions on the unit square).
std::vector<PhasePoint> phase_points(const SqueezeField& sq, double delta);

// Two-stage size reduction: stage 1 clusters the (a, theta) projections
// independently at each b and replaces each local cluster by its
// mass-weighted centroid; stage 2 runs polar_cluster on the reduced set.
// Labels are propagated back to every original entry with T >= delta.
struct ReducedClustering {
    std::vector<PhasePoint> points;     // original thresholded points
    Clustering clustering;              // labels aligned with `points`
};
ReducedClustering reduce_then_cluster(const SqueezeField& sq, double delta,
                                      const AdjacencyParams& params);

// Cluster report rows ordered by id: total mass, mass centroid in polar
// Fourier coordinates, member count.
struct ClusterReportRow {
    std::uint32_t id = 0;
    double total_mass = 0.0;
    double centroid_a = 0.0;
    double centroid_theta = 0.0;
    std::size_t point_count = 0;
};
std::vector<ClusterReportRow> cluster_report(const std::vector<PhasePoint>& points,
                                             const Clustering& clustering);
void write_cluster_report_csv(const std::vector<ClusterReportRow>& rows,
                              const std::filesystem::path& path);

}  // namespace ssct
