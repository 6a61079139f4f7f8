#include "ssct/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <unordered_map>

#include "ssct/errors.hpp"

namespace ssct {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double circ_dist(double x, double y) {
    double d = std::fmod(std::abs(x - y), kTwoPi);
    return std::min(d, kTwoPi - d);
}

struct UnionFind {
    std::vector<std::uint32_t> parent;
    std::vector<std::uint32_t> rank;

    explicit UnionFind(std::size_t n) : parent(n), rank(n, 0) {
        std::iota(parent.begin(), parent.end(), 0u);
    }
    std::uint32_t find(std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (rank[a] < rank[b]) std::swap(a, b);
        parent[b] = a;
        if (rank[a] == rank[b]) ++rank[a];
    }
};

struct ClusterStats {
    double mass = 0.0;
    double a_sum = 0.0;
    double cos_sum = 0.0, sin_sum = 0.0;
    double x1_sum = 0.0, x2_sum = 0.0;
    std::size_t count = 0;
};

// Assigns 1-based ids ordered by total mass descending, ties broken on the
// lexicographically smaller (a, theta, x1, x2) mass centroid.
Clustering label_components(const std::vector<PhasePoint>& points, UnionFind& uf) {
    const std::size_t n = points.size();
    std::unordered_map<std::uint32_t, std::uint32_t> root_to_comp;
    std::vector<ClusterStats> stats;
    std::vector<std::uint32_t> comp_of(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t root = uf.find(static_cast<std::uint32_t>(i));
        auto [it, inserted] = root_to_comp.try_emplace(root, static_cast<std::uint32_t>(stats.size()));
        if (inserted) stats.emplace_back();
        comp_of[i] = it->second;
        ClusterStats& s = stats[it->second];
        const PhasePoint& p = points[i];
        s.mass += p.mass;
        s.a_sum += p.mass * p.a;
        s.cos_sum += p.mass * std::cos(p.theta);
        s.sin_sum += p.mass * std::sin(p.theta);
        s.x1_sum += p.mass * p.x1;
        s.x2_sum += p.mass * p.x2;
        ++s.count;
    }

    std::vector<std::uint32_t> order(stats.size());
    std::iota(order.begin(), order.end(), 0u);
    auto centroid = [&](std::uint32_t c) {
        const ClusterStats& s = stats[c];
        const double inv = s.mass > 0.0 ? 1.0 / s.mass : 0.0;
        double theta = std::atan2(s.sin_sum, s.cos_sum);
        if (theta < 0.0) theta += kTwoPi;
        return std::array<double, 4>{s.a_sum * inv, theta, s.x1_sum * inv, s.x2_sum * inv};
    };
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (stats[a].mass != stats[b].mass) return stats[a].mass > stats[b].mass;
        return centroid(a) < centroid(b);
    });
    std::vector<std::uint32_t> id_of(stats.size());
    for (std::size_t r = 0; r < order.size(); ++r) id_of[order[r]] = static_cast<std::uint32_t>(r + 1);

    Clustering out;
    out.K = stats.size();
    out.labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.labels[i] = id_of[comp_of[i]];
    return out;
}

}  // namespace

void AdjacencyParams::validate() const {
    if (d0 <= 0.0 || theta0 <= 0.0 || R0 <= 0.0)
        throw ConfigError("adjacency thresholds (d0, theta0, R0) must be positive");
}

bool adjacent(const PhasePoint& p, const PhasePoint& q, const AdjacencyParams& params) {
    if (std::hypot(p.x1 - q.x1, p.x2 - q.x2) > params.d0) return false;
    if (std::abs(p.a - q.a) > params.R0) return false;
    return circ_dist(p.theta, q.theta) <= params.theta0;
}

Clustering polar_cluster(const std::vector<PhasePoint>& points, const AdjacencyParams& params) {
    params.validate();
    const std::size_t n = points.size();
    if (n == 0) return Clustering{};

    // d0-pitch buckets over x; adjacency can only reach the 3x3 neighborhood.
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets;
    auto bucket_key = [&](double x1, double x2) {
        const auto i = static_cast<std::int64_t>(std::floor(x1 / params.d0));
        const auto j = static_cast<std::int64_t>(std::floor(x2 / params.d0));
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 32) |
               static_cast<std::uint32_t>(j);
    };
    for (std::size_t i = 0; i < n; ++i)
        buckets[bucket_key(points[i].x1, points[i].x2)].push_back(static_cast<std::uint32_t>(i));

    UnionFind uf(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto bi = static_cast<std::int64_t>(std::floor(points[i].x1 / params.d0));
        const auto bj = static_cast<std::int64_t>(std::floor(points[i].x2 / params.d0));
        for (std::int64_t di = -1; di <= 1; ++di)
            for (std::int64_t dj = -1; dj <= 1; ++dj) {
                const std::uint64_t key =
                    (static_cast<std::uint64_t>(static_cast<std::uint32_t>(bi + di)) << 32) |
                    static_cast<std::uint32_t>(bj + dj);
                auto it = buckets.find(key);
                if (it == buckets.end()) continue;
                for (std::uint32_t j : it->second) {
                    if (j <= i) continue;
                    if (adjacent(points[i], points[j], params))
                        uf.unite(static_cast<std::uint32_t>(i), j);
                }
            }
    }
    return label_components(points, uf);
}

std::vector<PhasePoint> phase_points(const SqueezeField& sq, double delta) {
    std::vector<PhasePoint> points;
    points.reserve(sq.mass.size());
    for (const auto& [key, m] : sq.mass) {
        if (m < delta) continue;
        PhasePoint p;
        p.x1 = static_cast<double>(key.b / sq.L_B) / static_cast<double>(sq.L_B);
        p.x2 = static_cast<double>(key.b % sq.L_B) / static_cast<double>(sq.L_B);
        const double c1 = static_cast<double>(key.n1) * sq.step;
        const double c2 = static_cast<double>(key.n2) * sq.step;
        p.a = std::hypot(c1, c2);
        p.theta = std::atan2(c2, c1);
        if (p.theta < 0.0) p.theta += kTwoPi;
        p.mass = m;
        p.origin = key;
        points.push_back(p);
    }
    std::sort(points.begin(), points.end(), [](const PhasePoint& a, const PhasePoint& b) {
        return std::tie(a.origin.b, a.origin.n1, a.origin.n2) <
               std::tie(b.origin.b, b.origin.n1, b.origin.n2);
    });
    return points;
}

ReducedClustering reduce_then_cluster(const SqueezeField& sq, double delta,
                                      const AdjacencyParams& params) {
    params.validate();
    ReducedClustering out;
    out.points = phase_points(sq, delta);
    const std::size_t n = out.points.size();
    if (n == 0) return out;

    // Stage 1: cluster the (a, theta) projections at each b and collapse
    // every local cluster to its mass-weighted centroid.
    struct Centroid {
        PhasePoint point;
        std::vector<std::uint32_t> members;
    };
    std::vector<Centroid> reduced;
    std::size_t begin = 0;
    while (begin < n) {
        std::size_t end = begin;
        while (end < n && out.points[end].origin.b == out.points[begin].origin.b) ++end;
        const std::size_t m = end - begin;

        UnionFind uf(m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j) {
                const PhasePoint& p = out.points[begin + i];
                const PhasePoint& q = out.points[begin + j];
                if (std::abs(p.a - q.a) <= params.R0 && circ_dist(p.theta, q.theta) <= params.theta0)
                    uf.unite(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
            }
        std::unordered_map<std::uint32_t, std::uint32_t> root_to_local;
        for (std::size_t i = 0; i < m; ++i) {
            const std::uint32_t root = uf.find(static_cast<std::uint32_t>(i));
            auto [it, inserted] =
                root_to_local.try_emplace(root, static_cast<std::uint32_t>(reduced.size()));
            if (inserted) {
                reduced.emplace_back();
                reduced.back().point.x1 = out.points[begin].x1;
                reduced.back().point.x2 = out.points[begin].x2;
            }
            reduced[it->second].members.push_back(static_cast<std::uint32_t>(begin + i));
        }
        begin = end;
    }
    for (Centroid& c : reduced) {
        double mass = 0.0, a_sum = 0.0, cos_sum = 0.0, sin_sum = 0.0;
        for (std::uint32_t idx : c.members) {
            const PhasePoint& p = out.points[idx];
            mass += p.mass;
            a_sum += p.mass * p.a;
            cos_sum += p.mass * std::cos(p.theta);
            sin_sum += p.mass * std::sin(p.theta);
        }
        c.point.mass = mass;
        c.point.a = a_sum / mass;
        double theta = std::atan2(sin_sum, cos_sum);
        if (theta < 0.0) theta += kTwoPi;
        c.point.theta = theta;
    }

    // Stage 2 on the reduced set, then propagate labels back.
    std::vector<PhasePoint> centroids;
    centroids.reserve(reduced.size());
    for (const Centroid& c : reduced) centroids.push_back(c.point);
    const Clustering stage2 = polar_cluster(centroids, params);

    out.clustering.K = stage2.K;
    out.clustering.labels.assign(n, 0);
    for (std::size_t c = 0; c < reduced.size(); ++c)
        for (std::uint32_t idx : reduced[c].members) out.clustering.labels[idx] = stage2.labels[c];
    return out;
}

std::vector<ClusterReportRow> cluster_report(const std::vector<PhasePoint>& points,
                                             const Clustering& clustering) {
    std::vector<ClusterReportRow> rows(clustering.K);
    std::vector<double> cos_sum(clustering.K, 0.0), sin_sum(clustering.K, 0.0),
        a_sum(clustering.K, 0.0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const std::uint32_t id = clustering.labels[i];
        if (id == 0) continue;
        ClusterReportRow& row = rows[id - 1];
        row.id = id;
        row.total_mass += points[i].mass;
        row.point_count += 1;
        a_sum[id - 1] += points[i].mass * points[i].a;
        cos_sum[id - 1] += points[i].mass * std::cos(points[i].theta);
        sin_sum[id - 1] += points[i].mass * std::sin(points[i].theta);
    }
    for (std::size_t k = 0; k < rows.size(); ++k) {
        if (rows[k].total_mass > 0.0) rows[k].centroid_a = a_sum[k] / rows[k].total_mass;
        double theta = std::atan2(sin_sum[k], cos_sum[k]);
        if (theta < 0.0) theta += kTwoPi;
        rows[k].centroid_theta = theta;
    }
    return rows;
}

void write_cluster_report_csv(const std::vector<ClusterReportRow>& rows,
                              const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw FormatError("cannot write " + path.string());
    os << "cluster_id,total_mass,centroid_a,centroid_theta,point_count\n" << std::setprecision(17);
    for (const ClusterReportRow& row : rows)
        os << row.id << ',' << row.total_mass << ',' << row.centroid_a << ','
           << row.centroid_theta << ',' << row.point_count << '\n';
}

}  // namespace ssct
