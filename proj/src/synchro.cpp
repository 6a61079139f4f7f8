#include "ssct/synchro.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>

#include "ssct/errors.hpp"

namespace ssct {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::int64_t kCellClamp = std::int64_t{1} << 30;

}  // namespace

std::size_t WaveVectorEstimates::entry_count() const {
    std::size_t n = 0;
    for (const auto& v : per_tile) n += v.size();
    return n;
}

double WaveVectorEstimates::total_weight() const {
    double acc = 0.0;
    for (const auto& v : per_tile)
        for (const Entry& e : v) acc += e.weight;
    return acc;
}

void WaveVectorEstimates::write_csv(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw FormatError("cannot write " + path.string());
    os << "tile_id,b1,b2,v1,v2,weight\n" << std::setprecision(17);
    for (std::size_t t = 0; t < per_tile.size(); ++t)
        for (const Entry& e : per_tile[t])
            os << t << ',' << e.b / L_B << ',' << e.b % L_B << ',' << e.v1 << ',' << e.v2 << ','
               << e.weight << '\n';
}

std::int32_t SqueezeField::cell_of(double v, double step) {
    const double idx = std::floor(v / step + 0.5);
    const auto n = static_cast<std::int64_t>(idx);
    return static_cast<std::int32_t>(std::clamp(n, -kCellClamp, kCellClamp));
}

double SqueezeField::total_mass() const {
    // compensated sum: the map iteration order must not cost accuracy
    double acc = 0.0, comp = 0.0;
    for (const auto& [key, m] : mass) {
        const double t = acc + m;
        comp += (std::abs(acc) >= std::abs(m)) ? (acc - t) + m : (m - t) + acc;
        acc = t;
    }
    return acc + comp;
}

std::vector<double> SqueezeField::mass_by_position() const {
    std::vector<double> out(L_B * L_B, 0.0);
    for (const auto& [key, m] : mass) out[key.b] += m;
    return out;
}

void SqueezeField::write_csv(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw FormatError("cannot write " + path.string());
    os << "n1,n2,b1,b2,mass\n" << std::setprecision(17);
    std::vector<CellKey> keys;
    keys.reserve(mass.size());
    for (const auto& [key, m] : mass) keys.push_back(key);
    std::sort(keys.begin(), keys.end(), [](const CellKey& a, const CellKey& b) {
        return std::tie(a.b, a.n1, a.n2) < std::tie(b.b, b.n1, b.n2);
    });
    for (const CellKey& key : keys)
        os << key.n1 << ',' << key.n2 << ',' << key.b / L_B << ',' << key.b % L_B << ','
           << mass.at(key) << '\n';
}

std::vector<WaveVectorEstimates::Entry> estimate_tile(const TileCoefficients& tc, std::size_t L_B,
                                                      double eps, double weight_scale) {
    std::vector<WaveVectorEstimates::Entry> out;
    const double thresh_sq = eps;  // |W| >= sqrt(eps)  <=>  |W|^2 >= eps
    const std::size_t nb = L_B * L_B;
    for (std::size_t m = 0; m < nb; ++m) {
        const cplx w = tc.w[m];
        const double w_sq = std::norm(w);
        if (w_sq < thresh_sq) continue;
        // Re[grad / (2πi W)] = Im(grad * conj(W)) / (2π |W|^2)
        const double denom = kTwoPi * w_sq;
        const double v1 = (tc.grad1[m] * std::conj(w)).imag() / denom;
        const double v2 = (tc.grad2[m] * std::conj(w)).imag() / denom;
        if (!std::isfinite(v1) || !std::isfinite(v2)) continue;
        out.push_back({static_cast<std::uint32_t>(m), v1, v2, weight_scale * w_sq});
    }
    return out;
}

WaveVectorEstimates estimate_wavevectors(const CoefficientSet& coeffs, double eps) {
    if (eps <= 0.0) throw ConfigError("estimate_wavevectors: eps must be positive");
    if (!coeffs.has_gradient)
        throw StateError("estimate_wavevectors: coefficient set carries no gradients");

    WaveVectorEstimates est;
    est.L_B = coeffs.L_B;
    est.epsilon = eps;
    est.per_tile.resize(coeffs.tiles.size());
    est.relevant.assign(coeffs.L_B * coeffs.L_B, 0);

    const double cell = 1.0 / (static_cast<double>(coeffs.L_B) * static_cast<double>(coeffs.L_B));
    for (std::size_t t = 0; t < coeffs.tiles.size(); ++t) {
        const Tile& tile = coeffs.tiling->tiles[t];
        if (tile.is_lowpass()) continue;
        const double la_over_lb = tile.L_a * tile.L_a * cell;
        est.per_tile[t] =
            estimate_tile(coeffs.tiles[t], coeffs.L_B, eps, coeffs.hermitian_weight(t) * la_over_lb);
        for (const auto& e : est.per_tile[t]) est.relevant[e.b] = 1;
    }
    return est;
}

void squeeze_into(SqueezeField& sq, const std::vector<WaveVectorEstimates::Entry>& entries) {
    for (const auto& e : entries) {
        SqueezeField::CellKey key{SqueezeField::cell_of(e.v1, sq.step),
                                  SqueezeField::cell_of(e.v2, sq.step), e.b};
        sq.mass[key] += e.weight;
    }
}

SqueezeField squeeze(const WaveVectorEstimates& est, double step) {
    if (step <= 0.0) throw ConfigError("squeeze: cell step must be positive");
    SqueezeField sq;
    sq.step = step;
    sq.L_B = est.L_B;
    for (const auto& entries : est.per_tile) squeeze_into(sq, entries);
    return sq;
}

VectorField2 mean_wavevector(const SqueezeField& sq, double delta) {
    if (delta < 0.0) throw ConfigError("mean_wavevector: delta must be nonnegative");
    VectorField2 out(sq.L_B);

    struct CellEntry {
        std::int32_t n1, n2;
        double mass;
    };
    std::vector<std::vector<CellEntry>> by_b(sq.L_B * sq.L_B);
    for (const auto& [key, m] : sq.mass) {
        if (m < delta) continue;
        by_b[key.b].push_back({key.n1, key.n2, m});
    }
    for (std::size_t b = 0; b < by_b.size(); ++b) {
        auto& cells = by_b[b];
        if (cells.empty()) continue;
        std::sort(cells.begin(), cells.end(), [](const CellEntry& a, const CellEntry& c) {
            return std::tie(a.n1, a.n2) < std::tie(c.n1, c.n2);
        });
        double w_sum = 0.0, a1 = 0.0, a2 = 0.0;
        for (const CellEntry& c : cells) {
            w_sum += c.mass;
            a1 += c.mass * static_cast<double>(c.n1) * sq.step;
            a2 += c.mass * static_cast<double>(c.n2) * sq.step;
        }
        out.v1[b] = a1 / w_sum;
        out.v2[b] = a2 / w_sum;
        out.defined[b] = 1;
    }
    return out;
}

ErrorMap relative_error(const VectorField2& vm, const VectorField2& exact) {
    if (vm.side != exact.side) throw DimensionError("relative_error: field sides differ");
    ErrorMap out;
    out.side = vm.side;
    out.r.assign(vm.side * vm.side, 0.0);
    out.valid.assign(vm.side * vm.side, 0);

    double max_r = 0.0, sum_r = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < out.r.size(); ++i) {
        if (!exact.defined[i]) continue;
        const double mag = std::hypot(exact.v1[i], exact.v2[i]);
        if (mag == 0.0) continue;  // left invalid: per-pixel division error
        out.valid[i] = 1;
        double r = 0.0;
        if (vm.defined[i]) r = std::hypot(vm.v1[i] - exact.v1[i], vm.v2[i] - exact.v2[i]) / mag;
        out.r[i] = r;
        max_r = std::max(max_r, r);
        sum_r += r;
        ++count;
    }
    out.max_r = max_r;
    out.mean_r = count > 0 ? sum_r / static_cast<double>(count) : 0.0;
    return out;
}

void ErrorMap::write_csv(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw FormatError("cannot write " + path.string());
    os << "b1,b2,R\n" << std::setprecision(17);
    for (std::size_t i = 0; i < r.size(); ++i)
        os << i / side << ',' << i % side << ',' << r[i] << '\n';
}

}  // namespace ssct
