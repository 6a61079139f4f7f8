#include "ssct/presets.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <nlohmann/json.hpp>

#include "ssct/errors.hpp"

namespace ssct {

namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_keys(const json& j, const std::string& ctx,
                  std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError("config: " + ctx + " must be an object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* name : allowed)
            if (key == name) {
                ok = true;
                break;
            }
        if (!ok) throw ConfigError("config: unknown key '" + key + "' in " + ctx);
    }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    return it->get<T>();
}

json phase_json(const PhaseSpec& p) {
    return json{{"slope1", p.slope1}, {"slope2", p.slope2}, {"amp1", p.amp1},
                {"amp2", p.amp2},     {"flip1", p.flip1},   {"flip2", p.flip2},
                {"offset", p.offset}, {"wavenumber", p.wavenumber}, {"amplitude", p.amplitude}};
}

PhaseSpec parse_phase(const json& j) {
    require_keys(j, "generator.components[].phase",
                 {"slope1", "slope2", "amp1", "amp2", "flip1", "flip2", "offset", "wavenumber",
                  "amplitude"});
    PhaseSpec p;
    p.slope1 = get_or(j, "slope1", p.slope1);
    p.slope2 = get_or(j, "slope2", p.slope2);
    p.amp1 = get_or(j, "amp1", p.amp1);
    p.amp2 = get_or(j, "amp2", p.amp2);
    p.flip1 = get_or(j, "flip1", p.flip1);
    p.flip2 = get_or(j, "flip2", p.flip2);
    p.offset = get_or(j, "offset", p.offset);
    p.wavenumber = get_or(j, "wavenumber", p.wavenumber);
    p.amplitude = get_or(j, "amplitude", p.amplitude);
    return p;
}

json band_json(const BandSpec& b) {
    json j{{"center", b.center}};
    if (std::isinf(b.sigma))
        j["sigma"] = nullptr;
    else
        j["sigma"] = b.sigma;
    return j;
}

BandSpec parse_band(const json& j) {
    require_keys(j, "generator.components[].band", {"center", "sigma"});
    BandSpec b;
    b.center = get_or(j, "center", b.center);
    b.sigma = get_or(j, "sigma", kInf);
    return b;
}

// Per-component sub-seed so disruption draws are independent of each other
// and of the noise stream.
std::uint64_t component_seed(std::uint64_t seed, std::size_t index) {
    std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ull * (index + 1));
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    return x;
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"example1", "banded1", "example2", "example2_noisy",
            "example3", "example3_noisy", "snr_table", "smoke", "smoke2"};
}

RunConfig preset(const std::string& name) {
    RunConfig cfg;
    cfg.name = name;
    cfg.L = 512;
    cfg.seed = 7;
    cfg.decompose.tiling.s = 0.625;
    cfg.decompose.tiling.t = 0.875;
    cfg.decompose.epsilon = 1e-4;
    cfg.decompose.cell_step = 1.0;
    cfg.decompose.delta = 0.0;
    cfg.decompose.adjacency = {0.02, 0.3, 20.0};

    PhaseSpec wave1;  // x1 + (1-x2) + 0.1 sin(2πx1) + 0.1 sin(2π(1-x2)), N=135
    PhaseSpec wave2 = wave1;
    wave2.flip1 = true;  // crossing wavefront
    const BandSpec band{0.7, 4.0 / 135.0};
    const BandSpec full{0.0, kInf};

    if (name == "example1") {
        cfg.generator.components = {{wave1, full, 0}};
    } else if (name == "banded1") {
        // Estimation-oriented banded preset: uncapped radial steps keep the
        // needles thin across the band, the taper removes the unit-square
        // seam, and the larger epsilon keeps the relevant mask inside the
        // region where local content dominates leakage.
        cfg.generator.components = {{wave1, band, 0}};
        cfg.generator.taper_margin = 0.08;
        cfg.decompose.tiling.finest_cap = 256.0;
        cfg.decompose.tiling.angular_overlap = 2.0;
        cfg.decompose.epsilon = 4.0;
        cfg.decompose.cell_step = 0.5;
    } else if (name == "example2" || name == "example2_noisy" || name == "example3" ||
               name == "example3_noisy") {
        cfg.generator.components = {{wave1, band, 0}, {wave2, band, 0}};
        cfg.generator.taper_margin = 0.08;
        cfg.decompose.tiling.finest_cap = 256.0;
        cfg.decompose.cell_step = 2.0;
        cfg.decompose.delta = 0.03;
        if (name == "example3" || name == "example3_noisy")
            cfg.generator.components[0].disrupt_shift = 511;
        if (name == "example2_noisy") {
            cfg.generator.noise_snr_db = -3.07;
            cfg.decompose.delta = 2.0;
        }
        if (name == "example3" || name == "example3_noisy") cfg.decompose.delta = 2.0;
        if (name == "example3_noisy") cfg.generator.noise_snr_db = -0.90;
    } else if (name == "snr_table") {
        // Noise-robustness preset: L_B = 128 puts the squeezed cell masses
        // on the scale where the absolute delta thresholds separate signal
        // cells from noise cells; the tighter overlaps keep every tile
        // support inside the 128-cell.
        cfg.generator.components = {{wave1, band, 0}};
        cfg.generator.taper_margin = 0.08;
        cfg.decompose.tiling.radial_overlap = 0.5;
        cfg.decompose.tiling.angular_overlap = 0.8;
        cfg.decompose.tiling.finest_cap = 256.0;
        cfg.decompose.coeff_side = 128;
        cfg.decompose.epsilon = 16.0;
        cfg.decompose.cell_step = 1.0;
        cfg.sweep = SweepSpec{{kInf, 3.0, 0.0, -3.0, -6.0}, {0.0, 3.5, 4.0, 4.5, 5.0},
                              {101, 202, 303}};
    } else if (name == "smoke" || name == "smoke2") {
        cfg.L = 128;
        PhaseSpec small1 = wave1;
        small1.wavenumber = 32.0;
        cfg.generator.components = {{small1, full, 0}};
        cfg.decompose.adjacency = {0.05, 0.3, 10.0};
        if (name == "smoke2") {
            PhaseSpec small2 = wave2;
            small2.wavenumber = 32.0;
            const BandSpec small_band{0.7, 4.0 / 32.0};
            cfg.generator.components = {{small1, small_band, 0}, {small2, small_band, 0}};
            cfg.generator.taper_margin = 0.08;
            cfg.decompose.cell_step = 1.0;
            cfg.decompose.delta = 0.1;
        }
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    return cfg;
}

RunConfig parse_run_config(const json& j) {
    require_keys(j, "document",
                 {"version", "name", "L", "seed", "threads", "generator", "transform", "squeeze",
                  "cluster", "sweep"});
    RunConfig cfg;
    cfg.version = get_or(j, "version", 1);
    if (cfg.version != 1)
        throw ConfigError("config: unsupported version " + std::to_string(cfg.version));
    cfg.name = get_or<std::string>(j, "name", "custom");
    cfg.L = get_or<std::size_t>(j, "L", 512);
    cfg.seed = get_or<std::uint64_t>(j, "seed", 0);
    cfg.threads = get_or<unsigned>(j, "threads", 1);

    if (auto it = j.find("generator"); it != j.end()) {
        require_keys(*it, "generator", {"components", "noise_snr_db", "real_part", "taper_margin"});
        if (auto comps = it->find("components"); comps != it->end()) {
            if (!comps->is_array()) throw ConfigError("config: generator.components must be a list");
            for (const json& cj : *comps) {
                require_keys(cj, "generator.components[]", {"phase", "band", "disrupt_shift"});
                GeneratorComponent comp;
                if (cj.contains("phase")) comp.phase = parse_phase(cj.at("phase"));
                if (cj.contains("band")) comp.band = parse_band(cj.at("band"));
                comp.disrupt_shift = get_or<std::size_t>(cj, "disrupt_shift", 0);
                cfg.generator.components.push_back(comp);
            }
        }
        if (it->contains("noise_snr_db") && !it->at("noise_snr_db").is_null())
            cfg.generator.noise_snr_db = it->at("noise_snr_db").get<double>();
        cfg.generator.real_part = get_or(*it, "real_part", false);
        cfg.generator.taper_margin = get_or(*it, "taper_margin", 0.0);
    }

    if (auto it = j.find("transform"); it != j.end()) {
        require_keys(*it, "transform",
                     {"s", "t", "a_min", "finest_cap", "radial_overlap", "angular_overlap",
                      "real_mode", "coeff_side"});
        TilingParams& tp = cfg.decompose.tiling;
        tp.s = get_or(*it, "s", tp.s);
        tp.t = get_or(*it, "t", tp.t);
        tp.a_min = get_or(*it, "a_min", tp.a_min);
        tp.finest_cap = get_or(*it, "finest_cap", tp.finest_cap);
        tp.radial_overlap = get_or(*it, "radial_overlap", tp.radial_overlap);
        tp.angular_overlap = get_or(*it, "angular_overlap", tp.angular_overlap);
        tp.real_mode = get_or(*it, "real_mode", tp.real_mode);
        cfg.decompose.coeff_side = get_or<std::size_t>(*it, "coeff_side", 0);
    }

    if (auto it = j.find("squeeze"); it != j.end()) {
        require_keys(*it, "squeeze", {"epsilon", "cell_step", "delta"});
        cfg.decompose.epsilon = get_or(*it, "epsilon", cfg.decompose.epsilon);
        cfg.decompose.cell_step = get_or(*it, "cell_step", cfg.decompose.cell_step);
        cfg.decompose.delta = get_or(*it, "delta", cfg.decompose.delta);
    }

    if (auto it = j.find("cluster"); it != j.end()) {
        require_keys(*it, "cluster", {"d0", "theta0", "R0", "max_modes"});
        cfg.decompose.adjacency.d0 = get_or(*it, "d0", cfg.decompose.adjacency.d0);
        cfg.decompose.adjacency.theta0 = get_or(*it, "theta0", cfg.decompose.adjacency.theta0);
        cfg.decompose.adjacency.R0 = get_or(*it, "R0", cfg.decompose.adjacency.R0);
        cfg.decompose.max_modes = get_or<std::size_t>(*it, "max_modes", 0);
    }

    if (auto it = j.find("sweep"); it != j.end() && !it->is_null()) {
        require_keys(*it, "sweep", {"snr_db", "delta", "seeds"});
        SweepSpec sweep;
        if (auto sn = it->find("snr_db"); sn != it->end())
            for (const json& v : *sn) sweep.snr_db.push_back(v.is_null() ? kInf : v.get<double>());
        sweep.delta = get_or(*it, "delta", std::vector<double>{});
        sweep.seeds = get_or(*it, "seeds", std::vector<std::uint64_t>{});
        if (sweep.snr_db.size() != sweep.delta.size())
            throw ConfigError("config: sweep.snr_db and sweep.delta must have the same length");
        if (sweep.seeds.empty()) throw ConfigError("config: sweep.seeds must be nonempty");
        cfg.sweep = std::move(sweep);
    }

    cfg.decompose.threads = cfg.threads;
    return cfg;
}

json run_config_json(const RunConfig& cfg) {
    json components = json::array();
    for (const GeneratorComponent& comp : cfg.generator.components)
        components.push_back(json{{"phase", phase_json(comp.phase)},
                                  {"band", band_json(comp.band)},
                                  {"disrupt_shift", comp.disrupt_shift}});
    json gen{{"components", components},
             {"real_part", cfg.generator.real_part},
             {"taper_margin", cfg.generator.taper_margin}};
    gen["noise_snr_db"] = cfg.generator.noise_snr_db ? json(*cfg.generator.noise_snr_db) : json();

    const TilingParams& tp = cfg.decompose.tiling;
    json j{{"version", cfg.version},
           {"name", cfg.name},
           {"L", cfg.L},
           {"seed", cfg.seed},
           {"threads", cfg.threads},
           {"generator", gen},
           {"transform",
            {{"s", tp.s},
             {"t", tp.t},
             {"a_min", tp.a_min},
             {"finest_cap", tp.finest_cap},
             {"radial_overlap", tp.radial_overlap},
             {"angular_overlap", tp.angular_overlap},
             {"real_mode", tp.real_mode},
             {"coeff_side", cfg.decompose.coeff_side}}},
           {"squeeze",
            {{"epsilon", cfg.decompose.epsilon},
             {"cell_step", cfg.decompose.cell_step},
             {"delta", cfg.decompose.delta}}},
           {"cluster",
            {{"d0", cfg.decompose.adjacency.d0},
             {"theta0", cfg.decompose.adjacency.theta0},
             {"R0", cfg.decompose.adjacency.R0},
             {"max_modes", cfg.decompose.max_modes}}}};
    if (cfg.sweep) {
        json snr = json::array();
        for (double v : cfg.sweep->snr_db) snr.push_back(std::isinf(v) ? json() : json(v));
        j["sweep"] = json{{"snr_db", snr}, {"delta", cfg.sweep->delta}, {"seeds", cfg.sweep->seeds}};
    }
    return j;
}

SpatialField generate(const GeneratorSpec& gen, std::size_t L, std::uint64_t seed) {
    if (gen.components.empty()) throw ConfigError("generator: at least one component required");
    SpatialField sum(L);
    for (std::size_t i = 0; i < gen.components.size(); ++i) {
        const GeneratorComponent& comp = gen.components[i];
        SpatialField f = banded_imf(comp.phase, comp.band, L);
        if (comp.disrupt_shift > 0)
            f = random_shift_disrupt(f, component_seed(seed, i), comp.disrupt_shift);
        for (std::size_t k = 0; k < sum.values.size(); ++k) sum.values[k] += f.values[k];
    }
    if (gen.real_part) {
        for (cplx& z : sum.values) z = cplx(z.real(), 0.0);
        sum.is_real = true;
    }
    if (gen.taper_margin > 0.0) sum = periodize(sum, gen.taper_margin);
    if (gen.noise_snr_db)
        sum = add_noise(sum, *gen.noise_snr_db, seed, gen.real_part);
    return sum;
}

VectorField2 component_truth(const GeneratorComponent& comp, std::size_t side,
                             double taper_margin) {
    VectorField2 truth = exact_wavevectors(comp.phase, side);
    if (std::isinf(comp.band.sigma) && taper_margin <= 0.0) return truth;
    // The local wave-vector is defined where the component as generated is
    // non-negligible: band envelope times boundary taper above 0.01.
    auto taper_axis = [taper_margin](double x) {
        if (taper_margin <= 0.0) return 1.0;
        const double d = std::min(x, 1.0 - x) / taper_margin;
        if (d >= 1.0) return 1.0;
        return 0.5 * (1.0 - std::cos(std::numbers::pi * d));
    };
    for (std::size_t m1 = 0; m1 < side; ++m1)
        for (std::size_t m2 = 0; m2 < side; ++m2) {
            const double x1 = static_cast<double>(m1) / static_cast<double>(side);
            const double x2 = static_cast<double>(m2) / static_cast<double>(side);
            const double level = comp.band.envelope(comp.phase.phi(x1, x2)) * taper_axis(x1) *
                                 taper_axis(x2) * std::abs(comp.phase.amplitude);
            if (level <= 0.01) truth.defined[m1 * side + m2] = 0;
        }
    return truth;
}

}  // namespace ssct
