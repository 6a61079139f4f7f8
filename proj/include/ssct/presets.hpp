#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ssct/pipeline.hpp"
#include "ssct/synth.hpp"

namespace ssct {

// One synthetic component: a (possibly banded) deformed plane wave,
// optionally disrupted by seeded random vertical column shifts.
struct GeneratorComponent {
    PhaseSpec phase;
    BandSpec band;
    std::size_t disrupt_shift = 0;  // max column shift; 0 = no disruption
};

struct GeneratorSpec {
    std::vector<GeneratorComponent> components;
    std::optional<double> noise_snr_db;  // absent = noiseless
    bool real_part = false;              // keep only Re(f), mark is_real
    double taper_margin = 0.0;           // periodize() margin; banded waves
                                         // cross the unit-square seam
};

struct SweepSpec {
    std::vector<double> snr_db;  // +inf allowed (serialized as null)
    std::vector<double> delta;
    std::vector<std::uint64_t> seeds;
};

// Full experiment description: everything a run needs besides the output
// directory. Serializes to the versioned preset JSON format.
struct RunConfig {
    int version = 1;
    std::string name;
    std::size_t L = 512;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    GeneratorSpec generator;
    DecomposeConfig decompose;
    std::optional<SweepSpec> sweep;
};

// Built-in experiment presets (example1, banded1, example2,
// example2_noisy, example3, snr_table, smoke).
std::vector<std::string> preset_names();
RunConfig preset(const std::string& name);

// Strict parse: unknown keys anywhere in the document are rejected.
RunConfig parse_run_config(const nlohmann::json& j);
nlohmann::json run_config_json(const RunConfig& cfg);

// Renders the components (with per-component disruption), superposes,
// optionally reduces to the real part and adds calibrated noise.
SpatialField generate(const GeneratorSpec& gen, std::size_t L, std::uint64_t seed);

// Exact N grad phi for one component on the given position grid. The
// defined mask follows the component as generated: banded components are
// defined on their band support (envelope > 0.01) and the generator's
// boundary taper shrinks the support the same way.
VectorField2 component_truth(const GeneratorComponent& comp, std::size_t side,
                             double taper_margin = 0.0);

}  // namespace ssct
