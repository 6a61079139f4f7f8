// ssct — synchrosqueezed curvelet transform experiments.
//
// Subcommands: synth, forward, estimate, decompose, bench, snr-sweep.
// Exit codes: 0 success, 2 validation error, 3 numerical failure.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ssct/errors.hpp"
#include "ssct/io.hpp"
#include "ssct/pipeline.hpp"
#include "ssct/presets.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
    std::string config_path;
    std::string preset_name;
    std::string in_path;
    std::string truth_path;
    std::string out_dir = "ssct_out";
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    bool quiet = false;
    bool dump_estimates = false;
    bool dump_squeeze = false;
};

// Deterministic run record: resolved config, stats, output list. Wall
// times carry timestamps and go to run.log instead.
class Manifest {
public:
    Manifest(std::string command, const ssct::RunConfig& cfg) : command_(std::move(command)) {
        config_dump_ = ssct::run_config_json(cfg).dump(2);
    }

    void stat(const std::string& key, const std::string& value) { stats_.emplace_back(key, value); }
    void stat(const std::string& key, double value) {
        std::ostringstream os;
        os << std::setprecision(17) << value;
        stats_.emplace_back(key, os.str());
    }
    void stat(const std::string& key, std::size_t value) { stats_.emplace_back(key, std::to_string(value)); }
    void table_line(const std::string& line) { table_.push_back(line); }
    void output(const std::string& name) { outputs_.push_back(name); }

    void write(const fs::path& dir) const {
        std::ofstream os(dir / "manifest.txt", std::ios::trunc);
        if (!os) throw ssct::FormatError("cannot write manifest.txt");
        os << "ssct manifest v1\n";
        os << "command: " << command_ << "\n";
        os << "config:\n" << config_dump_ << "\n";
        for (const auto& [k, v] : stats_) os << "stat " << k << ": " << v << "\n";
        for (const auto& line : table_) os << "table " << line << "\n";
        for (const auto& name : outputs_) os << "output: " << name << "\n";
    }

private:
    std::string command_;
    std::string config_dump_;
    std::vector<std::pair<std::string, std::string>> stats_;
    std::vector<std::string> table_;
    std::vector<std::string> outputs_;
};

class RunLog {
public:
    explicit RunLog(const fs::path& dir) : os_(dir / "run.log", std::ios::trunc) {
        start_ = std::chrono::steady_clock::now();
        const auto now = std::chrono::system_clock::now();
        const std::time_t tt = std::chrono::system_clock::to_time_t(now);
        os_ << "started " << std::put_time(std::gmtime(&tt), "%FT%TZ") << "\n";
    }
    void event(const std::string& what) {
        const auto dt = std::chrono::steady_clock::now() - start_;
        os_ << what << " +" << std::chrono::duration_cast<std::chrono::milliseconds>(dt).count()
            << "ms\n";
    }

private:
    std::ofstream os_;
    std::chrono::steady_clock::time_point start_;
};

ssct::RunConfig resolve_config(const Options& opt) {
    ssct::RunConfig cfg;
    if (!opt.config_path.empty()) {
        std::ifstream is(opt.config_path);
        if (!is) throw ssct::ConfigError("cannot open config " + opt.config_path);
        json j = json::parse(is, nullptr, true, true);
        cfg = ssct::parse_run_config(j);
    } else if (!opt.preset_name.empty()) {
        if (fs::exists(opt.preset_name)) {
            std::ifstream is(opt.preset_name);
            json j = json::parse(is, nullptr, true, true);
            cfg = ssct::parse_run_config(j);
        } else {
            cfg = ssct::preset(opt.preset_name);
        }
    } else {
        cfg = ssct::preset("smoke");
    }
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.threads) cfg.threads = *opt.threads;
    cfg.decompose.threads = cfg.threads;
    return cfg;
}

ssct::SpatialField load_or_generate(const Options& opt, const ssct::RunConfig& cfg) {
    if (!opt.in_path.empty()) return ssct::read_field(opt.in_path);
    return ssct::generate(cfg.generator, cfg.L, cfg.seed);
}

// Vector fields travel as complex rasters: re = v1, im = v2, NaN pairs for
// undefined samples.
ssct::RawGrid vector_field_grid(const ssct::VectorField2& v) {
    ssct::RawGrid grid;
    grid.rows = grid.cols = static_cast<std::uint32_t>(v.side);
    grid.values.resize(v.side * v.side);
    for (std::size_t i = 0; i < grid.values.size(); ++i)
        grid.values[i] = v.defined[i]
                             ? ssct::cplx(v.v1[i], v.v2[i])
                             : ssct::cplx(std::nan(""), std::nan(""));
    return grid;
}

ssct::VectorField2 load_vector_field(const fs::path& path) {
    const ssct::RawGrid grid = ssct::read_raw(path);
    if (grid.rows != grid.cols)
        throw ssct::DimensionError(path.string() + ": vector field must be square");
    ssct::VectorField2 v(grid.rows);
    for (std::size_t i = 0; i < grid.values.size(); ++i) {
        const ssct::cplx z = grid.values[i];
        if (std::isnan(z.real()) || std::isnan(z.imag())) continue;
        v.v1[i] = z.real();
        v.v2[i] = z.imag();
        v.defined[i] = 1;
    }
    return v;
}

std::size_t resolved_coeff_side(const ssct::RunConfig& cfg) {
    ssct::TilingParams tp = cfg.decompose.tiling;
    tp.L = cfg.L;
    const ssct::Tiling tiling = ssct::build_tiling(tp);
    return ssct::resolve_coeff_side(tiling, cfg.decompose.coeff_side);
}

void write_preset_json(const ssct::RunConfig& cfg, const fs::path& dir, Manifest& manifest) {
    std::ofstream os(dir / "preset.json", std::ios::trunc);
    os << ssct::run_config_json(cfg).dump(2) << "\n";
    manifest.output("preset.json");
}

int cmd_synth(const Options& opt) {
    const ssct::RunConfig cfg = resolve_config(opt);
    const fs::path dir(opt.out_dir);
    fs::create_directories(dir);
    RunLog log(dir);
    Manifest manifest("synth", cfg);

    const ssct::SpatialField field = ssct::generate(cfg.generator, cfg.L, cfg.seed);
    ssct::write_field(field, dir / "field.ssct");
    manifest.output("field.ssct");
    log.event("generated field");

    const std::size_t side = resolved_coeff_side(cfg);
    for (std::size_t k = 0; k < cfg.generator.components.size(); ++k) {
        const ssct::VectorField2 truth =
            ssct::component_truth(cfg.generator.components[k], side, cfg.generator.taper_margin);
        std::ostringstream name;
        name << "truth_" << std::setw(3) << std::setfill('0') << (k + 1) << ".ssct";
        ssct::write_raw(dir / name.str(), vector_field_grid(truth));
        manifest.output(name.str());
    }
    manifest.stat("L", cfg.L);
    manifest.stat("L_B", side);
    manifest.stat("components", cfg.generator.components.size());
    manifest.stat("field_energy", field.energy());
    write_preset_json(cfg, dir, manifest);
    manifest.output("manifest.txt");
    manifest.write(dir);
    log.event("done");
    if (!opt.quiet)
        std::cout << "synth: wrote field.ssct (L=" << cfg.L << ", energy=" << field.energy()
                  << ") to " << dir.string() << "\n";
    return 0;
}

int cmd_forward(const Options& opt) {
    const ssct::RunConfig cfg = resolve_config(opt);
    const fs::path dir(opt.out_dir);
    fs::create_directories(dir);
    RunLog log(dir);
    Manifest manifest("forward", cfg);

    const ssct::SpatialField field = load_or_generate(opt, cfg);
    ssct::TilingParams tp = cfg.decompose.tiling;
    tp.L = field.L;
    const auto tiling = std::make_shared<ssct::Tiling>(ssct::build_tiling(tp));
    const std::size_t side = ssct::resolve_coeff_side(*tiling, cfg.decompose.coeff_side);
    const ssct::SpectrumField fhat = ssct::dft2(field);
    log.event("tiling built");

    std::ofstream os(dir / "coeffs.bin", std::ios::binary | std::ios::trunc);
    if (!os) throw ssct::FormatError("cannot write coeffs.bin");
    double energy = 0.0;
    for (std::size_t t = 0; t < tiling->tile_count(); ++t) {
        const ssct::Tile& tile = tiling->tiles[t];
        const ssct::TileCoefficients tc = ssct::compute_tile(fhat, tile, side, false);
        os << t << ',' << std::setprecision(17) << tile.a << ',' << tile.theta << ',' << tile.L_a
           << '\n';
        ssct::RawGrid grid;
        grid.rows = grid.cols = static_cast<std::uint32_t>(side);
        grid.values = tc.w;
        ssct::write_raw_stream(os, grid, "coeffs.bin tile " + std::to_string(t));
        const double scale = tile.L_a * tile.L_a / static_cast<double>(side * side);
        const double hermw =
            tp.real_mode && !tile.is_lowpass() ? 2.0 : 1.0;
        for (const ssct::cplx& z : tc.w) energy += hermw * scale * std::norm(z);
    }
    manifest.output("coeffs.bin");
    tiling->write_summary_csv(dir / "tiling.csv");
    manifest.output("tiling.csv");
    log.event("coefficients written");

    manifest.stat("L", field.L);
    manifest.stat("L_B", side);
    manifest.stat("tile_count", tiling->tile_count());
    manifest.stat("frame_energy", energy);
    manifest.stat("field_energy", field.energy());
    manifest.output("manifest.txt");
    manifest.write(dir);
    log.event("done");
    if (!opt.quiet)
        std::cout << "forward: " << tiling->tile_count() << " tiles, L_B=" << side
                  << ", frame_energy=" << std::setprecision(12) << energy << "\n";
    return 0;
}

int cmd_estimate(const Options& opt) {
    const ssct::RunConfig cfg = resolve_config(opt);
    const fs::path dir(opt.out_dir);
    fs::create_directories(dir);
    RunLog log(dir);
    Manifest manifest("estimate", cfg);

    const ssct::SpatialField field = load_or_generate(opt, cfg);
    std::optional<ssct::VectorField2> truth;
    if (!opt.truth_path.empty()) {
        truth = load_vector_field(opt.truth_path);
    } else if (opt.in_path.empty() && cfg.generator.components.size() == 1 &&
               cfg.generator.components[0].disrupt_shift == 0) {
        truth = ssct::component_truth(cfg.generator.components[0], resolved_coeff_side(cfg),
                                      cfg.generator.taper_margin);
    }
    log.event("input ready");

    ssct::DecomposeConfig dc = cfg.decompose;
    dc.tiling.L = field.L;
    const ssct::EstimateResult res =
        ssct::estimate_field(field, dc, truth ? &*truth : nullptr, opt.dump_estimates);
    log.event("estimate done");

    ssct::write_raw(dir / "mean_wavevector.ssct", vector_field_grid(res.mean_vectors));
    manifest.output("mean_wavevector.ssct");
    const std::vector<double> mass = res.squeeze.mass_by_position();
    ssct::write_pgm16(mass, res.coeff_side, res.coeff_side, dir / "squeeze_mass.pgm");
    manifest.output("squeeze_mass.pgm");
    manifest.output("squeeze_mass.pgm.txt");
    if (opt.dump_estimates) {
        res.estimates->write_csv(dir / "estimates.csv");
        manifest.output("estimates.csv");
    }
    if (opt.dump_squeeze) {
        res.squeeze.write_csv(dir / "squeeze.csv");
        manifest.output("squeeze.csv");
    }
    if (res.error) {
        res.error->write_csv(dir / "error.csv");
        manifest.output("error.csv");
        ssct::write_pgm16(res.error->r, res.error->side, res.error->side, dir / "error.pgm");
        manifest.output("error.pgm");
        manifest.output("error.pgm.txt");
        manifest.stat("max_R", res.error->max_r);
        manifest.stat("mean_R", res.error->mean_r);
    }
    manifest.stat("L", field.L);
    manifest.stat("L_B", res.coeff_side);
    manifest.stat("tile_count", res.tile_count);
    manifest.stat("delta", cfg.decompose.delta);
    manifest.stat("thresholded_energy", res.thresholded_energy);
    manifest.stat("warning_empty", std::string(res.warning_empty ? "true" : "false"));
    write_preset_json(cfg, dir, manifest);
    manifest.output("manifest.txt");
    manifest.write(dir);
    log.event("done");

    if (!opt.quiet) {
        std::cout << "estimate: L_B=" << res.coeff_side << ", tiles=" << res.tile_count;
        if (res.error) std::cout << ", max_R0 " << std::setprecision(6) << res.error->max_r;
        std::cout << "\n";
    }
    return 0;
}

int cmd_decompose(const Options& opt) {
    const ssct::RunConfig cfg = resolve_config(opt);
    const fs::path dir(opt.out_dir);
    fs::create_directories(dir);
    RunLog log(dir);
    Manifest manifest("decompose", cfg);

    const ssct::SpatialField field = load_or_generate(opt, cfg);
    ssct::DecomposeConfig dc = cfg.decompose;
    dc.tiling.L = field.L;
    const ssct::ModeSet ms = ssct::decompose(field, dc);
    log.event("decompose done");

    for (std::size_t k = 0; k < ms.modes.size(); ++k) {
        std::ostringstream name;
        name << "mode_" << std::setw(3) << std::setfill('0') << (k + 1) << ".ssct";
        ssct::write_field(ms.modes[k], dir / name.str());
        manifest.output(name.str());
    }
    ssct::write_field(ms.residual, dir / "residual.ssct");
    manifest.output("residual.ssct");
    ssct::write_field(ms.residual_lowpass, dir / "residual_lowpass.ssct");
    manifest.output("residual_lowpass.ssct");
    ssct::write_cluster_report_csv(ms.report, dir / "clusters.csv");
    manifest.output("clusters.csv");
    const std::vector<double> mass = ms.squeeze.mass_by_position();
    ssct::write_pgm16(mass, ms.coeff_side, ms.coeff_side, dir / "squeeze_mass.pgm");
    manifest.output("squeeze_mass.pgm");
    manifest.output("squeeze_mass.pgm.txt");
    if (opt.dump_squeeze) {
        ms.squeeze.write_csv(dir / "squeeze.csv");
        manifest.output("squeeze.csv");
    }

    manifest.stat("L", field.L);
    manifest.stat("L_B", ms.coeff_side);
    manifest.stat("tile_count", ms.tile_count);
    manifest.stat("modes", ms.modes.size());
    manifest.stat("clusters", ms.report.size());
    manifest.stat("field_energy", field.energy());
    manifest.stat("coefficient_energy", ms.total_coefficient_energy);
    manifest.stat("thresholded_energy", ms.thresholded_energy);
    manifest.stat("discarded_energy", ms.discarded_energy);
    manifest.stat("warning_empty", std::string(ms.warning_empty ? "true" : "false"));
    for (std::size_t k = 0; k < ms.mode_energies.size(); ++k)
        manifest.stat("mode_energy_" + std::to_string(k + 1), ms.mode_energies[k]);
    for (const ssct::ClusterReportRow& row : ms.report) {
        std::ostringstream line;
        line << "cluster " << row.id << " mass " << std::setprecision(17) << row.total_mass
             << " centroid_a " << row.centroid_a << " centroid_theta " << row.centroid_theta
             << " points " << row.point_count;
        manifest.table_line(line.str());
    }
    write_preset_json(cfg, dir, manifest);
    manifest.output("manifest.txt");
    manifest.write(dir);
    log.event("done");

    if (!opt.quiet)
        std::cout << "decompose: modes=" << ms.modes.size() << " clusters=" << ms.report.size()
                  << " discarded_energy=" << std::setprecision(6) << ms.discarded_energy << "\n";
    return 0;
}

int cmd_bench(const Options& opt) {
    const ssct::RunConfig cfg = resolve_config(opt);
    const fs::path dir(opt.out_dir);
    fs::create_directories(dir);
    RunLog log(dir);
    Manifest manifest("bench", cfg);

    if (cfg.generator.components.size() != 1)
        throw ssct::ConfigError("bench requires a single-component preset");
    const ssct::SpatialField field = ssct::generate(cfg.generator, cfg.L, cfg.seed);

    struct Row {
        std::string method;
        double s, t;
        std::size_t side;
        double max_r, mean_r;
    };
    std::vector<Row> rows;
    for (const bool wave_packet : {false, true}) {
        ssct::DecomposeConfig dc = cfg.decompose;
        dc.tiling.L = field.L;
        if (wave_packet) {
            dc.tiling.t = dc.tiling.s;  // s = t: the wave-packet geometry
            dc.coeff_side = 0;
        }
        ssct::TilingParams tp = dc.tiling;
        const auto tiling = ssct::build_tiling(tp);
        const std::size_t side = ssct::resolve_coeff_side(tiling, dc.coeff_side);
        const ssct::VectorField2 truth =
            ssct::component_truth(cfg.generator.components[0], side, cfg.generator.taper_margin);
        const ssct::EstimateResult res = ssct::estimate_field(field, dc, &truth);
        rows.push_back({wave_packet ? "sswpt" : "ssct", tp.s, tp.t, side, res.error->max_r,
                        res.error->mean_r});
        log.event(rows.back().method + " estimated");
    }

    std::ofstream os(dir / "bench.csv", std::ios::trunc);
    os << "method,s,t,L_B,max_R,mean_R\n" << std::setprecision(17);
    for (const Row& row : rows)
        os << row.method << ',' << row.s << ',' << row.t << ',' << row.side << ',' << row.max_r
           << ',' << row.mean_r << '\n';
    manifest.output("bench.csv");

    manifest.stat("ssct_max_R", rows[0].max_r);
    manifest.stat("sswpt_max_R", rows[1].max_r);
    manifest.stat("sswpt_over_ssct", rows[1].max_r / std::max(rows[0].max_r, 1e-300));
    write_preset_json(cfg, dir, manifest);
    manifest.output("manifest.txt");
    manifest.write(dir);
    log.event("done");

    if (!opt.quiet)
        std::cout << "bench: ssct max_R " << std::setprecision(6) << rows[0].max_r
                  << ", sswpt max_R " << rows[1].max_r << "\n";
    return 0;
}

int cmd_snr_sweep(const Options& opt) {
    const ssct::RunConfig cfg = resolve_config(opt);
    const fs::path dir(opt.out_dir);
    fs::create_directories(dir);
    RunLog log(dir);
    Manifest manifest("snr-sweep", cfg);

    if (!cfg.sweep) throw ssct::ConfigError("snr-sweep requires a preset with a sweep section");
    if (cfg.generator.components.size() != 1)
        throw ssct::ConfigError("snr-sweep requires a single-component preset");

    const ssct::SpatialField clean = ssct::generate(cfg.generator, cfg.L, cfg.seed);
    ssct::DecomposeConfig dc = cfg.decompose;
    dc.tiling.L = clean.L;
    const ssct::VectorField2 truth = ssct::component_truth(
        cfg.generator.components[0], resolved_coeff_side(cfg), cfg.generator.taper_margin);

    std::vector<std::pair<double, double>> pairs;
    for (std::size_t i = 0; i < cfg.sweep->snr_db.size(); ++i)
        pairs.emplace_back(cfg.sweep->snr_db[i], cfg.sweep->delta[i]);
    const auto rows = ssct::snr_sweep(clean, truth, pairs, cfg.sweep->seeds, dc);
    log.event("sweep done");

    std::ofstream os(dir / "snr_table.csv", std::ios::trunc);
    os << "snr_db,delta,seed,max_R\n" << std::setprecision(17);
    for (const auto& row : rows)
        for (std::size_t i = 0; i < row.max_r.size(); ++i)
            os << row.snr_db << ',' << row.delta << ','
               << (std::isinf(row.snr_db) ? 0 : cfg.sweep->seeds[i]) << ',' << row.max_r[i] << '\n';
    manifest.output("snr_table.csv");

    for (const auto& row : rows) {
        std::ostringstream line;
        line << "snr " << row.snr_db << " delta " << row.delta << " worst_max_R "
             << std::setprecision(17) << row.worst;
        manifest.table_line(line.str());
    }
    write_preset_json(cfg, dir, manifest);
    manifest.output("manifest.txt");
    manifest.write(dir);
    log.event("done");

    if (!opt.quiet) {
        std::cout << "snr-sweep:";
        for (const auto& row : rows) std::cout << ' ' << std::setprecision(4) << row.worst;
        std::cout << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"synchrosqueezed curvelet transform toolkit"};
    app.require_subcommand(1);
    Options opt;
    app.add_option("--config", opt.config_path, "run-config JSON path")->configurable(false);
    app.add_option("--out", opt.out_dir, "output directory");
    app.add_option("--seed", opt.seed, "override the run seed");
    app.add_option("--threads", opt.threads, "worker thread count (0 = hardware)");
    app.add_flag("--quiet", opt.quiet, "suppress stdout summaries");

    auto add_common = [&](CLI::App* sub, bool with_in) {
        sub->fallthrough();  // global flags may follow the subcommand
        sub->add_option("--preset", opt.preset_name, "built-in preset name or preset file");
        if (with_in) sub->add_option("--in", opt.in_path, "input field (SSCT raw)");
    };
    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic field + ground truth");
    add_common(synth, false);
    CLI::App* fwd = app.add_subcommand("forward", "curvelet transform coefficient dump");
    add_common(fwd, true);
    CLI::App* est = app.add_subcommand("estimate", "local wave-vector estimation");
    add_common(est, true);
    est->add_option("--truth", opt.truth_path, "exact wave-vector field (SSCT raw)");
    est->add_flag("--dump-estimates", opt.dump_estimates, "write estimates.csv");
    est->add_flag("--dump-squeeze", opt.dump_squeeze, "write squeeze.csv");
    CLI::App* dec = app.add_subcommand("decompose", "mode decomposition");
    add_common(dec, true);
    dec->add_flag("--dump-squeeze", opt.dump_squeeze, "write squeeze.csv");
    CLI::App* bench = app.add_subcommand("bench", "curvelet vs wave-packet comparison");
    add_common(bench, false);
    CLI::App* sweep = app.add_subcommand("snr-sweep", "max R_delta across noise levels");
    add_common(sweep, false);

    try {
        app.parse(argc, argv);
        if (synth->parsed()) return cmd_synth(opt);
        if (fwd->parsed()) return cmd_forward(opt);
        if (est->parsed()) return cmd_estimate(opt);
        if (dec->parsed()) return cmd_decompose(opt);
        if (bench->parsed()) return cmd_bench(opt);
        if (sweep->parsed()) return cmd_snr_sweep(opt);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ssct::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "fatal: " << e.what() << "\n";
        return 3;
    }
}
