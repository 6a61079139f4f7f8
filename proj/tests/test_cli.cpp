#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

#ifndef SSCT_BIN
#error "SSCT_BIN must point at the ssct executable"
#endif

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(SSCT_BIN) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

fs::path fresh_dir(const char* name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("synth then estimate reproduces the smoke preset end to end") {
    const fs::path synth_dir = fresh_dir("ssct_cli_synth");
    REQUIRE(run("synth --preset smoke --out " + synth_dir.string() + " --threads 1 --quiet") == 0);
    CHECK(fs::exists(synth_dir / "field.ssct"));
    CHECK(fs::exists(synth_dir / "truth_001.ssct"));
    CHECK(fs::exists(synth_dir / "preset.json"));

    // every output referenced by the manifest exists
    std::ifstream manifest(synth_dir / "manifest.txt");
    REQUIRE(manifest.good());
    std::string line;
    std::size_t outputs = 0;
    while (std::getline(manifest, line))
        if (line.rfind("output: ", 0) == 0) {
            CHECK(fs::exists(synth_dir / line.substr(8)));
            ++outputs;
        }
    CHECK(outputs >= 3);

    const fs::path est_dir = fresh_dir("ssct_cli_est");
    REQUIRE(run("estimate --preset smoke --in " + (synth_dir / "field.ssct").string() +
                " --truth " + (synth_dir / "truth_001.ssct").string() + " --out " +
                est_dir.string() + " --threads 1 --quiet") == 0);
    const std::string est_manifest = slurp(est_dir / "manifest.txt");
    CHECK(est_manifest.find("stat max_R:") != std::string::npos);
    CHECK(fs::exists(est_dir / "error.csv"));
    CHECK(fs::exists(est_dir / "error.pgm"));
    CHECK(fs::exists(est_dir / "squeeze_mass.pgm.txt"));
}

TEST_CASE("identical runs write byte-identical manifests") {
    const fs::path a = fresh_dir("ssct_cli_det_a");
    const fs::path b = fresh_dir("ssct_cli_det_b");
    REQUIRE(run("estimate --preset smoke --seed 9 --threads 1 --quiet --out " + a.string()) == 0);
    REQUIRE(run("estimate --preset smoke --seed 9 --threads 1 --quiet --out " + b.string()) == 0);
    CHECK(slurp(a / "manifest.txt") == slurp(b / "manifest.txt"));
    CHECK(slurp(a / "preset.json") == slurp(b / "preset.json"));
}

TEST_CASE("decompose writes modes, clusters and a residual") {
    const fs::path dir = fresh_dir("ssct_cli_dec");
    REQUIRE(run("decompose --preset smoke2 --threads 1 --quiet --out " + dir.string()) == 0);
    const std::string manifest = slurp(dir / "manifest.txt");
    CHECK(manifest.find("stat modes: 2") != std::string::npos);
    CHECK(fs::exists(dir / "mode_001.ssct"));
    CHECK(fs::exists(dir / "mode_002.ssct"));
    CHECK(fs::exists(dir / "residual.ssct"));
    CHECK(fs::exists(dir / "clusters.csv"));
}

TEST_CASE("forward writes the tiling summary and the coefficient dump") {
    const fs::path dir = fresh_dir("ssct_cli_fwd");
    REQUIRE(run("forward --preset smoke --threads 1 --quiet --out " + dir.string()) == 0);
    CHECK(fs::exists(dir / "coeffs.bin"));
    CHECK(fs::exists(dir / "tiling.csv"));
    // frame energy in the manifest matches the field energy (tight frame)
    const std::string manifest = slurp(dir / "manifest.txt");
    CHECK(manifest.find("stat frame_energy:") != std::string::npos);
}

TEST_CASE("validation failures exit with code 2") {
    const fs::path dir = fresh_dir("ssct_cli_bad");
    fs::create_directories(dir);
    const fs::path cfg = dir / "bad.json";
    std::ofstream(cfg) << R"({"version": 1, "no_such_key": true})";
    CHECK(run("estimate --config " + cfg.string() + " --quiet --out " + dir.string()) == 2);
    CHECK(run("estimate --preset smoke --in /nonexistent.ssct --quiet --out " + dir.string()) == 2);
    CHECK(run("estimate --preset no_such_preset --quiet --out " + dir.string()) == 2);
}
