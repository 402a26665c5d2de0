#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qscomm/config_io.hpp"
#include "qscomm/csv.hpp"

using namespace qscomm;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path make_temp_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("qscomm_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(QSCOMM_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Reduced config: full schema, small community, short horizon.
fs::path write_small_config(const fs::path& dir, double dt = 0.01) {
    SimConfig cfg = default_config();
    for (auto& sp : cfg.species) sp.n_cells = 10;
    cfg.t_max = 400.0;
    cfg.dt = dt;
    cfg.record_stride = 50;
    const fs::path p = dir / "config.json";
    save_config(cfg, p.string());
    return p;
}

}  // namespace

TEST_CASE("simulate writes the documented CSV schema") {
    const fs::path dir = make_temp_dir("simulate");
    const fs::path cfg = write_small_config(dir);
    REQUIRE(run_cli("simulate --config " + cfg.string() + " --out " + dir.string()) == 0);

    const CsvTable t = read_csv((dir / "trajectory.csv").string());
    const std::vector<std::string> expected{"time", "rho_B", "rho_F",
                                            "a",    "m_mean_B", "m_mean_F"};
    CHECK(t.header == expected);
    CHECK(t.columns[0].size() == 400 / (0.01 * 50) + 1);

    const json manifest = json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["tool"] == "qscomm");
    CHECK(manifest["command"] == "simulate");
    CHECK(manifest.contains("config_hash"));
    CHECK(manifest.contains("seed"));
}

TEST_CASE("the default bundled run produces 1801 rows") {
    const fs::path dir = make_temp_dir("default_rows");
    REQUIRE(run_cli("simulate --seed 42 --out " + dir.string()) == 0);
    const CsvTable t = read_csv((dir / "trajectory.csv").string());
    CHECK(t.columns[0].size() == 1801);
}

TEST_CASE("simulate is byte-identical across reruns and thread counts") {
    const fs::path d1 = make_temp_dir("det1");
    const fs::path d2 = make_temp_dir("det2");
    const fs::path cfg = write_small_config(d1);
    fs::copy_file(cfg, d2 / "config.json");
    REQUIRE(run_cli("simulate --config " + cfg.string() + " --seed 7 --replicates 3 --threads 1 --out " +
                    d1.string()) == 0);
    REQUIRE(run_cli("simulate --config " + (d2 / "config.json").string() +
                    " --seed 7 --replicates 3 --threads 4 --out " + d2.string()) == 0);
    for (int r = 0; r < 3; ++r) {
        const std::string name = "trajectory_rep" + std::to_string(r) + ".csv";
        CHECK(slurp(d1 / name) == slurp(d2 / name));
    }
    CHECK(slurp(d1 / "manifest.json") == slurp(d2 / "manifest.json"));
}

TEST_CASE("invalid config is a deliberate exit 2 naming the field") {
    const fs::path dir = make_temp_dir("badcfg");
    SimConfig cfg = default_config();
    const fs::path p = dir / "bad.json";
    {
        auto j = config_to_json(cfg);
        j["dt"] = 0.0;
        std::ofstream out(p);
        out << j.dump(2);
    }
    CHECK(run_cli("simulate --config " + p.string() + " --out " + dir.string()) == 2);

    // unknown key
    {
        auto j = config_to_json(cfg);
        j["dtt"] = 0.01;
        std::ofstream out(dir / "bad2.json");
        out << j.dump(2);
    }
    CHECK(run_cli("simulate --config " + (dir / "bad2.json").string() + " --out " +
                  dir.string()) == 2);
}

TEST_CASE("unwritable output path is exit 4") {
    const fs::path dir = make_temp_dir("unwritable");
    const fs::path cfg = write_small_config(dir);
    CHECK(run_cli("simulate --config " + cfg.string() + " --out /proc/qscomm_cannot_write") == 4);
}

TEST_CASE("analyze on trajectory files names missing inputs") {
    const fs::path dir = make_temp_dir("analyze_traj");
    const fs::path cfg = write_small_config(dir);
    REQUIRE(run_cli("simulate --config " + cfg.string() + " --out " + dir.string()) == 0);
    // per-cell matrices are absent -> mi must fail with a clear diagnostic
    CHECK(run_cli("analyze --traj " + dir.string() + " --analyses mi --out " + dir.string()) ==
          4);
    // cross works from the mean series alone
    CHECK(run_cli("analyze --traj " + dir.string() + " --analyses cross,te --out " +
                  dir.string()) == 0);
    const json res = json::parse(slurp(dir / "results.json"));
    CHECK(res.contains("cross"));
    CHECK(res.contains("te"));

    // with --cells the single-cell matrices unlock mi
    REQUIRE(run_cli("simulate --config " + cfg.string() + " --cells --out " + dir.string()) == 0);
    CHECK(run_cli("analyze --traj " + dir.string() + " --analyses mi --out " + dir.string()) ==
          0);
}

TEST_CASE("analyze rejects an empty analysis set") {
    const fs::path dir = make_temp_dir("analyze_empty");
    const fs::path cfg = write_small_config(dir);
    CHECK(run_cli("analyze --config " + cfg.string() + " --analyses '' --out " + dir.string()) ==
          2);
    CHECK(run_cli("analyze --config " + cfg.string() + " --analyses bogus --out " +
                  dir.string()) == 2);
}

TEST_CASE("analyze bundle carries provenance and estimator settings") {
    const fs::path dir = make_temp_dir("analyze_cfg");
    const fs::path cfg = write_small_config(dir);
    REQUIRE(run_cli("analyze --config " + cfg.string() +
                    " --analyses cross,te --replicates 2 --out " + dir.string()) == 0);
    const json res = json::parse(slurp(dir / "results.json"));
    CHECK(res.contains("config_hash"));
    CHECK(res.contains("seed"));
    CHECK(res["settings"]["n_reps"] == 2);
    CHECK(res["cross"]["I_m1_rho2"].contains("bits"));
    CHECK(res["te"]["pop2_to_pop1"].contains("bits_raw"));
}

TEST_CASE("bode validates the frequency range and writes the documented columns") {
    const fs::path dir = make_temp_dir("bode");
    const fs::path cfg = write_small_config(dir);
    CHECK(run_cli("bode --config " + cfg.string() + " --freq-min 1 --freq-max 0.5 --out " +
                  dir.string()) == 2);

    REQUIRE(run_cli("bode --config " + cfg.string() +
                    " --freq-min 0.005 --freq-max 0.05 --freq-points 3 --replicates 1 --out " +
                    dir.string()) == 0);
    const CsvTable t = read_csv((dir / "bode.csv").string());
    const std::vector<std::string> expected{"freq_hz", "species", "gain",
                                            "gain_db", "phase_rad", "reliable"};
    CHECK(t.header == expected);
    CHECK(t.columns[0].size() == 6);  // 3 frequencies x 2 species
}

TEST_CASE("sensitivity echoes epsilon and rejects unknown parameters") {
    const fs::path dir = make_temp_dir("sens");
    const fs::path cfg = write_small_config(dir);
    CHECK(run_cli("sensitivity --config " + cfg.string() + " --params nope --out " +
                  dir.string()) == 2);

    REQUIRE(run_cli("sensitivity --config " + cfg.string() +
                    " --params gamma --replicates 1 --out " + dir.string()) == 0);
    const json res = json::parse(slurp(dir / "elasticity.json"));
    CHECK(res["reports"][0]["param"] == "gamma");
    CHECK(res["reports"][0]["epsilon"] == 0.2);
    CHECK(res["reports"][0]["S"] == 0.0);
}

TEST_CASE("scenario command validates names") {
    const fs::path dir = make_temp_dir("scen");
    CHECK(run_cli("scenario --scenario no_such --out " + dir.string()) == 2);
}
