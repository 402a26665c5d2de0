// qscomm - two-species quorum-sensing channel simulator and analysis CLI.
//
// Subcommands: simulate, analyze, bode, sensitivity, scenario.
// Exit codes: 0 success, 2 config/validation error, 3 numerical failure,
// 4 I/O failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qscomm/analysis.hpp"
#include "qscomm/config_io.hpp"
#include "qscomm/csv.hpp"
#include "qscomm/engine.hpp"
#include "qscomm/freq.hpp"
#include "qscomm/info.hpp"
#include "qscomm/sensitivity.hpp"
#include "qscomm/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qscomm;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int replicates = 0;
    int threads = 0;  // 0 -> hardware concurrency
};

void add_common(CLI::App* cmd, CommonArgs& args, int default_reps) {
    cmd->add_option("--config", args.config_path, "Configuration file (JSON)");
    cmd->add_option("--out", args.out_dir, "Output directory");
    cmd->add_option("--seed", args.seed, "Seed override")->each([&](const std::string&) {
        args.seed_set = true;
    });
    args.replicates = default_reps;
    cmd->add_option("--replicates", args.replicates, "Number of replicates");
    cmd->add_option("--threads", args.threads,
                    "Worker threads (0 = hardware); results do not depend on this");
}

SimConfig resolve_config(const CommonArgs& args) {
    SimConfig cfg = args.config_path.empty() ? default_config() : load_config(args.config_path);
    if (args.seed_set) cfg.seed = args.seed;
    return cfg;
}

fs::path ensure_out_dir(const std::string& dir) {
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
    return p;
}

void write_json_file(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path.string());
}

void write_manifest(const fs::path& out_dir, const std::string& command, const SimConfig& cfg,
                    const std::vector<std::string>& outputs, const json& extra = json::object()) {
    json manifest = {{"tool", "qscomm"},
                     {"version", kVersion},
                     {"command", command},
                     {"config_hash", config_hash(cfg)},
                     {"seed", cfg.seed},
                     {"config", config_to_json(cfg)},
                     {"outputs", outputs}};
    for (auto it = extra.begin(); it != extra.end(); ++it) manifest[it.key()] = it.value();
    write_json_file(out_dir / "manifest.json", manifest);
}

// ---------------------------------------------------------------------------

int cmd_simulate(const CommonArgs& args, bool write_cells) {
    const SimConfig cfg = resolve_config(args);
    const fs::path out = ensure_out_dir(args.out_dir);
    const int reps = std::max(args.replicates, 1);
    std::vector<std::string> outputs;
    const auto trajs = run_replicates(cfg, reps, args.threads);
    for (int r = 0; r < reps; ++r) {
        const std::string name =
            reps == 1 ? "trajectory.csv" : "trajectory_rep" + std::to_string(r) + ".csv";
        write_trajectory_csv((out / name).string(), trajs[static_cast<std::size_t>(r)]);
        outputs.push_back(name);
        if (write_cells) {
            for (int s = 0; s < 2; ++s) {
                const std::string cells_name =
                    (reps == 1 ? std::string("m_cells_pop") : "m_cells_rep" + std::to_string(r) +
                                                                  "_pop") +
                    std::to_string(s + 1) + ".csv";
                write_cell_matrix_csv((out / cells_name).string(),
                                      trajs[static_cast<std::size_t>(r)], s);
                outputs.push_back(cells_name);
            }
        }
    }
    write_manifest(out, "simulate", cfg, outputs);
    return 0;
}

int cmd_analyze(const CommonArgs& args, const std::string& traj_dir,
                const std::string& analyses_csv) {
    std::set<std::string> analyses;
    std::stringstream ss(analyses_csv);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) analyses.insert(item);
    if (analyses.empty()) throw ConfigError("no analyses requested (use --analyses mi,cross,te,noise)");

    const fs::path out = ensure_out_dir(args.out_dir);
    json results;
    SimConfig cfg = resolve_config(args);

    if (!traj_dir.empty()) {
        // Trajectory-file mode: only analyses whose inputs exist on disk.
        const fs::path tdir(traj_dir);
        const fs::path traj_csv = tdir / "trajectory.csv";
        if (!fs::exists(traj_csv))
            throw IoError("missing analysis input: " + traj_csv.string());
        Trajectory traj = read_trajectory_csv(traj_csv.string());
        if (analyses.count("noise"))
            throw ConfigError(
                "noise decomposition needs replicate runs; use --config mode instead of --traj");
        if (analyses.count("mi")) {
            for (int s = 0; s < 2; ++s) {
                const fs::path cells =
                    tdir / ("m_cells_pop" + std::to_string(s + 1) + ".csv");
                if (!fs::exists(cells))
                    throw IoError("missing analysis input: " + cells.string() +
                                  " (re-run simulate with --cells)");
                traj.m[s] = read_cell_matrix_csv(cells.string());
            }
        }
        AnalysisOptions opts;
        opts.n_threads = args.threads;
        if (args.seed_set) opts.boot_seed = args.seed;
        results["config_hash"] = "external-trajectory";
        results["seed"] = cfg.seed;
        const std::size_t ns = traj.n_samples();
        const std::size_t i0 =
            static_cast<std::size_t>(opts.burn_in_frac * static_cast<double>(ns - 1));
        std::vector<double> a(traj.a.begin() + static_cast<std::ptrdiff_t>(i0), traj.a.end());
        if (analyses.count("mi")) {
            for (int s = 0; s < 2; ++s) {
                std::vector<double> m(traj.m_mean[s].begin() + static_cast<std::ptrdiff_t>(i0),
                                      traj.m_mean[s].end());
                const std::string pop = s == 0 ? "pop1" : "pop2";
                MIEstimate est = ksg_mi_with_ci(a, m, opts.k, opts.block_len, opts.n_boot,
                                                opts.alpha, opts.boot_seed, opts.n_threads);
                results["mi"][pop + "_avg"] = {{"bits", est.bits},
                                               {"ci_low", est.ci_low},
                                               {"ci_high", est.ci_high},
                                               {"k", est.k},
                                               {"n_samples", est.n_samples},
                                               {"block_len", est.block_len}};
            }
        }
        if (analyses.count("cross")) {
            std::vector<double> m1(traj.m_mean[0].begin() + static_cast<std::ptrdiff_t>(i0),
                                   traj.m_mean[0].end());
            std::vector<double> m2(traj.m_mean[1].begin() + static_cast<std::ptrdiff_t>(i0),
                                   traj.m_mean[1].end());
            std::vector<double> r1(traj.rho[0].begin() + static_cast<std::ptrdiff_t>(i0),
                                   traj.rho[0].end());
            std::vector<double> r2(traj.rho[1].begin() + static_cast<std::ptrdiff_t>(i0),
                                   traj.rho[1].end());
            results["cross"]["I_m1_rho2"] = {{"bits", ksg_mi(m1, r2, opts.k)}};
            results["cross"]["I_m2_rho1"] = {{"bits", ksg_mi(m2, r1, opts.k)}};
        }
        if (analyses.count("te")) {
            std::vector<double> m1(traj.m_mean[0].begin() + static_cast<std::ptrdiff_t>(i0),
                                   traj.m_mean[0].end());
            std::vector<double> m2(traj.m_mean[1].begin() + static_cast<std::ptrdiff_t>(i0),
                                   traj.m_mean[1].end());
            const TransferEntropy te21 = transfer_entropy(m2, m1, opts.te_lag, opts.k);
            const TransferEntropy te12 = transfer_entropy(m1, m2, opts.te_lag, opts.k);
            results["te"] = {
                {"pop2_to_pop1", {{"bits_raw", te21.bits_raw}, {"bits", te21.bits}}},
                {"pop1_to_pop2", {{"bits_raw", te12.bits_raw}, {"bits", te12.bits}}},
                {"lag_samples", opts.te_lag}};
        }
    } else {
        AnalysisOptions opts;
        opts.n_reps = std::max(args.replicates, 1);
        opts.n_threads = args.threads;
        results = analyze(cfg, analyses, opts);
    }
    results["version"] = kVersion;
    write_json_file(out / "results.json", results);
    write_manifest(out, "analyze", cfg, {"results.json"});
    return 0;
}

int cmd_bode(const CommonArgs& args, double f_min, double f_max, int points, double amplitude,
             int cycles) {
    if (f_min >= f_max) throw ConfigError("--freq-min must be below --freq-max");
    const SimConfig cfg = resolve_config(args);
    const fs::path out = ensure_out_dir(args.out_dir);
    BodeOptions opts;
    opts.amplitude = amplitude;
    opts.n_cycles = cycles;
    opts.n_replicates = std::max(args.replicates, 1);
    opts.n_threads = args.threads;
    const auto points_v = bode_sweep(cfg, default_bode_freqs(f_min, f_max, points), opts);

    std::vector<double> freq, species, gain, gain_db, phase, reliable;
    for (const auto& p : points_v) {
        freq.push_back(p.freq_hz);
        species.push_back(p.species + 1);
        gain.push_back(p.gain);
        gain_db.push_back(p.gain_db);
        phase.push_back(p.phase_rad);
        reliable.push_back(p.reliable ? 1.0 : 0.0);
    }
    write_csv((out / "bode.csv").string(),
              {"freq_hz", "species", "gain", "gain_db", "phase_rad", "reliable"},
              {&freq, &species, &gain, &gain_db, &phase, &reliable});
    write_manifest(out, "bode", cfg, {"bode.csv"},
                   {{"freq_min", f_min}, {"freq_max", f_max}, {"freq_points", points}});
    return 0;
}

int cmd_sensitivity(const CommonArgs& args, const std::string& params_csv, double epsilon) {
    const SimConfig cfg = resolve_config(args);
    const fs::path out = ensure_out_dir(args.out_dir);
    std::vector<std::string> params;
    std::stringstream ss(params_csv);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) params.push_back(item);
    if (params.empty()) throw ConfigError("no parameters requested");

    ElasticityOptions opts;
    opts.n_reps = std::max(args.replicates, 1);
    opts.n_threads = args.threads;
    json reports = json::array();
    for (const auto& p : params) {
        const ElasticityReport rep = elasticity(cfg, p, epsilon, opts);
        reports.push_back({{"param", rep.param},
                           {"epsilon", rep.epsilon},
                           {"I0", rep.I0},
                           {"I_plus", rep.I_plus},
                           {"I_minus", rep.I_minus},
                           {"S", rep.S}});
    }
    write_json_file(out / "elasticity.json",
                    {{"version", kVersion},
                     {"config_hash", config_hash(cfg)},
                     {"seed", cfg.seed},
                     {"replicates", opts.n_reps},
                     {"reports", reports}});
    write_manifest(out, "sensitivity", cfg, {"elasticity.json"});
    return 0;
}

int cmd_scenario(const CommonArgs& args, const std::string& name) {
    const ScenarioSpec spec = scenario_by_name(name);
    SimConfig base = resolve_config(args);
    const SimConfig cfg = make_scenario_config(base, spec);
    const fs::path out = ensure_out_dir(args.out_dir);

    const int reps = std::max(args.replicates, 1);
    AnalysisOptions opts;
    opts.n_reps = reps;
    opts.n_threads = args.threads;
    json results = analyze(cfg, {"mi", "cross", "te", "noise"}, opts);
    results["version"] = kVersion;
    results["scenario"] = {{"name", spec.name},
                           {"split_f", spec.split_f},
                           {"split_b", spec.split_b}};

    const auto traj = simulate(cfg);
    write_trajectory_csv((out / "trajectory.csv").string(), traj);
    write_json_file(out / "results.json", results);
    write_manifest(out, "scenario", cfg, {"trajectory.csv", "results.json"},
                   {{"scenario", spec.name}});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic two-species quorum-sensing channel: simulation and "
                 "information-theoretic analysis"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CommonArgs sim_args, ana_args, bode_args, sens_args, scen_args;

    auto* sim = app.add_subcommand("simulate", "Integrate the SDE system and write CSVs");
    add_common(sim, sim_args, 1);
    bool write_cells = false;
    sim->add_flag("--cells", write_cells, "Also write per-cell matrix CSVs");

    auto* ana = app.add_subcommand("analyze", "Information metrics on runs or trajectories");
    add_common(ana, ana_args, 5);
    std::string traj_dir, analyses_csv = "mi,cross,te,noise";
    ana->add_option("--traj", traj_dir, "Directory with simulate outputs (instead of --config)");
    ana->add_option("--analyses", analyses_csv, "Comma list from {mi,cross,te,noise}");

    auto* bode = app.add_subcommand("bode", "Frequency response of the population means");
    add_common(bode, bode_args, 2);
    double f_min = 1e-3, f_max = 10.0, amplitude = 0.0;
    int points = 20, cycles = 5;
    bode->add_option("--freq-min", f_min, "Lowest frequency [Hz]");
    bode->add_option("--freq-max", f_max, "Highest frequency [Hz]");
    bode->add_option("--freq-points", points, "Number of log-spaced frequencies");
    bode->add_option("--amplitude", amplitude, "Induced a-oscillation (0 = 5% of steady state)");
    bode->add_option("--cycles", cycles, "Minimum measured cycles per point");

    auto* sens = app.add_subcommand("sensitivity", "Elasticity of averaged mutual information");
    add_common(sens, sens_args, 3);
    std::string params_csv = "alpha_luxs,tau_a,tau_delta";
    double epsilon = 0.2;
    sens->add_option("--params", params_csv,
                     "Comma list from {alpha_luxs,tau_a,tau_delta,gamma}");
    sens->add_option("--epsilon", epsilon, "Relative perturbation");

    auto* scen = app.add_subcommand("scenario", "Run a named scenario end to end");
    add_common(scen, scen_args, 5);
    std::string scenario_name = "baseline";
    scen->add_option("--scenario", scenario_name,
                     "baseline | firmicutes_dominant | bacteroidetes_dominant | custom");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(sim_args, write_cells);
        if (ana->parsed()) return cmd_analyze(ana_args, traj_dir, analyses_csv);
        if (bode->parsed()) return cmd_bode(bode_args, f_min, f_max, points, amplitude, cycles);
        if (sens->parsed()) return cmd_sensitivity(sens_args, params_csv, epsilon);
        if (scen->parsed()) return cmd_scenario(scen_args, scenario_name);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
