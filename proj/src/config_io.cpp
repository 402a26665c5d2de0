#include "qscomm/config_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

namespace qscomm {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (allowed.find(it.key()) == allowed.end())
            throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

double get_num(const json& obj, const std::string& key, double fallback,
               const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
    return v.get<double>();
}

json schedule_to_json(const DensitySchedule& s) {
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ExpRamp>) {
                return {{"type", "exp_ramp"},
                        {"rho_minus", v.rho_minus},
                        {"rho_plus", v.rho_plus},
                        {"duration", v.duration}};
            } else if constexpr (std::is_same_v<T, StepChange>) {
                return {{"type", "step"},
                        {"rho_before", v.rho_before},
                        {"rho_after", v.rho_after},
                        {"t_switch", v.t_switch}};
            } else if constexpr (std::is_same_v<T, LogisticRamp>) {
                return {{"type", "logistic"},
                        {"rho_minus", v.rho_minus},
                        {"rho_plus", v.rho_plus},
                        {"midpoint", v.midpoint},
                        {"steepness", v.steepness}};
            } else {
                json knots = json::array();
                for (const auto& kn : v.knots) knots.push_back({kn.first, kn.second});
                return {{"type", "piecewise"}, {"knots", knots}};
            }
        },
        s.variant());
}

DensitySchedule schedule_from_json(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("type"))
        throw ConfigError(where + ": density_schedule needs a 'type' field");
    const std::string type = j.at("type").get<std::string>();
    if (type == "exp_ramp") {
        check_keys(j, {"type", "rho_minus", "rho_plus", "duration"}, where);
        return DensitySchedule::exp_ramp(get_num(j, "rho_minus", 1e-4, where),
                                         get_num(j, "rho_plus", 1.0, where),
                                         get_num(j, "duration", 1800.0, where));
    }
    if (type == "step") {
        check_keys(j, {"type", "rho_before", "rho_after", "t_switch"}, where);
        return DensitySchedule::step(get_num(j, "rho_before", 1e-4, where),
                                     get_num(j, "rho_after", 1.0, where),
                                     get_num(j, "t_switch", 0.0, where));
    }
    if (type == "logistic") {
        check_keys(j, {"type", "rho_minus", "rho_plus", "midpoint", "steepness"}, where);
        return DensitySchedule::logistic(get_num(j, "rho_minus", 1e-4, where),
                                         get_num(j, "rho_plus", 1.0, where),
                                         get_num(j, "midpoint", 900.0, where),
                                         get_num(j, "steepness", 0.01, where));
    }
    if (type == "piecewise") {
        check_keys(j, {"type", "knots"}, where);
        if (!j.contains("knots") || !j.at("knots").is_array())
            throw ConfigError(where + ": piecewise schedule needs a 'knots' array");
        std::vector<std::pair<double, double>> knots;
        for (const auto& kn : j.at("knots")) {
            if (!kn.is_array() || kn.size() != 2)
                throw ConfigError(where + ": each knot must be a [t, rho] pair");
            knots.emplace_back(kn[0].get<double>(), kn[1].get<double>());
        }
        return DensitySchedule::piecewise(std::move(knots));
    }
    throw ConfigError(where + ": unknown density_schedule type '" + type + "'");
}

json species_to_json(const SpeciesParams& sp) {
    return {{"name", sp.name},
            {"delta", sp.delta},
            {"mu_g_coeff", sp.mu_g_coeff},
            {"k_resp", sp.k_resp},
            {"K_A", sp.K_A},
            {"n", sp.n},
            {"alpha_luxs", sp.alpha_luxs},
            {"sigma_m", sp.sigma_m},
            {"mu_scale", sp.mu_scale},
            {"n_cells", sp.n_cells},
            {"density_schedule", schedule_to_json(sp.density_schedule)}};
}

SpeciesParams species_from_json(const json& j, const std::string& where) {
    check_keys(j,
               {"name", "delta", "mu_g_coeff", "k_resp", "K_A", "n", "alpha_luxs", "sigma_m",
                "mu_scale", "n_cells", "density_schedule"},
               where);
    SpeciesParams sp;
    if (j.contains("name")) sp.name = j.at("name").get<std::string>();
    sp.delta = get_num(j, "delta", sp.delta, where);
    sp.mu_g_coeff = get_num(j, "mu_g_coeff", sp.mu_g_coeff, where);
    sp.k_resp = get_num(j, "k_resp", sp.k_resp, where);
    sp.K_A = get_num(j, "K_A", sp.K_A, where);
    sp.n = get_num(j, "n", sp.n, where);
    sp.alpha_luxs = get_num(j, "alpha_luxs", sp.alpha_luxs, where);
    sp.sigma_m = get_num(j, "sigma_m", sp.sigma_m, where);
    sp.mu_scale = get_num(j, "mu_scale", sp.mu_scale, where);
    if (j.contains("n_cells")) {
        if (!j.at("n_cells").is_number_integer())
            throw ConfigError(where + ".n_cells: expected an integer");
        sp.n_cells = j.at("n_cells").get<int>();
    }
    if (j.contains("density_schedule"))
        sp.density_schedule = schedule_from_json(j.at("density_schedule"),
                                                 where + ".density_schedule");
    return sp;
}

}  // namespace

SimConfig default_config() {
    SimConfig cfg;
    cfg.species[0].name = "Firmicutes";
    cfg.species[0].alpha_luxs = 0.12;
    cfg.species[0].mu_scale = 1.0;
    cfg.species[0].sigma_m = 0.5;
    cfg.species[0].n_cells = 140;
    cfg.species[0].density_schedule = DensitySchedule::exp_ramp(0.7e-4, 0.7, 1800.0);

    cfg.species[1].name = "Bacteroidetes";
    cfg.species[1].alpha_luxs = 0.05;
    cfg.species[1].mu_scale = 0.95;
    cfg.species[1].sigma_m = 0.5;
    cfg.species[1].n_cells = 60;
    cfg.species[1].density_schedule = DensitySchedule::exp_ramp(0.3e-4, 0.3, 1800.0);

    cfg.env.k_out = 0.1;
    cfg.env.mu_gut = 0.0;
    cfg.env.sigma_a = 0.1;
    cfg.env.volume = 200.0;

    cfg.dt = 0.01;
    cfg.t_max = 1800.0;
    cfg.record_stride = 100;
    cfg.seed = 42;
    cfg.a0 = 0.0;
    cfg.m0 = 0.01;
    return cfg;
}

json config_to_json(const SimConfig& cfg) {
    return {{"species", json::array({species_to_json(cfg.species[0]),
                                     species_to_json(cfg.species[1])})},
            {"env",
             {{"k_out", cfg.env.k_out},
              {"mu_gut", cfg.env.mu_gut},
              {"sigma_a", cfg.env.sigma_a},
              {"volume", cfg.env.volume}}},
            {"dt", cfg.dt},
            {"t_max", cfg.t_max},
            {"record_stride", cfg.record_stride},
            {"seed", cfg.seed},
            {"a0", cfg.a0},
            {"m0", cfg.m0},
            {"gamma", cfg.gamma},
            {"v_avg", cfg.v_avg},
            {"memory_cap_bytes", cfg.memory_cap_bytes}};
}

SimConfig config_from_json(const json& j) {
    check_keys(j,
               {"species", "env", "dt", "t_max", "record_stride", "seed", "a0", "m0", "gamma",
                "v_avg", "memory_cap_bytes"},
               "config");
    SimConfig cfg = default_config();
    if (j.contains("species")) {
        const json& sp = j.at("species");
        if (!sp.is_array() || sp.size() != 2)
            throw ConfigError("config.species: expected an array of exactly 2 species blocks");
        cfg.species[0] = species_from_json(sp[0], "config.species[0]");
        cfg.species[1] = species_from_json(sp[1], "config.species[1]");
    }
    if (j.contains("env")) {
        const json& e = j.at("env");
        check_keys(e, {"k_out", "mu_gut", "sigma_a", "volume"}, "config.env");
        cfg.env.k_out = get_num(e, "k_out", cfg.env.k_out, "config.env");
        cfg.env.mu_gut = get_num(e, "mu_gut", cfg.env.mu_gut, "config.env");
        cfg.env.sigma_a = get_num(e, "sigma_a", cfg.env.sigma_a, "config.env");
        cfg.env.volume = get_num(e, "volume", cfg.env.volume, "config.env");
    }
    cfg.dt = get_num(j, "dt", cfg.dt, "config");
    cfg.t_max = get_num(j, "t_max", cfg.t_max, "config");
    if (j.contains("record_stride")) {
        if (!j.at("record_stride").is_number_integer())
            throw ConfigError("config.record_stride: expected an integer");
        cfg.record_stride = j.at("record_stride").get<int>();
    }
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer())
            throw ConfigError("config.seed: expected a 64-bit integer");
        cfg.seed = j.at("seed").get<std::uint64_t>();
    }
    cfg.a0 = get_num(j, "a0", cfg.a0, "config");
    cfg.m0 = get_num(j, "m0", cfg.m0, "config");
    cfg.gamma = get_num(j, "gamma", cfg.gamma, "config");
    cfg.v_avg = get_num(j, "v_avg", cfg.v_avg, "config");
    if (j.contains("memory_cap_bytes"))
        cfg.memory_cap_bytes = j.at("memory_cap_bytes").get<std::uint64_t>();
    cfg.validate();
    return cfg;
}

SimConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return config_from_json(j);
}

void save_config(const SimConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write config file: " + path);
    out << config_to_json(cfg).dump(2) << "\n";
}

std::string config_hash(const SimConfig& cfg) {
    const std::string dump = config_to_json(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

ScenarioSpec scenario_by_name(const std::string& name) {
    if (name == "baseline") return {"baseline", 0.7, 0.3};
    if (name == "firmicutes_dominant") return {"firmicutes_dominant", 0.9, 0.1};
    if (name == "bacteroidetes_dominant") return {"bacteroidetes_dominant", 0.4, 0.6};
    if (name == "custom") return {"custom", 0.0, 0.0};
    throw ConfigError("unknown scenario '" + name +
                      "'; valid: baseline, firmicutes_dominant, bacteroidetes_dominant, custom");
}

SimConfig make_scenario_config(const SimConfig& base, const ScenarioSpec& spec) {
    if (spec.name == "custom") return base;
    if (!(spec.split_f > 0.0 && spec.split_b > 0.0))
        throw ConfigError("scenario splits must be positive");
    SimConfig cfg = base;
    const std::array<double, 2> split{spec.split_f, spec.split_b};
    const int total_cells = base.species[0].n_cells + base.species[1].n_cells;
    for (int s = 0; s < 2; ++s) {
        cfg.species[s].density_schedule =
            DensitySchedule::exp_ramp(split[s] * 1e-4, split[s], base.t_max);
        cfg.species[s].n_cells = std::max(
            1, static_cast<int>(std::lround(split[s] * total_cells)));
    }
    return cfg;
}

}  // namespace qscomm
