#pragma once

#include <string>

#include <json.hpp>

#include "qscomm/model.hpp"

namespace qscomm {

// Bundled two-species gut community: species[0] = Firmicutes (population 1),
// species[1] = Bacteroidetes (population 2), 70/30 final-density split.
SimConfig default_config();

nlohmann::json config_to_json(const SimConfig& cfg);

// Strict parse: unknown keys anywhere in the tree are hard errors.
SimConfig config_from_json(const nlohmann::json& j);

SimConfig load_config(const std::string& path);
void save_config(const SimConfig& cfg, const std::string& path);

// FNV-1a over the canonical JSON dump; embedded in every output for provenance.
std::string config_hash(const SimConfig& cfg);

struct ScenarioSpec {
    std::string name;
    double split_f = 0.7;  // final density of population 1 (Firmicutes)
    double split_b = 0.3;  // final density of population 2 (Bacteroidetes)
};

// baseline -> (0.7, 0.3), firmicutes_dominant -> (0.9, 0.1),
// bacteroidetes_dominant -> (0.4, 0.6). "custom" keeps the config untouched.
ScenarioSpec scenario_by_name(const std::string& name);

// Rescales both species' density ramps to the split (initial densities scale by
// the same ratio, total final density stays 1) and allocates the simulated
// cells proportionally to abundance (200 total).
SimConfig make_scenario_config(const SimConfig& base, const ScenarioSpec& spec);

}  // namespace qscomm
