// SPDX-License-Identifier: Apache-2.0
#include "risnet/config.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace risnet {

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double db_to_linear_power(double db) { return std::pow(10.0, db / 10.0); }
double dbi_to_amplitude(double dbi) { return std::pow(10.0, dbi / 20.0); }

double NetworkConfig::tx_power_w() const { return dbm_to_watt(tx_power_dbm); }
double NetworkConfig::noise_w() const { return dbm_to_watt(noise_dbm); }

void NetworkConfig::validate() const {
    if (num_bs < 1) throw std::invalid_argument("num_bs must be positive");
    if (num_ue < 1) throw std::invalid_argument("num_ue must be positive");
    if (num_antennas < 1) throw std::invalid_argument("num_antennas must be positive");
    if (ris_cols < 1 || ris_rows < 1)
        throw std::invalid_argument("RIS panel dimensions must be positive");
    if (num_nlos_paths < 0) throw std::invalid_argument("num_nlos_paths must be >= 0");
    if (codebook_bits != kContinuousCodebook && codebook_bits < 1)
        throw std::invalid_argument("codebook_bits must be >= 1 or continuous");
    if (static_cast<int>(bs_positions.size()) != num_bs)
        throw std::invalid_argument("bs_positions size must equal num_bs");
    if (ue_region_radius < 0.0)
        throw std::invalid_argument("ue_region_radius must be non-negative");
    if (ue_positions && static_cast<int>(ue_positions->size()) != num_ue)
        throw std::invalid_argument("ue_positions size must equal num_ue");
}

void EnvConfig::validate() const {
    network.validate();
    if (episodes < 1) throw std::invalid_argument("episodes must be positive");
    if (steps_per_episode < 1)
        throw std::invalid_argument("steps_per_episode must be positive");
    if (r_min < 0.0) throw std::invalid_argument("r_min must be non-negative");
    if (penalty_weight < 0.0)
        throw std::invalid_argument("penalty_weight must be non-negative");
}

void SacHyperparams::validate() const {
    if (discount <= 0.0 || discount >= 1.0)
        throw std::invalid_argument("discount must lie in (0, 1)");
    if (tau <= 0.0 || tau > 1.0) throw std::invalid_argument("tau must lie in (0, 1]");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be positive");
    if (learning_rate <= 0.0) throw std::invalid_argument("learning_rate must be positive");
    if (buffer_capacity == 0) throw std::invalid_argument("buffer_capacity must be positive");
    if (target_update_interval < 1)
        throw std::invalid_argument("target_update_interval must be positive");
    if (gradient_steps < 1) throw std::invalid_argument("gradient_steps must be positive");
    if (warmup_steps < 0) throw std::invalid_argument("warmup_steps must be >= 0");
    if (hidden_sizes.empty()) throw std::invalid_argument("hidden_sizes must not be empty");
    for (int h : hidden_sizes)
        if (h < 1) throw std::invalid_argument("hidden layer sizes must be positive");
}

namespace {

void get_if_present(const nlohmann::json& j, const char* key, auto& out) {
    if (auto it = j.find(key); it != j.end()) it->get_to(out);
}

}  // namespace

void to_json(nlohmann::json& j, const PathLossParams& p) {
    j = {{"kappa_a_db", p.kappa_a_db}, {"kappa_b", p.kappa_b}, {"sigma_c_db", p.sigma_c_db}};
}

void from_json(const nlohmann::json& j, PathLossParams& p) {
    get_if_present(j, "kappa_a_db", p.kappa_a_db);
    get_if_present(j, "kappa_b", p.kappa_b);
    get_if_present(j, "sigma_c_db", p.sigma_c_db);
}

void to_json(nlohmann::json& j, const NetworkConfig& c) {
    j = {{"num_bs", c.num_bs},
         {"num_ue", c.num_ue},
         {"num_antennas", c.num_antennas},
         {"ris_cols", c.ris_cols},
         {"ris_rows", c.ris_rows},
         {"num_nlos_paths", c.num_nlos_paths},
         {"codebook_bits", c.codebook_bits},
         {"tx_power_dbm", c.tx_power_dbm},
         {"noise_dbm", c.noise_dbm},
         {"nlos", c.nlos},
         {"los", c.los},
         {"tx_gain_dbi", c.tx_gain_dbi},
         {"rx_gain_dbi", c.rx_gain_dbi},
         {"shadowing", c.shadowing},
         {"direct_mode", static_cast<int>(c.direct_mode)},
         {"unit_modulus_ris", c.unit_modulus_ris},
         {"bs_positions", c.bs_positions},
         {"ris_position", c.ris_position},
         {"ue_region_center", c.ue_region_center},
         {"ue_region_radius", c.ue_region_radius}};
    if (c.ue_positions) j["ue_positions"] = *c.ue_positions;
}

void from_json(const nlohmann::json& j, NetworkConfig& c) {
    get_if_present(j, "num_bs", c.num_bs);
    get_if_present(j, "num_ue", c.num_ue);
    get_if_present(j, "num_antennas", c.num_antennas);
    get_if_present(j, "ris_cols", c.ris_cols);
    get_if_present(j, "ris_rows", c.ris_rows);
    get_if_present(j, "num_nlos_paths", c.num_nlos_paths);
    get_if_present(j, "codebook_bits", c.codebook_bits);
    get_if_present(j, "tx_power_dbm", c.tx_power_dbm);
    get_if_present(j, "noise_dbm", c.noise_dbm);
    get_if_present(j, "nlos", c.nlos);
    get_if_present(j, "los", c.los);
    get_if_present(j, "tx_gain_dbi", c.tx_gain_dbi);
    get_if_present(j, "rx_gain_dbi", c.rx_gain_dbi);
    get_if_present(j, "shadowing", c.shadowing);
    if (auto it = j.find("direct_mode"); it != j.end())
        c.direct_mode = static_cast<DirectLinkMode>(it->get<int>());
    get_if_present(j, "unit_modulus_ris", c.unit_modulus_ris);
    get_if_present(j, "bs_positions", c.bs_positions);
    get_if_present(j, "ris_position", c.ris_position);
    get_if_present(j, "ue_region_center", c.ue_region_center);
    get_if_present(j, "ue_region_radius", c.ue_region_radius);
    if (auto it = j.find("ue_positions"); it != j.end())
        c.ue_positions = it->get<std::vector<Vec2>>();
}

void to_json(nlohmann::json& j, const EnvConfig& c) {
    j = {{"network", c.network},
         {"episodes", c.episodes},
         {"steps_per_episode", c.steps_per_episode},
         {"r_min", c.r_min},
         {"penalty_weight", c.penalty_weight},
         {"resample_ue_positions", c.resample_ue_positions},
         {"resample_channels", c.resample_channels},
         {"strict_association", c.strict_association}};
}

void from_json(const nlohmann::json& j, EnvConfig& c) {
    get_if_present(j, "network", c.network);
    get_if_present(j, "episodes", c.episodes);
    get_if_present(j, "steps_per_episode", c.steps_per_episode);
    get_if_present(j, "r_min", c.r_min);
    get_if_present(j, "penalty_weight", c.penalty_weight);
    get_if_present(j, "resample_ue_positions", c.resample_ue_positions);
    get_if_present(j, "resample_channels", c.resample_channels);
    get_if_present(j, "strict_association", c.strict_association);
}

void to_json(nlohmann::json& j, const SacHyperparams& c) {
    j = {{"discount", c.discount},
         {"tau", c.tau},
         {"batch_size", c.batch_size},
         {"learning_rate", c.learning_rate},
         {"buffer_capacity", c.buffer_capacity},
         {"target_update_interval", c.target_update_interval},
         {"gradient_steps", c.gradient_steps},
         {"warmup_steps", c.warmup_steps},
         {"hidden_sizes", c.hidden_sizes}};
    if (c.target_entropy) j["target_entropy"] = *c.target_entropy;
}

void from_json(const nlohmann::json& j, SacHyperparams& c) {
    get_if_present(j, "discount", c.discount);
    get_if_present(j, "tau", c.tau);
    get_if_present(j, "batch_size", c.batch_size);
    get_if_present(j, "learning_rate", c.learning_rate);
    get_if_present(j, "buffer_capacity", c.buffer_capacity);
    get_if_present(j, "target_update_interval", c.target_update_interval);
    get_if_present(j, "gradient_steps", c.gradient_steps);
    get_if_present(j, "warmup_steps", c.warmup_steps);
    get_if_present(j, "hidden_sizes", c.hidden_sizes);
    if (auto it = j.find("target_entropy"); it != j.end())
        c.target_entropy = it->get<double>();
}

EnvConfig load_env_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    EnvConfig cfg = j.get<EnvConfig>();
    cfg.validate();
    return cfg;
}

namespace presets {

EnvConfig paper() {
    EnvConfig cfg;
    cfg.network.num_bs = 3;
    cfg.network.num_ue = 16;
    cfg.network.num_antennas = 32;
    cfg.network.ris_cols = 8;
    cfg.network.ris_rows = 8;
    cfg.network.codebook_bits = 2;
    cfg.validate();
    return cfg;
}

// The small presets put everything a few metres apart with the direct path
// blocked, so the reflected link carries the traffic and sum rates are O(1)
// bps/Hz instead of vanishing with the double path loss of a far-field cascade.
EnvConfig ci() {
    EnvConfig cfg;
    auto& net = cfg.network;
    net.num_bs = 2;
    net.num_ue = 2;
    net.num_antennas = 4;
    net.ris_cols = 2;
    net.ris_rows = 2;
    net.num_nlos_paths = 2;
    net.codebook_bits = 1;
    net.direct_mode = DirectLinkMode::kBlocked;
    net.unit_modulus_ris = true;
    net.bs_positions = {{0.0, 0.0}, {6.0, 0.0}};
    net.ris_position = {1.5, 1.5};
    net.ue_region_center = {4.5, 1.5};
    net.ue_region_radius = 1.0;
    cfg.episodes = 150;
    cfg.steps_per_episode = 50;
    cfg.resample_channels = false;
    cfg.validate();
    return cfg;
}

// Rich scattering (NLoS paths as strong as LoS) keeps the reflected channels
// of co-served users linearly independent, so zero-forcing several users
// through the surface stays well conditioned. Strict association caps how
// many users share the owning BS, which removes the dead zero-reward region
// from the agent's action space.
EnvConfig mid() {
    EnvConfig cfg;
    auto& net = cfg.network;
    net.num_bs = 3;
    net.num_ue = 6;
    net.num_antennas = 8;
    net.ris_cols = 4;
    net.ris_rows = 4;
    net.num_nlos_paths = 6;
    net.codebook_bits = 2;
    net.direct_mode = DirectLinkMode::kBlocked;
    net.unit_modulus_ris = true;
    net.nlos = net.los;
    net.bs_positions = {{0.0, 0.0}, {8.0, 0.0}, {0.0, 8.0}};
    net.ris_position = {2.0, 2.0};
    net.ue_region_center = {5.0, 2.0};
    net.ue_region_radius = 2.5;
    cfg.episodes = 80;
    cfg.steps_per_episode = 40;
    cfg.resample_channels = false;
    cfg.strict_association = true;
    cfg.validate();
    return cfg;
}

EnvConfig by_name(const std::string& name) {
    if (name == "paper") return paper();
    if (name == "ci") return ci();
    if (name == "mid") return mid();
    throw std::invalid_argument("unknown preset: " + name);
}

SacHyperparams ci_sac() {
    SacHyperparams hp;
    hp.hidden_sizes = {64, 64};
    hp.warmup_steps = 500;
    hp.learning_rate = 3e-4;
    return hp;
}

SacHyperparams mid_sac() {
    SacHyperparams hp;
    hp.hidden_sizes = {128, 128};
    hp.warmup_steps = 500;
    hp.learning_rate = 1e-3;
    hp.batch_size = 128;
    return hp;
}

}  // namespace presets

}  // namespace risnet
