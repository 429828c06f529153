// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace risnet {

using Vec2 = std::array<double, 2>;

/// Distance-dependent loss in dB: kappa_a + 10 * kappa_b * log10(d) + shadowing.
struct PathLossParams {
    double kappa_a_db = 72.0;
    double kappa_b = 2.92;
    double sigma_c_db = 8.7;  // shadowing standard deviation
};

enum class DirectLinkMode { kNlos, kLos, kBlocked };

/// Sentinel for a continuous (unquantized) steering-angle codebook.
inline constexpr int kContinuousCodebook = -1;

/// Scenario description: counts, powers, propagation constants and geometry.
/// Single source of truth for one network instance.
struct NetworkConfig {
    int num_bs = 3;         // J
    int num_ue = 16;        // K
    int num_antennas = 32;  // N, transmit antennas per BS
    int ris_cols = 8;       // M_h, horizontal reflecting elements
    int ris_rows = 8;       // M_v, vertical reflecting elements
    int num_nlos_paths = 5; // L, NLoS paths of the BS-RIS link
    int codebook_bits = 2;  // B, or kContinuousCodebook

    double tx_power_dbm = 30.0;  // per-BS power budget P_j
    double noise_dbm = -85.0;    // receiver noise sigma^2

    PathLossParams nlos{72.0, 2.92, 8.7};
    PathLossParams los{61.4, 2.0, 5.8};
    double tx_gain_dbi = 9.82;  // xi_t
    double rx_gain_dbi = 0.0;   // xi_r
    bool shadowing = true;

    DirectLinkMode direct_mode = DirectLinkMode::kNlos;
    // Normalized phase vectors carry a 1/sqrt(M) factor; this drops it so
    // each reflecting element has unit modulus.
    bool unit_modulus_ris = false;

    std::vector<Vec2> bs_positions = {{0.0, 0.0}, {200.0, 0.0}, {0.0, 200.0}};
    Vec2 ris_position = {50.0, 100.0};
    Vec2 ue_region_center = {150.0, 100.0};
    double ue_region_radius = 30.0;
    // When set, overrides random placement inside the region.
    std::optional<std::vector<Vec2>> ue_positions;

    int ris_elements() const { return ris_cols * ris_rows; }
    double tx_power_w() const;
    double noise_w() const;
    void validate() const;  // throws std::invalid_argument
};

/// Episode structure and reward shaping around a NetworkConfig.
struct EnvConfig {
    NetworkConfig network;
    int episodes = 500;
    int steps_per_episode = 100;
    double r_min = 0.0;          // QoS floor, bps/Hz
    double penalty_weight = 0.0; // reward penalty per bps/Hz of QoS shortfall
    bool resample_ue_positions = false;
    bool resample_channels = true;  // redraw fading between episodes
    bool strict_association = false; // repair associations that leave a BS idle
    void validate() const;
};

struct SacHyperparams {
    double discount = 0.95;
    double tau = 0.005;
    int batch_size = 64;
    double learning_rate = 1e-4;
    std::size_t buffer_capacity = 1'000'000;
    int target_update_interval = 1;
    int gradient_steps = 1;
    int warmup_steps = 1000;
    std::vector<int> hidden_sizes = {256, 256};
    // Defaults to -(action dimension) when unset.
    std::optional<double> target_entropy;
    void validate() const;
};

// dB helpers; dBi gains convert on the amplitude scale (10^(dBi/20)).
double dbm_to_watt(double dbm);
double db_to_linear_power(double db);
double dbi_to_amplitude(double dbi);

// JSON (de)serialization; missing keys keep defaults.
void to_json(nlohmann::json& j, const NetworkConfig& c);
void from_json(const nlohmann::json& j, NetworkConfig& c);
void to_json(nlohmann::json& j, const EnvConfig& c);
void from_json(const nlohmann::json& j, EnvConfig& c);
void to_json(nlohmann::json& j, const SacHyperparams& c);
void from_json(const nlohmann::json& j, SacHyperparams& c);

EnvConfig load_env_config(const std::string& path);

namespace presets {
/// Full-size scenario with the default constants above.
EnvConfig paper();
/// Tiny two-BS scenario sized for exhaustive search and fast training.
EnvConfig ci();
/// Three-BS scenario used for baseline comparisons and parameter sweeps.
EnvConfig mid();
/// Lookup by name ("paper", "ci", "mid"); throws on unknown names.
EnvConfig by_name(const std::string& name);

SacHyperparams ci_sac();
SacHyperparams mid_sac();
}  // namespace presets

}  // namespace risnet
