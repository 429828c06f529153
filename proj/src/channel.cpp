// SPDX-License-Identifier: Apache-2.0
#include "risnet/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace risnet {

namespace {

constexpr double kPi = std::numbers::pi;

double draw_uniform_angle(std::mt19937_64& rng) {
    return std::uniform_real_distribution<double>(-kPi / 2.0, kPi / 2.0)(rng);
}

double draw_shadowing(const NetworkConfig& cfg, double sigma_db, std::mt19937_64& rng) {
    if (!cfg.shadowing) return 0.0;
    return std::normal_distribution<double>(0.0, sigma_db)(rng);
}

const PathLossParams& direct_params(const NetworkConfig& cfg) {
    return cfg.direct_mode == DirectLinkMode::kLos ? cfg.los : cfg.nlos;
}

}  // namespace

double distance(const Vec2& a, const Vec2& b) {
    return std::hypot(a[0] - b[0], a[1] - b[1]);
}

double bearing(const Vec2& from, const Vec2& to) {
    return std::atan2(to[1] - from[1], to[0] - from[0]);
}

Scenario make_scenario(const NetworkConfig& cfg, std::mt19937_64& rng) {
    Scenario sc;
    sc.bs_positions = cfg.bs_positions;
    sc.ris_position = cfg.ris_position;
    if (cfg.ue_positions) {
        sc.ue_positions = *cfg.ue_positions;
        return sc;
    }
    sc.ue_positions.reserve(cfg.num_ue);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < cfg.num_ue; ++k) {
        // sqrt radius for a uniform density over the disc
        double r = cfg.ue_region_radius * std::sqrt(unit(rng));
        double phi = 2.0 * kPi * unit(rng);
        sc.ue_positions.push_back({cfg.ue_region_center[0] + r * std::cos(phi),
                                   cfg.ue_region_center[1] + r * std::sin(phi)});
    }
    return sc;
}

arma::cx_vec steering_vector_ula(double angle, int n) {
    if (n < 1) throw std::invalid_argument("steering_vector_ula: n must be positive");
    arma::cx_vec a(n);
    double s = std::sin(angle);
    for (int i = 0; i < n; ++i)
        a(i) = std::polar(1.0, kPi * static_cast<double>(i) * s);
    return a;
}

arma::cx_vec steering_vector_upa(double azimuth, double elevation, int m_h, int m_v) {
    if (m_h < 1 || m_v < 1)
        throw std::invalid_argument("steering_vector_upa: panel dims must be positive");
    arma::cx_vec a(static_cast<arma::uword>(m_h) * m_v);
    double sh = std::sin(azimuth);
    double sv = std::sin(elevation);
    for (int iv = 0; iv < m_v; ++iv)
        for (int ih = 0; ih < m_h; ++ih)
            a(static_cast<arma::uword>(iv) * m_h + ih) =
                std::polar(1.0, kPi * (ih * sh + iv * sv));
    return a;
}

double path_loss_db(double d, const PathLossParams& p, double shadowing_db) {
    if (!(d > 0.0)) throw std::invalid_argument("path_loss_db: distance must be positive");
    return p.kappa_a_db + 10.0 * p.kappa_b * std::log10(d) + shadowing_db;
}

std::complex<double> draw_complex_gain(double loss_db, std::mt19937_64& rng) {
    double variance = std::pow(10.0, -0.1 * loss_db);
    double sigma = std::sqrt(variance / 2.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    double re = normal(rng);
    double im = normal(rng);
    return {sigma * re, sigma * im};
}

arma::cx_mat assemble_bs_ris_channel(const std::vector<PathDraw>& paths, int m_h, int m_v,
                                     int n) {
    arma::cx_mat g(static_cast<arma::uword>(m_h) * m_v, n, arma::fill::zeros);
    for (const PathDraw& p : paths) {
        arma::cx_vec a_m = steering_vector_upa(p.aoa_azimuth, p.aoa_elevation, m_h, m_v);
        arma::cx_vec a_n = steering_vector_ula(p.aod_azimuth, n);
        g += p.gain * arma::conj(a_m) * a_n.st();
    }
    return g;
}

arma::cx_vec assemble_ris_ue_channel(std::complex<double> gain, double amplitude_gain,
                                     double aod_azimuth, double aod_elevation, int m_h,
                                     int m_v) {
    return gain * amplitude_gain * steering_vector_upa(aod_azimuth, aod_elevation, m_h, m_v);
}

arma::cx_vec assemble_direct_channel(std::complex<double> gain, double amplitude_gain,
                                     double aod_azimuth, int n) {
    return gain * amplitude_gain * steering_vector_ula(aod_azimuth, n);
}

arma::cx_mat generate_bs_ris_channel(const NetworkConfig& cfg, const Scenario& sc,
                                     int bs_index, std::mt19937_64& rng) {
    const Vec2& bs = sc.bs_positions.at(bs_index);
    double d = distance(bs, sc.ris_position);
    std::vector<PathDraw> paths;
    paths.reserve(cfg.num_nlos_paths + 1);
    for (int l = 0; l <= cfg.num_nlos_paths; ++l) {
        bool los = (l == 0);
        const PathLossParams& plp = los ? cfg.los : cfg.nlos;
        double loss = path_loss_db(d, plp, draw_shadowing(cfg, plp.sigma_c_db, rng));
        PathDraw p;
        p.gain = draw_complex_gain(loss, rng);
        if (los) {
            p.aod_azimuth = bearing(bs, sc.ris_position);
            p.aoa_azimuth = bearing(sc.ris_position, bs);
            p.aoa_elevation = draw_uniform_angle(rng);
        } else {
            p.aod_azimuth = draw_uniform_angle(rng);
            p.aoa_azimuth = draw_uniform_angle(rng);
            p.aoa_elevation = draw_uniform_angle(rng);
        }
        paths.push_back(p);
    }
    return assemble_bs_ris_channel(paths, cfg.ris_cols, cfg.ris_rows, cfg.num_antennas);
}

arma::cx_vec generate_ris_ue_channel(const NetworkConfig& cfg, const Scenario& sc,
                                     int ue_index, std::mt19937_64& rng) {
    const Vec2& ue = sc.ue_positions.at(ue_index);
    double d = distance(sc.ris_position, ue);
    double loss = path_loss_db(d, cfg.los, draw_shadowing(cfg, cfg.los.sigma_c_db, rng));
    std::complex<double> alpha = draw_complex_gain(loss, rng);
    double amp = dbi_to_amplitude(cfg.tx_gain_dbi) * dbi_to_amplitude(cfg.rx_gain_dbi);
    double azimuth = bearing(sc.ris_position, ue);
    double elevation = draw_uniform_angle(rng);
    return assemble_ris_ue_channel(alpha, amp, azimuth, elevation, cfg.ris_cols,
                                   cfg.ris_rows);
}

arma::cx_vec generate_direct_channel(const NetworkConfig& cfg, const Scenario& sc,
                                     int bs_index, int ue_index, std::mt19937_64& rng) {
    if (cfg.direct_mode == DirectLinkMode::kBlocked)
        return arma::cx_vec(cfg.num_antennas, arma::fill::zeros);
    const Vec2& bs = sc.bs_positions.at(bs_index);
    const Vec2& ue = sc.ue_positions.at(ue_index);
    double d = distance(bs, ue);
    const PathLossParams& plp = direct_params(cfg);
    double loss = path_loss_db(d, plp, draw_shadowing(cfg, plp.sigma_c_db, rng));
    std::complex<double> alpha = draw_complex_gain(loss, rng);
    double amp = dbi_to_amplitude(cfg.tx_gain_dbi) * dbi_to_amplitude(cfg.rx_gain_dbi);
    return assemble_direct_channel(alpha, amp, bearing(bs, ue), cfg.num_antennas);
}

ChannelSet generate_channels(const NetworkConfig& cfg, const Scenario& sc,
                             std::mt19937_64& rng) {
    ChannelSet ch;
    ch.bs_ris.reserve(cfg.num_bs);
    for (int j = 0; j < cfg.num_bs; ++j)
        ch.bs_ris.push_back(generate_bs_ris_channel(cfg, sc, j, rng));
    ch.ris_ue.reserve(cfg.num_ue);
    for (int k = 0; k < cfg.num_ue; ++k)
        ch.ris_ue.push_back(generate_ris_ue_channel(cfg, sc, k, rng));
    ch.direct.resize(cfg.num_bs);
    for (int j = 0; j < cfg.num_bs; ++j) {
        ch.direct[j].reserve(cfg.num_ue);
        for (int k = 0; k < cfg.num_ue; ++k)
            ch.direct[j].push_back(generate_direct_channel(cfg, sc, j, k, rng));
    }
    return ch;
}

}  // namespace risnet
