// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <random>
#include <vector>

#include <armadillo>

#include "risnet/config.hpp"

namespace risnet {

/// Realized node placement for one network instance.
struct Scenario {
    std::vector<Vec2> bs_positions;
    Vec2 ris_position;
    std::vector<Vec2> ue_positions;
};

double distance(const Vec2& a, const Vec2& b);
/// Azimuth of `to` as seen from `from`, in radians.
double bearing(const Vec2& from, const Vec2& to);

/// Draws UE positions uniformly over the configured disc unless fixed
/// positions are given. Consumes exactly 2 draws per UE.
Scenario make_scenario(const NetworkConfig& cfg, std::mt19937_64& rng);

/// Half-wavelength ULA response, entry i = exp(j*pi*i*sin(angle)), i = 0..n-1.
arma::cx_vec steering_vector_ula(double angle, int n);

/// UPA response as kron(vertical ULA, horizontal ULA): entry (iv*m_h + ih) =
/// exp(j*pi*(ih*sin(az) + iv*sin(el))).
arma::cx_vec steering_vector_upa(double azimuth, double elevation, int m_h, int m_v);

/// kappa_a + 10*kappa_b*log10(d) + shadowing_db. d must be positive.
double path_loss_db(double d, const PathLossParams& p, double shadowing_db);

/// CN(0, 10^(-loss_db/10)) sample; an infinite loss yields exactly zero.
std::complex<double> draw_complex_gain(double loss_db, std::mt19937_64& rng);

/// One propagation path of the BS-RIS link.
struct PathDraw {
    std::complex<double> gain;
    double aod_azimuth;    // departure at the BS array
    double aoa_azimuth;    // arrival at the RIS panel
    double aoa_elevation;
};

// Deterministic assembly from already-drawn quantities; every generator below
// is a thin RNG wrapper over one of these.
arma::cx_mat assemble_bs_ris_channel(const std::vector<PathDraw>& paths, int m_h, int m_v,
                                     int n);
arma::cx_vec assemble_ris_ue_channel(std::complex<double> gain, double amplitude_gain,
                                     double aod_azimuth, double aod_elevation, int m_h,
                                     int m_v);
arma::cx_vec assemble_direct_channel(std::complex<double> gain, double amplitude_gain,
                                     double aod_azimuth, int n);

/// M x N BS-to-RIS channel: LoS path (geometric azimuths, drawn elevation)
/// plus L NLoS paths with uniform angles in [-pi/2, pi/2].
arma::cx_mat generate_bs_ris_channel(const NetworkConfig& cfg, const Scenario& sc,
                                     int bs_index, std::mt19937_64& rng);

/// Length-M RIS-to-UE channel: single LoS path scaled by the element gains.
/// BS independent.
arma::cx_vec generate_ris_ue_channel(const NetworkConfig& cfg, const Scenario& sc,
                                     int ue_index, std::mt19937_64& rng);

/// Length-N BS-to-UE direct channel; all-zero when the direct mode is blocked.
arma::cx_vec generate_direct_channel(const NetworkConfig& cfg, const Scenario& sc,
                                     int bs_index, int ue_index, std::mt19937_64& rng);

struct ChannelSet {
    std::vector<arma::cx_mat> bs_ris;               // [j], M x N
    std::vector<arma::cx_vec> ris_ue;               // [k], M
    std::vector<std::vector<arma::cx_vec>> direct;  // [j][k], N
};

/// Draws every link in a fixed order (BS-RIS by j, RIS-UE by k, direct by
/// (j,k)). The number of RNG draws per link does not depend on the antenna
/// counts, so a fixed seed yields the same fading across array-size sweeps.
ChannelSet generate_channels(const NetworkConfig& cfg, const Scenario& sc,
                             std::mt19937_64& rng);

}  // namespace risnet
