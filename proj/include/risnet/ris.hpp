// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include <armadillo>

namespace risnet {

/// Discrete steering-angle set {2*pi*i / 2^B}, or continuous when bits < 0.
struct PhaseCodebook {
    int bits = 2;
    std::vector<double> values;  // empty in continuous mode

    bool continuous() const { return bits < 0; }
    std::size_t size() const { return values.size(); }
};

/// bits >= 1 enumerates the set; negative bits selects continuous mode.
/// bits == 0 is rejected (empty quantization).
PhaseCodebook build_codebook(int bits);

/// Maps raw in [-1, 1] (clamped) onto the codebook: finite mode picks entry
/// floor((raw+1)/2 * 2^B) clamped to the valid range; continuous mode returns
/// (raw+1)*pi.
double quantize_angle(double raw, const PhaseCodebook& codebook);

/// Passive beamforming vector f = f_h kron f_v with
/// f_h(i) = exp(-j*pi*cos(phi)*sin(theta)*i)/sqrt(m_h), i = 0..m_h-1,
/// f_v(i) = exp(-j*pi*sin(phi)*i)/sqrt(m_v).
/// unit_modulus drops the normalization so |f(m)| = 1.
arma::cx_vec phase_vector(double theta, double phi, int m_h, int m_v,
                          bool unit_modulus = false);

/// Azimuth/elevation steering pair plus the derived reflection coefficients.
struct RisState {
    double theta = 0.0;
    double phi = 0.0;
    arma::cx_vec f;  // length m_h * m_v

    arma::cx_vec psi_diag() const { return f; }
};

RisState make_ris_state(double theta, double phi, int m_h, int m_v,
                        bool unit_modulus = false);

}  // namespace risnet
