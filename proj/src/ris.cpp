// SPDX-License-Identifier: Apache-2.0
#include "risnet/ris.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace risnet {

namespace {
constexpr double kPi = std::numbers::pi;
}

PhaseCodebook build_codebook(int bits) {
    if (bits == 0) throw std::invalid_argument("build_codebook: bits must be nonzero");
    PhaseCodebook cb;
    cb.bits = bits;
    if (bits > 0) {
        std::size_t count = std::size_t{1} << bits;
        cb.values.reserve(count);
        for (std::size_t i = 0; i < count; ++i)
            cb.values.push_back(2.0 * kPi * static_cast<double>(i) /
                                static_cast<double>(count));
    }
    return cb;
}

double quantize_angle(double raw, const PhaseCodebook& codebook) {
    double r = std::clamp(raw, -1.0, 1.0);
    if (codebook.continuous()) return (r + 1.0) * kPi;
    auto count = static_cast<long>(codebook.values.size());
    long idx = static_cast<long>(std::floor((r + 1.0) / 2.0 * static_cast<double>(count)));
    idx = std::clamp(idx, 0L, count - 1);
    return codebook.values[static_cast<std::size_t>(idx)];
}

arma::cx_vec phase_vector(double theta, double phi, int m_h, int m_v, bool unit_modulus) {
    if (m_h < 1 || m_v < 1)
        throw std::invalid_argument("phase_vector: panel dims must be positive");
    double ph = -kPi * std::cos(phi) * std::sin(theta);
    double pv = -kPi * std::sin(phi);
    double scale = unit_modulus ? 1.0 : 1.0 / std::sqrt(static_cast<double>(m_h) * m_v);
    arma::cx_vec f(static_cast<arma::uword>(m_h) * m_v);
    // f_v is the fast axis of the Kronecker product
    for (int ih = 0; ih < m_h; ++ih)
        for (int iv = 0; iv < m_v; ++iv)
            f(static_cast<arma::uword>(ih) * m_v + iv) =
                std::polar(scale, ph * ih + pv * iv);
    return f;
}

RisState make_ris_state(double theta, double phi, int m_h, int m_v, bool unit_modulus) {
    RisState st;
    st.theta = theta;
    st.phi = phi;
    st.f = phase_vector(theta, phi, m_h, m_v, unit_modulus);
    return st;
}

}  // namespace risnet
