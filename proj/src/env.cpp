// SPDX-License-Identifier: Apache-2.0
#include "risnet/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace risnet {

std::vector<double> StateVector::flatten() const {
    std::vector<double> out;
    out.reserve(rates.size() + channel_features.size());
    out.insert(out.end(), rates.begin(), rates.end());
    out.insert(out.end(), channel_features.begin(), channel_features.end());
    return out;
}

int action_dim(const NetworkConfig& cfg) { return 3 + cfg.num_ue; }

int state_dim(const NetworkConfig& cfg) {
    return cfg.num_ue + 2 * cfg.num_bs * cfg.num_ue * cfg.num_antennas;
}

int decode_bin(double raw, int count) {
    double r = std::clamp(raw, -1.0, 1.0);
    int idx = static_cast<int>(std::floor((r + 1.0) / 2.0 * count));
    return std::clamp(idx, 0, count - 1);
}

DecodedAction decode_action(const ActionVector& raw, const NetworkConfig& cfg,
                            const PhaseCodebook& codebook) {
    if (static_cast<int>(raw.size()) != action_dim(cfg))
        throw std::invalid_argument("decode_action: wrong action length");
    DecodedAction a;
    a.theta = quantize_angle(raw[0], codebook);
    a.phi = quantize_angle(raw[1], codebook);
    a.ris_bs = decode_bin(raw[2], cfg.num_bs);
    a.ue_bs.resize(cfg.num_ue);
    for (int k = 0; k < cfg.num_ue; ++k) a.ue_bs[k] = decode_bin(raw[3 + k], cfg.num_bs);
    return a;
}

namespace {

double bin_centre(int index, int count) {
    return -1.0 + (2.0 * index + 1.0) / count;
}

}  // namespace

ActionVector encode_action(int theta_index, int phi_index, int ris_bs,
                           const std::vector<int>& ue_bs, const NetworkConfig& cfg) {
    if (static_cast<int>(ue_bs.size()) != cfg.num_ue)
        throw std::invalid_argument("encode_action: wrong ue_bs length");
    int levels = cfg.codebook_bits > 0 ? (1 << cfg.codebook_bits) : 0;
    if (levels == 0) throw std::invalid_argument("encode_action: continuous codebook");
    ActionVector raw(action_dim(cfg));
    raw[0] = bin_centre(theta_index, levels);
    raw[1] = bin_centre(phi_index, levels);
    raw[2] = bin_centre(ris_bs, cfg.num_bs);
    for (int k = 0; k < cfg.num_ue; ++k) raw[3 + k] = bin_centre(ue_bs[k], cfg.num_bs);
    return raw;
}

Environment::Environment(EnvConfig cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)),
      codebook_(build_codebook(cfg_.network.codebook_bits)),
      rng_(seed) {
    cfg_.validate();
}

AssociationMatrix Environment::default_association() const {
    const auto& net = cfg_.network;
    auto nearest = [&](const Vec2& p) {
        int best = 0;
        double best_d = distance(p, scenario_.bs_positions[0]);
        for (int j = 1; j < net.num_bs; ++j) {
            double d = distance(p, scenario_.bs_positions[j]);
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        return best;
    };
    std::vector<int> ue_bs(net.num_ue);
    for (int k = 0; k < net.num_ue; ++k) ue_bs[k] = nearest(scenario_.ue_positions[k]);
    return AssociationMatrix::from_indices(nearest(scenario_.ris_position), ue_bs,
                                           net.num_bs);
}

StateVector Environment::observe(const LinkBudget& budget, bool fresh_scale) {
    const auto& net = cfg_.network;
    StateVector s;
    s.rates.assign(budget.rates.begin(), budget.rates.end());
    s.channel_features.reserve(2 * net.num_bs * net.num_ue * net.num_antennas);
    double sq = 0.0;
    for (int j = 0; j < net.num_bs; ++j)
        for (int k = 0; k < net.num_ue; ++k)
            for (int i = 0; i < net.num_antennas; ++i) {
                std::complex<double> v = budget.equivalent[j][k](i);
                s.channel_features.push_back(v.real());
                s.channel_features.push_back(v.imag());
                sq += std::norm(v);
            }
    if (fresh_scale) {
        double rms = std::sqrt(sq / static_cast<double>(s.channel_features.size()));
        if (!(rms > 0.0)) {
            // masked features can be all-zero (e.g. blocked direct links with the
            // RIS owned by a BS serving nobody); fall back to unmasked channels
            arma::mat norms =
                unmasked_norms(phase_vector(0.0, 0.0, net.ris_cols, net.ris_rows,
                                            net.unit_modulus_ris),
                               default_association().ris_bs());
            double total = arma::accu(arma::square(norms));
            rms = std::sqrt(total / static_cast<double>(s.channel_features.size()));
        }
        norm_scale_ = rms > 0.0 ? rms : 1.0;
    }
    for (double& x : s.channel_features) x /= norm_scale_;
    s.normalization_scale = norm_scale_;
    return s;
}

arma::mat Environment::unmasked_norms(const arma::cx_vec& psi_diag, int ris_bs) const {
    const auto& net = cfg_.network;
    arma::mat norms(net.num_bs, net.num_ue);
    for (int j = 0; j < net.num_bs; ++j)
        for (int k = 0; k < net.num_ue; ++k) {
            arma::cx_rowvec h =
                equivalent_channel(channels_.direct[j][k], channels_.ris_ue[k],
                                   channels_.bs_ris[j], psi_diag, true, j == ris_bs);
            norms(j, k) = arma::norm(h, 2);
        }
    return norms;
}

StateVector Environment::reset() {
    bool redraw_positions = !initialized_ || cfg_.resample_ue_positions;
    if (redraw_positions) scenario_ = make_scenario(cfg_.network, rng_);
    if (!initialized_ || cfg_.resample_channels || redraw_positions)
        channels_ = generate_channels(cfg_.network, scenario_, rng_);
    initialized_ = true;
    steps_taken_ = 0;
    done_ = false;

    const auto& net = cfg_.network;
    AssociationMatrix assoc = default_association();
    arma::cx_vec psi =
        phase_vector(0.0, 0.0, net.ris_cols, net.ris_rows, net.unit_modulus_ris);
    LinkBudget budget = build_link_budget(channels_, psi, assoc, net.tx_power_w(),
                                          net.noise_w());
    StateVector s = observe(budget, true);
    std::fill(s.rates.begin(), s.rates.end(), 0.0);
    return s;
}

DecodedAction Environment::decode(const ActionVector& raw) const {
    DecodedAction a = decode_action(raw, cfg_.network, codebook_);
    if (cfg_.strict_association) {
        const auto& net = cfg_.network;
        AssociationMatrix assoc =
            AssociationMatrix::from_indices(a.ris_bs, a.ue_bs, net.num_bs);
        arma::cx_vec psi = phase_vector(a.theta, a.phi, net.ris_cols, net.ris_rows,
                                        net.unit_modulus_ris);
        AssociationMatrix repaired =
            repair_association(assoc, unmasked_norms(psi, a.ris_bs));
        for (int k = 0; k < net.num_ue; ++k)
            a.ue_bs[k] = repaired.serving_bs(k);
    }
    return a;
}

double Environment::reward_from_budget(const LinkBudget& budget) const {
    double penalty = 0.0;
    for (arma::uword k = 0; k < budget.rates.n_elem; ++k)
        penalty += std::max(0.0, cfg_.r_min - budget.rates(k));
    return budget.sum_rate - cfg_.penalty_weight * penalty;
}

EvalResult Environment::evaluate(const DecodedAction& action, bool use_ris) const {
    if (!initialized_) throw std::logic_error("evaluate before reset");
    const auto& net = cfg_.network;
    AssociationMatrix assoc =
        AssociationMatrix::from_indices(action.ris_bs, action.ue_bs, net.num_bs);
    arma::cx_vec psi = phase_vector(action.theta, action.phi, net.ris_cols, net.ris_rows,
                                    net.unit_modulus_ris);
    EvalResult res;
    res.budget = build_link_budget(channels_, psi, assoc, net.tx_power_w(), net.noise_w(),
                                   use_ris);
    res.reward = reward_from_budget(res.budget);
    return res;
}

StepResult Environment::step(const ActionVector& raw) {
    if (!initialized_) throw std::logic_error("step before reset");
    if (done_) throw std::logic_error("step after episode end");
    EvalResult ev = evaluate(decode(raw));
    ++steps_taken_;
    done_ = steps_taken_ >= cfg_.steps_per_episode;
    StepResult out;
    out.state = observe(ev.budget, false);
    out.reward = ev.reward;
    out.done = done_;
    return out;
}

}  // namespace risnet
