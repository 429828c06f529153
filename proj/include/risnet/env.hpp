// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "risnet/config.hpp"
#include "risnet/channel.hpp"
#include "risnet/network.hpp"
#include "risnet/ris.hpp"

namespace risnet {

/// Raw policy output: [theta, phi, ris_bs, ue_bs x K], all in [-1, 1].
using ActionVector = std::vector<double>;

struct DecodedAction {
    double theta = 0.0;
    double phi = 0.0;
    int ris_bs = 0;
    std::vector<int> ue_bs;
};

struct StateVector {
    std::vector<double> rates;             // previous-step per-UE rates
    std::vector<double> channel_features;  // re/im of zero-padded equivalent channels
    double normalization_scale = 1.0;

    std::vector<double> flatten() const;
};

int action_dim(const NetworkConfig& cfg);  // 3 + K
int state_dim(const NetworkConfig& cfg);   // K + 2*J*K*N

/// Uniform binning of a clamped raw value onto {0..count-1}.
int decode_bin(double raw, int count);
/// Pure decoding; association repair (strict mode) happens inside the
/// environment where channel norms are available.
DecodedAction decode_action(const ActionVector& raw, const NetworkConfig& cfg,
                            const PhaseCodebook& codebook);
/// Raw vector whose decode_action lands exactly on the given configuration
/// (bin centres); theta_index/phi_index address the codebook.
ActionVector encode_action(int theta_index, int phi_index, int ris_bs,
                           const std::vector<int>& ue_bs, const NetworkConfig& cfg);

struct StepResult {
    StateVector state;
    double reward = 0.0;
    bool done = false;
};

struct EvalResult {
    double reward = 0.0;
    LinkBudget budget;
};

/// Episodic wrapper around the physical model. Channels are frozen within an
/// episode; reset() redraws them when configured to.
class Environment {
  public:
    Environment(EnvConfig cfg, std::uint64_t seed);

    StateVector reset();
    StepResult step(const ActionVector& raw);  // throws std::logic_error after done

    /// Reward and link budget of one decoded configuration against the current
    /// channels; does not advance the episode.
    EvalResult evaluate(const DecodedAction& action, bool use_ris = true) const;

    DecodedAction decode(const ActionVector& raw) const;  // applies strict repair
    double reward_from_budget(const LinkBudget& budget) const;

    const EnvConfig& config() const { return cfg_; }
    const PhaseCodebook& codebook() const { return codebook_; }
    const Scenario& scenario() const { return scenario_; }
    const ChannelSet& channels() const { return channels_; }
    int action_dim() const { return risnet::action_dim(cfg_.network); }
    int state_dim() const { return risnet::state_dim(cfg_.network); }

  private:
    StateVector observe(const LinkBudget& budget, bool fresh_scale);
    AssociationMatrix default_association() const;
    arma::mat unmasked_norms(const arma::cx_vec& psi_diag, int ris_bs) const;

    EnvConfig cfg_;
    PhaseCodebook codebook_;
    std::mt19937_64 rng_;
    Scenario scenario_;
    ChannelSet channels_;
    bool initialized_ = false;
    int steps_taken_ = 0;
    bool done_ = true;
    double norm_scale_ = 1.0;
};

}  // namespace risnet
