// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "risnet/config.hpp"
#include "risnet/env.hpp"
#include "risnet/net.hpp"

namespace risnet {

struct Transition {
    std::vector<double> state;
    std::vector<double> action;
    double reward = 0.0;
    std::vector<double> next_state;
};

/// Fixed-capacity FIFO ring; storage grows lazily up to capacity.
class ReplayMemory {
  public:
    explicit ReplayMemory(std::size_t capacity);
    void push(Transition t);
    std::size_t size() const { return data_.size(); }
    std::size_t capacity() const { return capacity_; }
    /// i = 0 addresses the oldest stored transition.
    const Transition& at(std::size_t i) const;
    /// Uniform indices with replacement.
    std::vector<std::size_t> sample_indices(int batch, std::mt19937_64& rng) const;

  private:
    std::size_t capacity_;
    std::size_t head_ = 0;
    std::vector<Transition> data_;
};

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;
inline constexpr double kSquashEps = 1e-6;

/// Reparameterized tanh-Gaussian sample with its log-density.
struct GaussianPolicyOutput {
    arma::vec mean;
    arma::vec raw_log_std;  // actor output before clamping
    arma::vec log_std;
    arma::vec noise;
    arma::vec pre_tanh;
    arma::vec action;
    double log_prob = 0.0;
};

/// actor_out = [mean; raw_log_std]; action = tanh(mean + exp(log_std) * noise),
/// log_prob = sum_d [Gaussian log-density - log(1 - action_d^2 + eps)].
GaussianPolicyOutput squash_policy(const arma::vec& actor_out, const arma::vec& noise);

using Batch = std::vector<const Transition*>;

/// y_b = r_b + gamma * (min_i Q_target_i(s', a') - alpha * log pi(a'|s')) with
/// a' reparameterized from next_noise (one vector per batch entry).
std::vector<double> critic_target(const Batch& batch, const DenseNet& actor,
                                  const DenseNet& q1_target, const DenseNet& q2_target,
                                  double alpha, double gamma,
                                  const std::vector<arma::vec>& next_noise);

struct CriticLossResult {
    double loss = 0.0;
    NetGradients grads;
};

/// Mean over the batch of 0.5 * (Q(s,a) - y)^2; y treated as constant.
CriticLossResult critic_loss(const DenseNet& critic, const Batch& batch,
                             const std::vector<double>& targets);

struct PolicyLossResult {
    double loss = 0.0;
    NetGradients grads;               // actor gradients
    std::vector<double> log_probs;    // per batch entry, reused by the alpha step
};

/// Mean of alpha * log pi(a|s) - min_i Q_i(s,a) with a reparameterized from
/// noise; critic parameters frozen, gradient flows through the action.
PolicyLossResult policy_loss(const DenseNet& actor, const DenseNet& q1, const DenseNet& q2,
                             double alpha, const Batch& batch,
                             const std::vector<arma::vec>& noise);

struct TemperatureLossResult {
    double loss = 0.0;
    double grad_log_alpha = 0.0;
};

/// J(alpha) = mean[-alpha * log pi - alpha * target_entropy], differentiated
/// w.r.t. log(alpha).
TemperatureLossResult temperature_loss(const std::vector<double>& log_probs,
                                       double log_alpha, double target_entropy);

struct UpdateDiagnostics {
    double critic1_loss = 0.0;
    double critic2_loss = 0.0;
    double policy_loss = 0.0;
    double alpha = 0.0;
    double entropy = 0.0;  // mean of -log pi over the batch
};

class SacAgent {
  public:
    SacAgent(int state_dim, int action_dim, SacHyperparams hp, std::uint64_t seed);

    /// Stochastic draw (or tanh(mean) when deterministic). Throws on non-finite
    /// network output.
    GaussianPolicyOutput act(const std::vector<double>& state, bool deterministic = false);
    void observe(Transition t);
    /// One gradient step on critics, actor and temperature plus the periodic
    /// target smoothing; empty when the replay is still warming up.
    std::optional<UpdateDiagnostics> update();

    int state_dim() const { return state_dim_; }
    int action_dim() const { return action_dim_; }
    double alpha() const;
    double target_entropy() const { return target_entropy_; }
    long update_count() const { return update_count_; }
    const SacHyperparams& hyperparams() const { return hp_; }
    const DenseNet& actor() const { return actor_; }
    const DenseNet& critic1() const { return q1_; }
    const DenseNet& critic2() const { return q2_; }
    const DenseNet& target1() const { return q1_target_; }
    const DenseNet& target2() const { return q2_target_; }
    ReplayMemory& replay() { return replay_; }
    const ReplayMemory& replay() const { return replay_; }

    /// Networks, temperature and counters; optimizer moments are not persisted.
    void save(std::ostream& out) const;
    static SacAgent load(std::istream& in, std::uint64_t seed = 0);

  private:
    int state_dim_;
    int action_dim_;
    SacHyperparams hp_;
    double target_entropy_;
    DenseNet actor_, q1_, q2_, q1_target_, q2_target_;
    AdamState actor_opt_, q1_opt_, q2_opt_;
    ScalarAdam alpha_opt_;
    double log_alpha_ = 0.0;
    ReplayMemory replay_;
    std::mt19937_64 rng_;
    long update_count_ = 0;
};

struct EpisodeLog {
    int episode = 0;
    int steps = 0;
    double mean_reward = 0.0;
    double cumulative_reward = 0.0;
    double eval_reward = 0.0;  // deterministic policy at episode end
    double critic1_loss = 0.0;
    double critic2_loss = 0.0;
    double policy_loss = 0.0;
    double alpha = 0.0;
    int updates = 0;
    DecodedAction best;  // decoded deterministic configuration
};

struct TrainingLog {
    std::vector<EpisodeLog> episodes;
};

using EpisodeCallback = std::function<void(const EpisodeLog&)>;

/// Episode loop: act, step, store, gradient step(s) per environment step.
TrainingLog train(Environment& env, SacAgent& agent,
                  const EpisodeCallback& callback = {});

/// Columns: episode,steps,mean_reward,critic1_loss,critic2_loss,policy_loss,alpha
void write_training_csv(const TrainingLog& log, std::ostream& out);

}  // namespace risnet
