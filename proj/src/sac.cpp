// SPDX-License-Identifier: Apache-2.0
#include "risnet/sac.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace risnet {

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("ReplayMemory: zero capacity");
}

void ReplayMemory::push(Transition t) {
    if (data_.size() < capacity_) {
        data_.push_back(std::move(t));
    } else {
        data_[head_] = std::move(t);
    }
    head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayMemory::at(std::size_t i) const {
    if (i >= data_.size()) throw std::out_of_range("ReplayMemory::at");
    if (data_.size() < capacity_) return data_[i];
    return data_[(head_ + i) % capacity_];
}

std::vector<std::size_t> ReplayMemory::sample_indices(int batch,
                                                      std::mt19937_64& rng) const {
    if (data_.empty()) throw std::logic_error("ReplayMemory: sampling from empty memory");
    std::uniform_int_distribution<std::size_t> pick(0, data_.size() - 1);
    std::vector<std::size_t> idx(batch);
    for (auto& i : idx) i = pick(rng);
    return idx;
}

GaussianPolicyOutput squash_policy(const arma::vec& actor_out, const arma::vec& noise) {
    auto dim = noise.n_elem;
    if (actor_out.n_elem != 2 * dim)
        throw std::invalid_argument("squash_policy: actor output must be twice action dim");
    GaussianPolicyOutput out;
    out.mean = actor_out.subvec(0, dim - 1);
    out.raw_log_std = actor_out.subvec(dim, 2 * dim - 1);
    out.log_std = arma::clamp(out.raw_log_std, kLogStdMin, kLogStdMax);
    out.noise = noise;
    out.pre_tanh = out.mean + arma::exp(out.log_std) % noise;
    out.action = arma::tanh(out.pre_tanh);
    double lp = 0.0;
    for (arma::uword d = 0; d < dim; ++d) {
        lp += -0.5 * noise(d) * noise(d) - out.log_std(d) -
              0.5 * std::log(2.0 * std::numbers::pi);
        lp -= std::log(1.0 - out.action(d) * out.action(d) + kSquashEps);
    }
    out.log_prob = lp;
    return out;
}

namespace {

arma::vec critic_input(const Transition& t, bool next, const arma::vec& action) {
    const auto& s = next ? t.next_state : t.state;
    arma::vec x(s.size() + action.n_elem);
    for (std::size_t i = 0; i < s.size(); ++i) x(i) = s[i];
    x.subvec(s.size(), x.n_elem - 1) = action;
    return x;
}

arma::vec to_arma(const std::vector<double>& v) {
    return arma::vec(const_cast<double*>(v.data()), v.size(), true);
}

}  // namespace

std::vector<double> critic_target(const Batch& batch, const DenseNet& actor,
                                  const DenseNet& q1_target, const DenseNet& q2_target,
                                  double alpha, double gamma,
                                  const std::vector<arma::vec>& next_noise) {
    if (batch.empty()) throw std::invalid_argument("critic_target: empty batch");
    std::vector<double> y(batch.size());
    for (std::size_t b = 0; b < batch.size(); ++b) {
        const Transition& t = *batch[b];
        GaussianPolicyOutput pol =
            squash_policy(forward(actor, to_arma(t.next_state)), next_noise[b]);
        arma::vec x = critic_input(t, true, pol.action);
        double q1 = forward(q1_target, x)(0);
        double q2 = forward(q2_target, x)(0);
        double v = std::min(q1, q2) - alpha * pol.log_prob;
        y[b] = t.reward + gamma * v;
    }
    return y;
}

CriticLossResult critic_loss(const DenseNet& critic, const Batch& batch,
                             const std::vector<double>& targets) {
    if (batch.size() != targets.size())
        throw std::invalid_argument("critic_loss: batch/target size mismatch");
    CriticLossResult res;
    res.grads = NetGradients::zeros_like(critic);
    for (std::size_t b = 0; b < batch.size(); ++b) {
        const Transition& t = *batch[b];
        ForwardCache cache = forward_cached(critic, critic_input(t, false, to_arma(t.action)));
        double delta = cache.output()(0) - targets[b];
        res.loss += 0.5 * delta * delta;
        backward_accumulate(critic, cache, arma::vec{delta}, res.grads);
    }
    double inv = 1.0 / static_cast<double>(batch.size());
    res.loss *= inv;
    res.grads.scale(inv);
    return res;
}

PolicyLossResult policy_loss(const DenseNet& actor, const DenseNet& q1, const DenseNet& q2,
                             double alpha, const Batch& batch,
                             const std::vector<arma::vec>& noise) {
    if (batch.empty()) throw std::invalid_argument("policy_loss: empty batch");
    PolicyLossResult res;
    res.grads = NetGradients::zeros_like(actor);
    res.log_probs.reserve(batch.size());
    NetGradients scratch1 = NetGradients::zeros_like(q1);
    NetGradients scratch2 = NetGradients::zeros_like(q2);
    auto dim = noise[0].n_elem;
    for (std::size_t b = 0; b < batch.size(); ++b) {
        const Transition& t = *batch[b];
        ForwardCache actor_cache = forward_cached(actor, to_arma(t.state));
        GaussianPolicyOutput pol = squash_policy(actor_cache.output(), noise[b]);
        arma::vec x = critic_input(t, false, pol.action);
        ForwardCache c1 = forward_cached(q1, x);
        ForwardCache c2 = forward_cached(q2, x);
        double v1 = c1.output()(0), v2 = c2.output()(0);
        bool use1 = v1 <= v2;
        res.loss += alpha * pol.log_prob - std::min(v1, v2);
        res.log_probs.push_back(pol.log_prob);

        // dQ/da of the pointwise-minimum critic; critic parameters stay frozen
        arma::vec dx;
        if (use1)
            backward_accumulate(q1, c1, arma::vec{1.0}, scratch1, &dx);
        else
            backward_accumulate(q2, c2, arma::vec{1.0}, scratch2, &dx);
        arma::vec qgrad = dx.subvec(t.state.size(), dx.n_elem - 1);

        arma::vec out_grad(2 * dim);
        for (arma::uword d = 0; d < dim; ++d) {
            double a = pol.action(d);
            double g = 1.0 - a * a + kSquashEps;
            double dtanh = 1.0 - a * a;
            double dlogp_da = 2.0 * a / g;  // from the change-of-variables term
            double sigma_eps = std::exp(pol.log_std(d)) * pol.noise(d);
            double dmu = alpha * dlogp_da * dtanh - qgrad(d) * dtanh;
            double dell = alpha * (-1.0 + dlogp_da * dtanh * sigma_eps) -
                          qgrad(d) * dtanh * sigma_eps;
            bool inside = pol.raw_log_std(d) > kLogStdMin && pol.raw_log_std(d) < kLogStdMax;
            out_grad(d) = dmu;
            out_grad(dim + d) = inside ? dell : 0.0;
        }
        backward_accumulate(actor, actor_cache, out_grad, res.grads);
    }
    double inv = 1.0 / static_cast<double>(batch.size());
    res.loss *= inv;
    res.grads.scale(inv);
    return res;
}

TemperatureLossResult temperature_loss(const std::vector<double>& log_probs,
                                       double log_alpha, double target_entropy) {
    if (log_probs.empty()) throw std::invalid_argument("temperature_loss: empty batch");
    double mean_lp = 0.0;
    for (double lp : log_probs) mean_lp += lp;
    mean_lp /= static_cast<double>(log_probs.size());
    double alpha = std::exp(log_alpha);
    TemperatureLossResult res;
    res.loss = -alpha * mean_lp - alpha * target_entropy;
    res.grad_log_alpha = -alpha * (mean_lp + target_entropy);
    return res;
}

SacAgent::SacAgent(int state_dim, int action_dim, SacHyperparams hp, std::uint64_t seed)
    : state_dim_(state_dim),
      action_dim_(action_dim),
      hp_(std::move(hp)),
      replay_(1),
      rng_(seed) {
    if (state_dim_ < 1 || action_dim_ < 1)
        throw std::invalid_argument("SacAgent: dimensions must be positive");
    hp_.validate();
    target_entropy_ = hp_.target_entropy.value_or(-static_cast<double>(action_dim_));
    std::vector<int> actor_sizes{state_dim_};
    std::vector<int> critic_sizes{state_dim_ + action_dim_};
    for (int h : hp_.hidden_sizes) {
        actor_sizes.push_back(h);
        critic_sizes.push_back(h);
    }
    actor_sizes.push_back(2 * action_dim_);
    critic_sizes.push_back(1);
    actor_ = DenseNet::make(actor_sizes, rng_);
    q1_ = DenseNet::make(critic_sizes, rng_);
    q2_ = DenseNet::make(critic_sizes, rng_);
    q1_target_ = q1_;
    q2_target_ = q2_;
    actor_opt_ = AdamState::make(actor_, hp_.learning_rate);
    q1_opt_ = AdamState::make(q1_, hp_.learning_rate);
    q2_opt_ = AdamState::make(q2_, hp_.learning_rate);
    alpha_opt_.learning_rate = hp_.learning_rate;
    replay_ = ReplayMemory(hp_.buffer_capacity);
}

double SacAgent::alpha() const { return std::exp(log_alpha_); }

GaussianPolicyOutput SacAgent::act(const std::vector<double>& state, bool deterministic) {
    if (static_cast<int>(state.size()) != state_dim_)
        throw std::invalid_argument("SacAgent::act: state dimension mismatch");
    arma::vec out = forward(actor_, to_arma(state));
    if (!out.is_finite()) throw std::runtime_error("SacAgent::act: non-finite actor output");
    arma::vec noise(action_dim_, arma::fill::zeros);
    if (!deterministic) {
        std::normal_distribution<double> normal(0.0, 1.0);
        for (auto& n : noise) n = normal(rng_);
    }
    return squash_policy(out, noise);
}

void SacAgent::observe(Transition t) {
    if (static_cast<int>(t.state.size()) != state_dim_ ||
        static_cast<int>(t.next_state.size()) != state_dim_ ||
        static_cast<int>(t.action.size()) != action_dim_)
        throw std::invalid_argument("SacAgent::observe: dimension mismatch");
    replay_.push(std::move(t));
}

std::optional<UpdateDiagnostics> SacAgent::update() {
    auto needed = std::max<std::size_t>(hp_.batch_size,
                                        static_cast<std::size_t>(hp_.warmup_steps));
    if (replay_.size() < needed) return std::nullopt;

    auto indices = replay_.sample_indices(hp_.batch_size, rng_);
    Batch batch;
    batch.reserve(indices.size());
    for (auto i : indices) batch.push_back(&replay_.at(i));

    std::normal_distribution<double> normal(0.0, 1.0);
    auto draw_noise = [&] {
        std::vector<arma::vec> noise(batch.size());
        for (auto& v : noise) {
            v.set_size(action_dim_);
            for (auto& n : v) n = normal(rng_);
        }
        return noise;
    };

    std::vector<arma::vec> next_noise = draw_noise();
    std::vector<double> y = critic_target(batch, actor_, q1_target_, q2_target_, alpha(),
                                          hp_.discount, next_noise);

    CriticLossResult l1 = critic_loss(q1_, batch, y);
    adam_step(q1_opt_, q1_, l1.grads);
    CriticLossResult l2 = critic_loss(q2_, batch, y);
    adam_step(q2_opt_, q2_, l2.grads);

    std::vector<arma::vec> pol_noise = draw_noise();
    PolicyLossResult pl = policy_loss(actor_, q1_, q2_, alpha(), batch, pol_noise);
    adam_step(actor_opt_, actor_, pl.grads);

    TemperatureLossResult tl = temperature_loss(pl.log_probs, log_alpha_, target_entropy_);
    log_alpha_ = adam_step_scalar(alpha_opt_, log_alpha_, tl.grad_log_alpha);

    ++update_count_;
    if (update_count_ % hp_.target_update_interval == 0) {
        soft_update(q1_target_, q1_, hp_.tau);
        soft_update(q2_target_, q2_, hp_.tau);
    }

    UpdateDiagnostics diag;
    diag.critic1_loss = l1.loss;
    diag.critic2_loss = l2.loss;
    diag.policy_loss = pl.loss;
    diag.alpha = alpha();
    double mean_lp = 0.0;
    for (double lp : pl.log_probs) mean_lp += lp;
    diag.entropy = -mean_lp / static_cast<double>(pl.log_probs.size());
    return diag;
}

TrainingLog train(Environment& env, SacAgent& agent, const EpisodeCallback& callback) {
    if (env.state_dim() != agent.state_dim() || env.action_dim() != agent.action_dim())
        throw std::invalid_argument("train: env/agent dimension mismatch");
    TrainingLog log;
    const EnvConfig& cfg = env.config();
    for (int ep = 0; ep < cfg.episodes; ++ep) {
        std::vector<double> state = env.reset().flatten();
        EpisodeLog el;
        el.episode = ep;
        double c1 = 0.0, c2 = 0.0, pl = 0.0;
        for (int t = 0; t < cfg.steps_per_episode; ++t) {
            GaussianPolicyOutput pol = agent.act(state);
            ActionVector action(pol.action.begin(), pol.action.end());
            StepResult sr = env.step(action);
            std::vector<double> next = sr.state.flatten();
            agent.observe({state, action, sr.reward, next});
            el.cumulative_reward += sr.reward;
            ++el.steps;
            for (int g = 0; g < agent.hyperparams().gradient_steps; ++g) {
                if (auto diag = agent.update()) {
                    c1 += diag->critic1_loss;
                    c2 += diag->critic2_loss;
                    pl += diag->policy_loss;
                    ++el.updates;
                }
            }
            state = std::move(next);
            if (sr.done) break;
        }
        el.mean_reward = el.cumulative_reward / static_cast<double>(el.steps);
        if (el.updates > 0) {
            el.critic1_loss = c1 / el.updates;
            el.critic2_loss = c2 / el.updates;
            el.policy_loss = pl / el.updates;
        }
        el.alpha = agent.alpha();
        GaussianPolicyOutput det = agent.act(state, true);
        el.best = env.decode(ActionVector(det.action.begin(), det.action.end()));
        el.eval_reward = env.evaluate(el.best).reward;
        log.episodes.push_back(el);
        if (callback) callback(el);
    }
    return log;
}

void write_training_csv(const TrainingLog& log, std::ostream& out) {
    out << "episode,steps,mean_reward,critic1_loss,critic2_loss,policy_loss,alpha\n";
    char buf[512];
    for (const EpisodeLog& el : log.episodes) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", el.episode,
                      el.steps, el.mean_reward, el.critic1_loss, el.critic2_loss,
                      el.policy_loss, el.alpha);
        out << buf;
    }
}

namespace {
constexpr char kCheckpointMagic[8] = {'S', 'A', 'C', 'C', 'K', 'P', 'T', '1'};
}

void SacAgent::save(std::ostream& out) const {
    out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
    write_u64_le(out, static_cast<std::uint64_t>(state_dim_));
    write_u64_le(out, static_cast<std::uint64_t>(action_dim_));
    write_u64_le(out, static_cast<std::uint64_t>(update_count_));
    write_f64_le(out, log_alpha_);
    write_f64_le(out, target_entropy_);
    write_f64_le(out, hp_.discount);
    write_f64_le(out, hp_.tau);
    write_f64_le(out, hp_.learning_rate);
    write_u64_le(out, static_cast<std::uint64_t>(hp_.batch_size));
    write_u64_le(out, hp_.buffer_capacity);
    write_u64_le(out, static_cast<std::uint64_t>(hp_.target_update_interval));
    write_u64_le(out, static_cast<std::uint64_t>(hp_.gradient_steps));
    write_u64_le(out, static_cast<std::uint64_t>(hp_.warmup_steps));
    write_u64_le(out, hp_.hidden_sizes.size());
    for (int h : hp_.hidden_sizes) write_u64_le(out, static_cast<std::uint64_t>(h));
    serialize_net(actor_, out);
    serialize_net(q1_, out);
    serialize_net(q2_, out);
    serialize_net(q1_target_, out);
    serialize_net(q2_target_, out);
    if (!out) throw std::runtime_error("checkpoint: write failure");
}

SacAgent SacAgent::load(std::istream& in, std::uint64_t seed) {
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || !std::equal(magic, magic + 8, kCheckpointMagic))
        throw std::runtime_error("checkpoint: bad magic");
    auto state_dim = static_cast<int>(read_u64_le(in));
    auto action_dim = static_cast<int>(read_u64_le(in));
    auto update_count = static_cast<long>(read_u64_le(in));
    double log_alpha = read_f64_le(in);
    double target_entropy = read_f64_le(in);
    SacHyperparams hp;
    hp.discount = read_f64_le(in);
    hp.tau = read_f64_le(in);
    hp.learning_rate = read_f64_le(in);
    hp.batch_size = static_cast<int>(read_u64_le(in));
    hp.buffer_capacity = read_u64_le(in);
    hp.target_update_interval = static_cast<int>(read_u64_le(in));
    hp.gradient_steps = static_cast<int>(read_u64_le(in));
    hp.warmup_steps = static_cast<int>(read_u64_le(in));
    auto n_hidden = read_u64_le(in);
    if (n_hidden == 0 || n_hidden > 64) throw std::runtime_error("checkpoint: bad header");
    hp.hidden_sizes.clear();
    for (std::uint64_t i = 0; i < n_hidden; ++i)
        hp.hidden_sizes.push_back(static_cast<int>(read_u64_le(in)));
    hp.target_entropy = target_entropy;
    SacAgent agent(state_dim, action_dim, hp, seed);
    agent.actor_ = deserialize_net(in);
    agent.q1_ = deserialize_net(in);
    agent.q2_ = deserialize_net(in);
    agent.q1_target_ = deserialize_net(in);
    agent.q2_target_ = deserialize_net(in);
    agent.log_alpha_ = log_alpha;
    agent.update_count_ = update_count;
    return agent;
}

}  // namespace risnet
