// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "risnet/env.hpp"
#include "scalar_oracle.hpp"

using namespace risnet;

namespace {

EnvConfig single_user_config() {
    EnvConfig cfg;
    auto& net = cfg.network;
    net.num_bs = 1;
    net.num_ue = 1;
    net.num_antennas = 2;
    net.ris_cols = 2;
    net.ris_rows = 1;
    net.num_nlos_paths = 1;
    net.codebook_bits = 1;
    net.bs_positions = {{0.0, 0.0}};
    net.ris_position = {1.0, 1.0};
    net.ue_region_center = {2.0, 0.0};
    net.ue_region_radius = 0.5;
    cfg.steps_per_episode = 4;
    return cfg;
}

}  // namespace

TEST_CASE("action and state dimensions") {
    EnvConfig ci = presets::ci();
    CHECK(action_dim(ci.network) == 5);
    CHECK(state_dim(ci.network) == 2 + 2 * 2 * 2 * 4);

    EnvConfig paper = presets::paper();
    CHECK(action_dim(paper.network) == 19);
    CHECK(state_dim(paper.network) == 16 + 2 * 3 * 16 * 32);
}

TEST_CASE("bin decoding") {
    CHECK(decode_bin(-1.0, 4) == 0);
    CHECK(decode_bin(1.0, 4) == 3);
    CHECK(decode_bin(-3.0, 4) == 0);  // clamped
    CHECK(decode_bin(3.0, 4) == 3);
    CHECK(decode_bin(0.0, 3) == 1);
    CHECK(decode_bin(0.5, 2) == 1);
    CHECK(decode_bin(-0.5, 2) == 0);
}

TEST_CASE("action decoding on the two-level codebook") {
    EnvConfig ci = presets::ci();
    PhaseCodebook cb = build_codebook(ci.network.codebook_bits);

    ActionVector low(5, -1.0);
    DecodedAction a = decode_action(low, ci.network, cb);
    CHECK(a.theta == 0.0);
    CHECK(a.phi == 0.0);
    CHECK(a.ris_bs == 0);
    CHECK(a.ue_bs == std::vector<int>{0, 0});

    ActionVector high(5, 1.0);
    a = decode_action(high, ci.network, cb);
    CHECK(a.theta == doctest::Approx(arma::datum::pi));
    CHECK(a.ris_bs == 1);
    CHECK(a.ue_bs == std::vector<int>{1, 1});

    CHECK_THROWS_AS(decode_action(ActionVector(4, 0.0), ci.network, cb),
                    std::invalid_argument);

    // a midpoint raw value rounds up with an odd BS count
    NetworkConfig three = ci.network;
    three.num_bs = 3;
    three.bs_positions = {{0.0, 0.0}, {6.0, 0.0}, {0.0, 6.0}};
    ActionVector mid(5, 0.0);
    CHECK(decode_action(mid, three, cb).ris_bs == 1);
}

TEST_CASE("encode and decode round-trip over every configuration") {
    EnvConfig ci = presets::ci();
    PhaseCodebook cb = build_codebook(ci.network.codebook_bits);
    int levels = 1 << ci.network.codebook_bits;
    int checked = 0;
    for (int ti = 0; ti < levels; ++ti)
        for (int pi = 0; pi < levels; ++pi)
            for (int ris = 0; ris < ci.network.num_bs; ++ris)
                for (int u0 = 0; u0 < ci.network.num_bs; ++u0)
                    for (int u1 = 0; u1 < ci.network.num_bs; ++u1) {
                        ActionVector raw =
                            encode_action(ti, pi, ris, {u0, u1}, ci.network);
                        DecodedAction a = decode_action(raw, ci.network, cb);
                        CHECK(a.theta == cb.values[ti]);
                        CHECK(a.phi == cb.values[pi]);
                        CHECK(a.ris_bs == ris);
                        CHECK(a.ue_bs == std::vector<int>{u0, u1});
                        ++checked;
                    }
    CHECK(checked == 32);

    NetworkConfig cont = ci.network;
    cont.codebook_bits = kContinuousCodebook;
    CHECK_THROWS_AS(encode_action(0, 0, 0, {0, 0}, cont), std::invalid_argument);
}

TEST_CASE("reset is deterministic in the seed and starts with zero rates") {
    EnvConfig ci = presets::ci();
    Environment env_a(ci, 42), env_b(ci, 42), env_c(ci, 43);
    StateVector sa = env_a.reset();
    StateVector sb = env_b.reset();
    StateVector sc = env_c.reset();

    CHECK(static_cast<int>(sa.flatten().size()) == env_a.state_dim());
    for (double r : sa.rates) CHECK(r == 0.0);
    CHECK(sa.flatten() == sb.flatten());
    CHECK(sa.normalization_scale == sb.normalization_scale);

    bool identical = sa.flatten() == sc.flatten() &&
                     sa.normalization_scale == sc.normalization_scale;
    CHECK_FALSE(identical);
}

TEST_CASE("masked state can be all zero while the scale stays positive") {
    // blocked direct links and an unmatched RIS owner zero every visible feature
    EnvConfig ci = presets::ci();
    Environment env(ci, 7);
    StateVector s = env.reset();
    double feat_norm = 0.0;
    for (double x : s.channel_features) feat_norm += x * x;
    CHECK(feat_norm == 0.0);
    CHECK(s.normalization_scale > 0.0);
    CHECK(std::isfinite(s.normalization_scale));
}

TEST_CASE("step reward agrees with evaluate") {
    EnvConfig ci = presets::ci();
    Environment env(ci, 5), probe(ci, 5);
    env.reset();
    probe.reset();

    ActionVector raw = encode_action(1, 0, 0, {1, 0}, ci.network);
    StepResult st = env.step(raw);
    EvalResult ev = probe.evaluate(probe.decode(raw));
    CHECK(st.reward == doctest::Approx(ev.reward).epsilon(1e-12));

    // channels are frozen within the episode, so replaying the action repeats
    // the reward exactly
    StepResult again = env.step(raw);
    CHECK(again.reward == st.reward);

    // the observation carries the per-UE rates of the configuration just played
    for (int k = 0; k < ci.network.num_ue; ++k)
        CHECK(st.state.rates[k] == doctest::Approx(ev.budget.rates(k)).epsilon(1e-12));
}

TEST_CASE("episode termination") {
    EnvConfig cfg = presets::ci();
    cfg.steps_per_episode = 2;
    Environment env(cfg, 1);
    ActionVector raw(env.action_dim(), 0.25);

    CHECK_THROWS_AS(env.step(raw), std::logic_error);  // before reset

    env.reset();
    CHECK_FALSE(env.step(raw).done);
    CHECK(env.step(raw).done);
    CHECK_THROWS_AS(env.step(raw), std::logic_error);

    env.reset();  // reopens the episode
    CHECK_FALSE(env.step(raw).done);
}

TEST_CASE("QoS shortfall penalty") {
    EnvConfig cfg = presets::ci();
    cfg.r_min = 5.0;
    cfg.penalty_weight = 2.0;
    Environment env(cfg, 9);
    env.reset();
    DecodedAction a = env.decode(encode_action(0, 1, 0, {1, 1}, cfg.network));
    EvalResult ev = env.evaluate(a);
    double expect = ev.budget.sum_rate;
    for (arma::uword k = 0; k < ev.budget.rates.n_elem; ++k)
        expect -= 2.0 * std::max(0.0, 5.0 - ev.budget.rates(k));
    CHECK(ev.reward == doctest::Approx(expect).epsilon(1e-12));
    CHECK(ev.reward < ev.budget.sum_rate);
}

TEST_CASE("single-user reward has the closed form") {
    EnvConfig cfg = single_user_config();
    Environment env(cfg, 11);
    env.reset();

    DecodedAction a;
    a.theta = 0.7;
    a.phi = -0.3;
    a.ris_bs = 0;
    a.ue_bs = {0};
    EvalResult ev = env.evaluate(a);

    arma::cx_vec psi = phase_vector(0.7, -0.3, 2, 1);
    arma::cx_rowvec h = scalar_oracle::equivalent_channel(
        env.channels().direct[0][0], env.channels().ris_ue[0], env.channels().bs_ris[0],
        psi, true, true);
    double g = std::pow(arma::norm(h, 2), 2);
    double expect =
        std::log2(1.0 + cfg.network.tx_power_w() * g / cfg.network.noise_w());
    CHECK(scalar_oracle::rel_err(ev.reward, expect) < 1e-10);
}

TEST_CASE("channel resampling flags") {
    EnvConfig frozen = presets::ci();
    Environment env(frozen, 3);
    env.reset();
    arma::cx_mat g0 = env.channels().bs_ris[0];
    Vec2 p0 = env.scenario().ue_positions[0];
    env.reset();
    CHECK(arma::norm(env.channels().bs_ris[0] - g0, "fro") == 0.0);
    CHECK(env.scenario().ue_positions[0] == p0);

    EnvConfig moving = presets::ci();
    moving.resample_channels = true;
    Environment env2(moving, 3);
    env2.reset();
    arma::cx_mat g1 = env2.channels().bs_ris[0];
    env2.reset();
    CHECK(arma::norm(env2.channels().bs_ris[0] - g1, "fro") > 0.0);

    EnvConfig walking = presets::ci();
    walking.resample_ue_positions = true;
    Environment env3(walking, 3);
    env3.reset();
    Vec2 q0 = env3.scenario().ue_positions[0];
    env3.reset();
    CHECK(env3.scenario().ue_positions[0] != q0);
}

TEST_CASE("strict association repair keeps every BS loaded") {
    EnvConfig cfg = presets::ci();
    cfg.strict_association = true;
    Environment env(cfg, 13);
    env.reset();

    ActionVector raw = encode_action(0, 0, 0, {0, 0}, cfg.network);
    DecodedAction a = env.decode(raw);
    CHECK(a.ue_bs != std::vector<int>{0, 0});
    std::vector<int> load(cfg.network.num_bs, 0);
    for (int b : a.ue_bs) ++load[b];
    for (int c : load) CHECK(c >= 1);
    // blocked direct links make both candidates look identical toward BS 2, so
    // the lowest UE index moves
    CHECK(a.ue_bs == std::vector<int>{1, 0});

    EnvConfig loose = presets::ci();
    Environment env2(loose, 13);
    env2.reset();
    CHECK(env2.decode(raw).ue_bs == std::vector<int>{0, 0});
}

TEST_CASE("evaluate requires an initial reset") {
    Environment env(presets::ci(), 2);
    DecodedAction a;
    a.ue_bs = {0, 0};
    CHECK_THROWS_AS(env.evaluate(a), std::logic_error);
}
