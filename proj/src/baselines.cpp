// SPDX-License-Identifier: Apache-2.0
#include "risnet/baselines.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace risnet {

RandomBaselineResult baseline_random_association(const Environment& env,
                                                 std::mt19937_64& rng, int trials) {
    if (trials < 1) throw std::invalid_argument("baseline_random_association: trials >= 1");
    const auto& net = env.config().network;
    const PhaseCodebook& cb = env.codebook();
    std::uniform_int_distribution<int> pick_bs(0, net.num_bs - 1);
    auto draw_angle = [&]() -> double {
        if (cb.continuous())
            return std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
        std::uniform_int_distribution<std::size_t> pick(0, cb.size() - 1);
        return cb.values[pick(rng)];
    };
    RandomBaselineResult res;
    res.mean_ue_rates = arma::vec(net.num_ue, arma::fill::zeros);
    for (int t = 0; t < trials; ++t) {
        DecodedAction a;
        a.theta = draw_angle();
        a.phi = draw_angle();
        a.ris_bs = pick_bs(rng);
        a.ue_bs.resize(net.num_ue);
        for (int k = 0; k < net.num_ue; ++k) a.ue_bs[k] = pick_bs(rng);
        EvalResult ev = env.evaluate(a);
        res.mean_reward += ev.reward;
        res.mean_ue_rates += ev.budget.rates;
    }
    res.mean_reward /= trials;
    res.mean_ue_rates /= trials;
    return res;
}

namespace {

// J^K as double to detect overflow against the enumeration limit
double association_count(int num_bs, int num_ue) {
    return std::pow(static_cast<double>(num_bs), static_cast<double>(num_ue));
}

}  // namespace

NoRisResult baseline_no_ris(const Environment& env, std::size_t enumeration_limit) {
    const auto& net = env.config().network;
    NoRisResult best;
    best.reward = -arma::datum::inf;
    auto consider = [&](const std::vector<int>& ue_bs) {
        DecodedAction a;
        a.ris_bs = 0;
        a.ue_bs = ue_bs;
        EvalResult ev = env.evaluate(a, false);
        if (ev.reward > best.reward) {
            best.reward = ev.reward;
            best.ue_bs = ue_bs;
            best.ue_rates = ev.budget.rates;
        }
    };
    if (association_count(net.num_bs, net.num_ue) <=
        static_cast<double>(enumeration_limit)) {
        std::vector<int> ue_bs(net.num_ue, 0);
        while (true) {
            consider(ue_bs);
            int k = 0;
            while (k < net.num_ue && ++ue_bs[k] == net.num_bs) ue_bs[k++] = 0;
            if (k == net.num_ue) break;
        }
    } else {
        std::vector<int> ue_bs(net.num_ue, 0);
        for (int k = 0; k < net.num_ue; ++k) {
            double best_norm = -1.0;
            for (int j = 0; j < net.num_bs; ++j) {
                double n = arma::norm(env.channels().direct[j][k], 2);
                if (n > best_norm) {
                    best_norm = n;
                    ue_bs[k] = j;
                }
            }
        }
        consider(ue_bs);
    }
    return best;
}

OracleResult exhaustive_search(const Environment& env, std::size_t budget) {
    const auto& net = env.config().network;
    const PhaseCodebook& cb = env.codebook();
    if (cb.continuous())
        throw std::invalid_argument("exhaustive_search: needs a finite codebook");
    double levels = static_cast<double>(cb.size());
    double total = levels * levels * net.num_bs * association_count(net.num_bs, net.num_ue);
    if (!(total <= static_cast<double>(budget))) {
        auto required = total < 1e18 ? static_cast<std::size_t>(total)
                                     : std::numeric_limits<std::size_t>::max();
        throw BudgetExceededError("exhaustive_search: " + std::to_string(required) +
                                      " candidates exceed budget " + std::to_string(budget),
                                  required);
    }
    OracleResult best;
    best.reward = -arma::datum::inf;
    DecodedAction a;
    a.ue_bs.assign(net.num_ue, 0);
    for (std::size_t it = 0; it < cb.size(); ++it) {
        a.theta = cb.values[it];
        for (std::size_t ip = 0; ip < cb.size(); ++ip) {
            a.phi = cb.values[ip];
            for (int r = 0; r < net.num_bs; ++r) {
                a.ris_bs = r;
                std::fill(a.ue_bs.begin(), a.ue_bs.end(), 0);
                while (true) {
                    EvalResult ev = env.evaluate(a);
                    ++best.evaluated;
                    if (ev.reward > best.reward) {
                        best.reward = ev.reward;
                        best.config = a;
                        best.ue_rates = ev.budget.rates;
                    }
                    int k = 0;
                    while (k < net.num_ue && ++a.ue_bs[k] == net.num_bs) a.ue_bs[k++] = 0;
                    if (k == net.num_ue) break;
                }
            }
        }
    }
    return best;
}

}  // namespace risnet
