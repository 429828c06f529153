// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <random>
#include <stdexcept>

#include "risnet/env.hpp"

namespace risnet {

struct BudgetExceededError : std::runtime_error {
    explicit BudgetExceededError(const std::string& msg, std::size_t required_budget)
        : std::runtime_error(msg), required(required_budget) {}
    std::size_t required;
};

struct RandomBaselineResult {
    double mean_reward = 0.0;
    arma::vec mean_ue_rates;
};

/// Uniform associations (one BS per UE, one BS for the RIS) and uniform
/// codebook angles, averaged over trials against the environment's current
/// channels.
RandomBaselineResult baseline_random_association(const Environment& env,
                                                 std::mt19937_64& rng, int trials);

struct NoRisResult {
    double reward = 0.0;
    std::vector<int> ue_bs;
    arma::vec ue_rates;
};

/// RIS contribution removed; BS-UE association optimized by enumeration when
/// J^K fits the limit, otherwise greedily by direct-channel norm.
NoRisResult baseline_no_ris(const Environment& env,
                            std::size_t enumeration_limit = 1'000'000);

struct OracleResult {
    double reward = 0.0;
    DecodedAction config;
    arma::vec ue_rates;
    std::size_t evaluated = 0;
};

/// Enumerates every decoded configuration (theta, phi, RIS owner, UE
/// assignment) and returns the best. Requires a finite codebook; throws
/// BudgetExceededError when the candidate count exceeds the budget.
OracleResult exhaustive_search(const Environment& env, std::size_t budget = 1'000'000);

}  // namespace risnet
